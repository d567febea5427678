// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/report.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "vericwety/error.hpp"
#include "vericwety/io.hpp"

namespace vericwety::eval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json averages_json(const Averages& a) {
  return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}

Averages averages_from(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr int kPlotW = 480;
constexpr int kPlotH = 360;
constexpr int kMargin = 50;

std::string svg_open(int w, int h, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      w, h, w / 2, xml_escape(title));
}

std::string axes(const std::string& xlabel, const std::string& ylabel) {
  const int x0 = kMargin, y0 = kPlotH - kMargin, x1 = kPlotW - 20, y1 = 30;
  std::string s = fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
      x0, y0, x1, y1);
  for (int i = 0; i <= 4; ++i) {
    double v = i / 4.0;
    double x = x0 + v * (x1 - x0);
    double y = y0 - v * (y0 - y1);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.2f}</text>\n", x, y0 + 15, v);
    s += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", x0 - 5, y + 4, v);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2,
                   kPlotH - 12, xml_escape(xlabel));
  s += fmt::format(
      "<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>\n",
      (y0 + y1) / 2, xml_escape(ylabel));
  return s;
}

}  // namespace

json to_json(const EvaluationReport& r) {
  json per_class = json::array();
  for (const auto& m : r.per_class) {
    per_class.push_back(json{{"label", m.label},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
  }
  json j{{"schema", kReportSchema},
         {"title", r.title},
         {"per_class", per_class},
         {"accuracy", r.aggregates.accuracy},
         {"macro_avg", averages_json(r.aggregates.macro)},
         {"weighted_avg", averages_json(r.aggregates.weighted)},
         {"balanced_accuracy", r.aggregates.balanced_accuracy},
         {"confusion", {{"label_space", r.confusion.label_space}, {"counts", r.confusion.counts}}}};
  if (r.curves) {
    json pr = json::array();
    for (const auto& p : r.curves->pr_curve) {
      pr.push_back(json{{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}});
    }
    json sweep = json::array();
    for (const auto& s : r.curves->threshold_sweep) {
      sweep.push_back(json{{"threshold", s.threshold},
                           {"precision", s.precision},
                           {"recall", s.recall},
                           {"f1", s.f1},
                           {"tp", s.tp},
                           {"fp", s.fp},
                           {"tn", s.tn},
                           {"fn", s.fn}});
    }
    j["curves"] = json{{"pr_curve", pr}, {"threshold_sweep", sweep}};
  }
  return j;
}

EvaluationReport report_from_json(const json& j) {
  if (j.value("schema", "") != kReportSchema) {
    throw Error(ErrorCode::kFormat, "unsupported report schema");
  }
  try {
    EvaluationReport r;
    r.title = j.at("title").get<std::string>();
    for (const auto& m : j.at("per_class")) {
      r.per_class.push_back({m.at("label").get<std::string>(), m.at("precision").get<double>(),
                             m.at("recall").get<double>(), m.at("f1").get<double>(),
                             m.at("support").get<long long>()});
    }
    r.aggregates.accuracy = j.at("accuracy").get<double>();
    r.aggregates.macro = averages_from(j.at("macro_avg"));
    r.aggregates.weighted = averages_from(j.at("weighted_avg"));
    r.aggregates.balanced_accuracy = j.at("balanced_accuracy").get<double>();
    r.confusion.label_space = j.at("confusion").at("label_space").get<std::vector<std::string>>();
    r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::vector<long long>>>();
    if (auto c = j.find("curves"); c != j.end()) {
      Curves curves;
      for (const auto& p : c->at("pr_curve")) {
        curves.pr_curve.push_back({p.at("threshold").get<double>(), p.at("precision").get<double>(),
                                   p.at("recall").get<double>()});
      }
      for (const auto& s : c->at("threshold_sweep")) {
        curves.threshold_sweep.push_back(
            {s.at("threshold").get<double>(), s.at("precision").get<double>(),
             s.at("recall").get<double>(), s.at("f1").get<double>(), s.at("tp").get<long long>(),
             s.at("fp").get<long long>(), s.at("tn").get<long long>(), s.at("fn").get<long long>()});
      }
      r.curves = std::move(curves);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed report: ") + e.what());
  }
}

std::string text_table(const EvaluationReport& r) {
  std::size_t width = std::string("Weighted Avg").size();
  for (const auto& m : r.per_class) width = std::max(width, m.label.size());
  const long long total = r.confusion.total();

  std::string out;
  if (!r.title.empty()) out += r.title + "\n";
  out += fmt::format("{:<{}}  {:>6}  {:>6}  {:>6}  {:>6}\n", "Class", width, "Prec.", "Rec.", "F1", "Sup.");
  for (const auto& m : r.per_class) {
    out += fmt::format("{:<{}}  {:>6.3f}  {:>6.3f}  {:>6.3f}  {:>6}\n", m.label, width, m.precision,
                       m.recall, m.f1, m.support);
  }
  const auto& a = r.aggregates;
  out += fmt::format("{:<{}}  {:>6}  {:>6}  {:>6.3f}  {:>6}\n", "Accuracy", width, "", "", a.accuracy, total);
  out += fmt::format("{:<{}}  {:>6.3f}  {:>6.3f}  {:>6.3f}  {:>6}\n", "Macro Avg", width,
                     a.macro.precision, a.macro.recall, a.macro.f1, total);
  out += fmt::format("{:<{}}  {:>6.3f}  {:>6.3f}  {:>6.3f}  {:>6}\n", "Weighted Avg", width,
                     a.weighted.precision, a.weighted.recall, a.weighted.f1, total);
  return out;
}

std::string pr_curve_csv(const std::vector<PrPoint>& points) {
  std::string out = "threshold,precision,recall\n";
  for (const auto& p : points) out += fmt::format("{},{},{}\n", p.threshold, p.precision, p.recall);
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "threshold,precision,recall,f1,tp,fp,tn,fn\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.threshold, r.precision, r.recall, r.f1, r.tp,
                       r.fp, r.tn, r.fn);
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "gold\\predicted";
  for (const auto& l : cm.label_space) out += "," + l;
  out += "\n";
  for (std::size_t i = 0; i < cm.counts.size(); ++i) {
    out += cm.label_space[i];
    for (auto c : cm.counts[i]) out += fmt::format(",{}", c);
    out += "\n";
  }
  return out;
}

std::string pr_curve_svg(const std::vector<PrPoint>& points, const std::string& title) {
  std::string s = svg_open(kPlotW, kPlotH, title) + axes("Recall", "Precision");
  const double x0 = kMargin, y0 = kPlotH - kMargin, x1 = kPlotW - 20, y1 = 30;
  std::string path;
  for (const auto& p : points) {
    path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "M" : " L", x0 + p.recall * (x1 - x0),
                        y0 - p.precision * (y0 - y1));
  }
  s += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n", path);
  return s + "</svg>\n";
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
  const std::size_t k = cm.label_space.size();
  const int cell = k <= 4 ? 70 : 40;
  const int left = 140, top = 40;
  const int w = left + static_cast<int>(k) * cell + 20;
  const int h = top + static_cast<int>(k) * cell + 120;
  long long max_count = 1;
  for (const auto& row : cm.counts) {
    for (auto c : row) max_count = std::max(max_count, c);
  }
  std::string s = svg_open(w, h, title);
  for (std::size_t i = 0; i < k; ++i) {
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 5,
                     top + static_cast<int>(i) * cell + cell / 2 + 4, xml_escape(cm.label_space[i]));
    int lx = left + static_cast<int>(i) * cell + cell / 2;
    int ly = top + static_cast<int>(k) * cell + 10;
    s += fmt::format(
        "<text x=\"{0}\" y=\"{1}\" text-anchor=\"end\" transform=\"rotate(-60 {0} {1})\">{2}</text>\n",
        lx, ly, xml_escape(cm.label_space[i]));
    for (std::size_t j = 0; j < k; ++j) {
      double frac = static_cast<double>(cm.counts[i][j]) / static_cast<double>(max_count);
      int shade = 255 - static_cast<int>(frac * 200);
      s += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},255)\" stroke=\"#ccc\"/>\n",
          left + static_cast<int>(j) * cell, top + static_cast<int>(i) * cell, cell, cell, shade, shade);
      s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       left + static_cast<int>(j) * cell + cell / 2,
                       top + static_cast<int>(i) * cell + cell / 2 + 4, cm.counts[i][j]);
    }
  }
  return s + "</svg>\n";
}

std::string fp_fn_svg(const std::vector<SweepRow>& rows, const std::string& title) {
  std::string s = svg_open(kPlotW, kPlotH, title);
  if (rows.empty()) return s + "</svg>\n";
  long long max_count = 1;
  for (const auto& r : rows) max_count = std::max({max_count, r.fp, r.fn});
  const double x0 = kMargin, y0 = kPlotH - kMargin, x1 = kPlotW - 20, y1 = 30;
  const double slot = (x1 - x0) / static_cast<double>(rows.size());
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", x0, y0, x1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double bx = x0 + slot * static_cast<double>(i);
    double fp_h = (y0 - y1) * static_cast<double>(rows[i].fp) / static_cast<double>(max_count);
    double fn_h = (y0 - y1) * static_cast<double>(rows[i].fn) / static_cast<double>(max_count);
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"indianred\"/>\n",
                     bx + 1, y0 - fp_h, slot / 2 - 1, fp_h);
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"steelblue\"/>\n",
                     bx + slot / 2, y0 - fn_h, slot / 2 - 1, fn_h);
    if (i % 4 == 0) {
      s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.2f}</text>\n",
                       bx + slot / 2, y0 + 15, rows[i].threshold);
    }
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"indianred\">FP</text>\n", x1 - 60, y1 + 10);
  s += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"steelblue\">FN</text>\n", x1 - 30, y1 + 10);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">Threshold (max count {})</text>\n",
                   (x0 + x1) / 2, kPlotH - 12, max_count);
  return s + "</svg>\n";
}

std::vector<fs::path> render_report(const EvaluationReport& report, const fs::path& dir,
                                    const std::string& stem, const std::vector<ReportFormat>& formats) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    auto p = dir / name;
    io::write_text(p, content);
    written.push_back(p);
  };
  emit(stem + ".json", to_json(report).dump(2) + "\n");
  for (auto f : formats) {
    if (f == ReportFormat::kText) emit(stem + ".txt", text_table(report));
    if (f == ReportFormat::kPlots) {
      emit(stem + "_confusion.csv", confusion_csv(report.confusion));
      emit(stem + "_confusion.svg", confusion_svg(report.confusion, report.title + " confusion"));
      if (report.curves) {
        emit(stem + "_pr_curve.csv", pr_curve_csv(report.curves->pr_curve));
        emit(stem + "_pr_curve.svg", pr_curve_svg(report.curves->pr_curve, report.title + " PR curve"));
        emit(stem + "_threshold_sweep.csv", sweep_csv(report.curves->threshold_sweep));
        emit(stem + "_fp_fn.svg", fp_fn_svg(report.curves->threshold_sweep, report.title + " FP/FN"));
      }
    }
  }
  return written;
}

}  // namespace vericwety::eval
