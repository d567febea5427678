// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vericwety/evaluation.hpp"

namespace vericwety::eval {

inline constexpr const char* kReportSchema = "vericwety-report/1";

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

/// Aligned table: header, one row per class, then Accuracy, Macro Avg and
/// Weighted Avg rows.
std::string text_table(const EvaluationReport& report);

std::string pr_curve_csv(const std::vector<PrPoint>& points);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string confusion_csv(const ConfusionMatrix& cm);

std::string pr_curve_svg(const std::vector<PrPoint>& points, const std::string& title);
std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title);
std::string fp_fn_svg(const std::vector<SweepRow>& rows, const std::string& title);

enum class ReportFormat { kJson, kText, kPlots };

/// Writes `<stem>.json` always; `<stem>.txt` for kText; CSV points and SVG
/// plots for kPlots. Returns the paths written.
std::vector<std::filesystem::path> render_report(const EvaluationReport& report,
                                                 const std::filesystem::path& dir,
                                                 const std::string& stem,
                                                 const std::vector<ReportFormat>& formats);

}  // namespace vericwety::eval
