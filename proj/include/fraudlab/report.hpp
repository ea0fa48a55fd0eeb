#pragma once

#include <set>
#include <string>
#include <vector>

#include "fraudlab/experiments.hpp"

namespace fraudlab {

enum class ReportFormat { json, csv, markdown, svg };

ReportFormat format_from_name(const std::string& name);
std::set<ReportFormat> formats_from_list(const std::string& comma_list);

std::string report_to_json(const EvalReport& report);
std::string report_to_csv(const std::string& model, const EvalReport& report);
/// One-row table in the paper's layout: Model, Precision, Recall, F1-Score, Accuracy.
std::string report_to_markdown(const std::string& model, const std::string& tag, const EvalReport& report);

/// Throws unless `dir` exists (or can be created) and is writable. Experiment
/// commands call this before any training starts.
void ensure_writable_dir(const std::string& dir);

struct EmittedFiles {
    std::vector<std::string> paths; // relative to out_dir
    std::string manifest_path;
};

/// Writes reports/<experiment>/<model>-<tag>.<ext> per requested format, a
/// summary table per eval tag, sweeps/<model>.csv|.svg for sweep results, and
/// manifest.json listing every artifact with its content hash. An empty
/// format set emits the manifest only.
EmittedFiles emit_reports(const ExperimentResult& result, const std::set<ReportFormat>& formats,
                          const std::string& out_dir);

} // namespace fraudlab
