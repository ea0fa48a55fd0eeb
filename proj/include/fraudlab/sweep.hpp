#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"
#include "fraudlab/models.hpp"

namespace fraudlab {

struct SweepPoint {
    double ratio = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool skipped = false;
    std::string skip_reason;
};

struct RatioSweepResult {
    std::vector<SweepPoint> points; // in the caller's ratio order
};

/// For each ratio: hybrid-resample the training set, fit the model, score on
/// `eval` (never resampled), record class-1 precision/recall/F1. Infeasible
/// ratios are recorded as skipped and the sweep continues. Per-ratio seeds
/// derive from (seed, ratio), so results do not depend on grid order, and
/// parallel execution matches serial output.
RatioSweepResult ratio_sweep(const Dataset& train, std::span<const double> ratios,
                             const ModelSpec& model, const Dataset& eval, double multiplier,
                             std::size_t smote_k, std::uint64_t seed, int threads = 1,
                             double threshold = 0.5);

enum class SelectCriterion { max_f1, min_precision_floor, knee };

SelectCriterion criterion_from_name(const std::string& name);
std::string criterion_name(SelectCriterion c);

/// max_f1: highest class-1 F1, ties toward the smaller ratio.
/// min_precision_floor: highest recall among points with precision >= floor.
/// knee: not implemented; requesting it is an error.
double select_ratio(const RatioSweepResult& sweep, SelectCriterion criterion, double floor = 0.0);

/// Log-spaced grid over [lo, hi], inclusive at both ends.
std::vector<double> log_spaced_ratios(double lo, double hi, std::size_t count);

void write_sweep_csv(const RatioSweepResult& sweep, const std::string& path);

} // namespace fraudlab
