#pragma once

#include "fraudlab/dataset.hpp"
#include "fraudlab/metrics.hpp"
#include "fraudlab/models.hpp"

namespace fraudlab {

/// Scores every row of `ds` at the threshold and assembles per-class reports
/// plus the dataset fingerprint. Pure: identical inputs give identical reports.
EvalReport evaluate(const TrainedModel& model, const Dataset& ds, double threshold = 0.5,
                    int threads = 1, const std::string& sampling_desc = "");

} // namespace fraudlab
