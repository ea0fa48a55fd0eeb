#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"

namespace fraudlab {

struct ColumnScale {
    std::size_t column = 0;
    double center = 0.0; // column median
    double spread = 0.0; // interquartile range, Q3 - Q1
    bool constant = false;
};

/// Median/IQR scaling parameters plus the fingerprint of the dataset they were
/// fitted on, so experiment runs can assert the scaler came from training data.
struct ScalerParams {
    std::vector<ColumnScale> columns;
    std::size_t feature_count = 0;
    std::uint64_t fitted_on = 0;
};

/// Quantile with linear interpolation between order statistics.
/// `sorted` must be ascending; q in [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

ScalerParams fit_robust_scaler(const Dataset& ds, std::span<const std::size_t> columns);
ScalerParams fit_robust_scaler(const Dataset& ds, const std::vector<std::string>& column_names);

/// (x - center) / spread per scaled column; constant columns map to 0.
/// Labels, ids and unscaled columns pass through unchanged.
Dataset apply_scaler(const Dataset& ds, const ScalerParams& params);

/// Inverse transform; rows of constant columns are restored to the center value.
Dataset invert_scaler(const Dataset& ds, const ScalerParams& params);

} // namespace fraudlab
