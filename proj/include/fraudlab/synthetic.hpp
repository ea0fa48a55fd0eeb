#pragma once

#include <cstdint>

#include "fraudlab/dataset.hpp"

namespace fraudlab {

/// Recipe for a desk-scale two-class Gaussian mixture. Class 1 cluster centers
/// sit `class_separation` away from the matching class 0 centers, so
/// separation 0 makes the classes statistically indistinguishable.
struct SyntheticSpec {
    std::size_t n_majority = 0;
    std::size_t n_minority = 0;
    std::size_t dimensions = 1;
    double class_separation = 4.0;
    std::size_t clusters_per_class = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Exactly n_majority label-0 rows followed by n_minority label-1 rows,
/// ids 0..n-1. Deterministic under the spec's seed.
Dataset generate_synthetic(const SyntheticSpec& spec);

} // namespace fraudlab
