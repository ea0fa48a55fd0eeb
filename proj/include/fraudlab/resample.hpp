#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"

namespace fraudlab {

// Class roles are fixed by the domain: class 0 is the majority (non-fraud),
// class 1 the minority (fraud).

enum class PlanKind { undersample, smote, hybrid };

/// Declarative description of a resampling. Only the fields relevant to
/// `kind` are consulted; validate() enforces the per-kind contracts.
struct ResamplePlan {
    PlanKind kind = PlanKind::undersample;
    std::size_t target_majority = 0;    // undersample
    std::size_t target_minority = 0;    // smote
    double fraud_ratio = 0.0;           // hybrid, in (0, 0.5]
    double minority_multiplier = 10.0;  // hybrid, >= 1
    std::size_t smote_k = 5;
    std::uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
};

/// Keeps every minority row plus a seeded uniform subset of exactly
/// `target_majority` majority rows. Output rows are a subset of the input.
Dataset undersample(const Dataset& ds, std::size_t target_majority, std::uint64_t seed);

/// Where each synthetic row came from: s = base + u * (neighbor - base).
struct SmoteOrigin {
    RowId id = 0;       // synthetic row id
    RowId base = 0;     // minority row interpolated from
    RowId neighbor = 0; // one of the base's k nearest minority neighbors
    double u = 0.0;     // interpolation factor in [0, 1]
};

struct SmoteResult {
    Dataset data;
    std::vector<SmoteOrigin> origins; // one per synthetic row, in append order
};

/// Grows the minority class to `target_minority` by convex interpolation
/// between a minority row and one of its k nearest minority neighbors
/// (Euclidean, self excluded). Base rows are cycled round-robin in seeded
/// order, so per-base synthetic counts differ by at most one. Majority rows
/// pass through untouched.
SmoteResult smote(const Dataset& ds, std::size_t target_minority, std::size_t k, std::uint64_t seed);

/// SMOTE the minority to round(multiplier * count), then undersample the
/// majority so the fraud fraction lands on `fraud_ratio` (within 1/total).
/// Throws InfeasiblePlanError when the implied majority target exceeds the
/// rows available, naming the two knobs that fix it.
Dataset hybrid_resample(const Dataset& ds, double fraud_ratio, double minority_multiplier,
                        std::size_t smote_k, std::uint64_t seed);

Dataset apply_plan(const Dataset& ds, const ResamplePlan& plan);

} // namespace fraudlab
