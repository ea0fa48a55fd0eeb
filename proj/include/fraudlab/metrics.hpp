#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"

namespace fraudlab {

struct ConfusionMatrix {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::uint64_t total() const { return tp + tn + fp + fn; }
};

/// Counts with the given positive class; lengths must match, labels in {0,1}.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int positive = 1);

// Each metric is one division of exactly representable integer counts, so the
// double result is the correctly rounded value of the underlying rational.
// 0/0 cases return 0 (the degenerate flag lives in ClassReport).
double accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm); // 2tp / (2tp + fp + fn)

/// Per-class metric bundle. `degenerate` is set when any denominator was zero
/// and the corresponding metric was reported as 0.
struct ClassReport {
    int positive_class = 1;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    std::uint64_t support = 0;
    bool degenerate = false;
};

ClassReport class_report(const ConfusionMatrix& cm, int positive_class);

/// Row count, fraud count and content hash of an evaluation set.
struct DatasetFingerprint {
    std::uint64_t rows = 0;
    std::uint64_t fraud = 0;
    std::uint64_t content_hash = 0;
};

/// Evaluation result with provenance: which model, which sampling, which data.
struct EvalReport {
    ClassReport class1;
    ClassReport class0;
    ConfusionMatrix cm; // positive class 1
    double threshold = 0.5;
    DatasetFingerprint data;
    std::string model_desc;
    std::string sampling_desc;
    std::uint64_t model_seed = 0;
};

} // namespace fraudlab
