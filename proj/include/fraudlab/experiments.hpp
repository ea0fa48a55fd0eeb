#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"
#include "fraudlab/evaluate.hpp"
#include "fraudlab/models.hpp"
#include "fraudlab/resample.hpp"
#include "fraudlab/scaler.hpp"
#include "fraudlab/sweep.hpp"
#include "fraudlab/synthetic.hpp"

namespace fraudlab {

struct SweepSettings {
    std::vector<double> ratios;  // empty = 20 log-spaced points in [0.01, 0.5]
    SelectCriterion criterion = SelectCriterion::max_f1;
    double precision_floor = 0.0;
    bool paper_protocol = false;      // sweep scores on the test set, as the paper did
    double validation_fraction = 0.25; // carve-out from train for the leak-free default
    double multiplier = 10.0;
    std::size_t smote_k = 5;

    std::vector<double> resolved_ratios() const;
};

/// Everything a canned experiment needs. Exactly one data source may be set.
struct ExperimentConfig {
    std::string csv_path;
    std::string csv_schema = "ulb"; // "ulb" = strict header check, "any" = generic
    std::optional<SyntheticSpec> synthetic;
    double split_fraction = 0.25;
    std::uint64_t seed = 42;
    double threshold = 0.5;
    std::vector<std::string> model_names; // empty = all five families
    std::vector<ModelSpec> model_overrides; // explicit specs win over names
    ResamplePlan sampling;
    SweepSettings sweep;
    std::vector<std::string> scale_columns{"Time", "Amount"};
    std::string out_dir;
    int threads = 0;

    void validate() const;
    Dataset load_data() const;
    /// Model list with per-model seeds fanned out from the master seed.
    std::vector<ModelSpec> resolved_models() const;
};

struct ModelRunReport {
    std::string model;
    std::string eval_tag; // "test", "balanced-test", "imbalanced-test", "baseline", "hybrid"
    EvalReport report;
};

struct ModelSweep {
    std::string model;
    RatioSweepResult sweep;
    double selected_ratio = 0.0;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<ModelRunReport> reports;
    std::vector<ModelSweep> sweeps;
    std::string config_snapshot;
    double wall_seconds = 0.0; // in-memory only; never written into hashed artifacts

    const EvalReport* find(const std::string& model, const std::string& tag) const;
};

// Leakage guards. Every run_* calls these before scoring; tests corrupt
// inputs deliberately to confirm they trip.
void assert_disjoint_ids(const Dataset& train, const Dataset& eval);
void assert_scaler_from(const ScalerParams& scaler, const Dataset& train);
void assert_no_synthetic_rows(const Dataset& eval, RowId original_id_bound);

/// Stratified 75/25 split, scaler fit on train only, five fits on the
/// untouched imbalanced train, scored on the original test split.
ExperimentResult run_baseline(const ExperimentConfig& config);

/// 1:1 undersample of the full data, unstratified 75/25 split of the pool,
/// scored on both the balanced pool test and the original imbalanced test
/// (minus any pool-training rows, so nothing trained on is scored).
ExperimentResult run_undersampling(const ExperimentConfig& config);

/// Stratified split first, SMOTE on the training partition to 1:1, scored on
/// the untouched imbalanced test and on a SMOTE-balanced copy of the test
/// partition. The imbalanced-test report is the canonical one.
ExperimentResult run_smote(const ExperimentConfig& config);

/// Per model: ratio sweep (validation carve-out by default, test set under
/// paper_protocol), ratio selection, hybrid rebuild at the chosen ratio,
/// final fit, scored on the original test. Baseline fits included for the
/// side-by-side comparison.
ExperimentResult run_hybrid(const ExperimentConfig& config);

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& config);

} // namespace fraudlab
