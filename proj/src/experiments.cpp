#include "fraudlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "fraudlab/config.hpp"
#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

std::vector<double> SweepSettings::resolved_ratios() const {
    if (!ratios.empty()) return ratios;
    return log_spaced_ratios(0.01, 0.5, 20);
}

void ExperimentConfig::validate() const {
    if (!csv_path.empty() && synthetic)
        throw ValidationError("config: both csv and synthetic sources given; pick one");
    if (csv_path.empty() && !synthetic)
        throw ValidationError("config: no data source (set csv path or synthetic spec)");
    if (csv_schema != "ulb" && csv_schema != "any")
        throw ValidationError("config: schema must be 'ulb' or 'any'");
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw ValidationError("config: split fraction must be in (0,1)");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ValidationError("config: threshold must be in [0,1]");
    for (double r : sweep.resolved_ratios())
        if (!(r > 0.0 && r <= 0.5))
            throw ValidationError("config: sweep ratio " + std::to_string(r) + " outside (0, 0.5]");
    if (synthetic) synthetic->validate();
}

Dataset ExperimentConfig::load_data() const {
    validate();
    Dataset ds;
    if (synthetic) ds = generate_synthetic(*synthetic);
    else if (csv_schema == "any") ds = load_csv(csv_path);
    else ds = load_csv(csv_path, ulb_schema());
    ds.validate();
    return ds;
}

std::vector<ModelSpec> ExperimentConfig::resolved_models() const {
    std::vector<ModelSpec> specs = model_overrides;
    if (specs.empty()) {
        std::vector<std::string> names = model_names;
        if (names.empty()) names = {"logreg", "forest", "gbt", "knn", "mlp"};
        for (const auto& name : names) specs.push_back(ModelSpec::defaults(family_from_name(name)));
    }
    // Seeds fan out from the master seed here, at use time, so config section
    // order cannot change them. An explicit nonzero spec seed is honored.
    for (auto& spec : specs)
        if (spec.seed == 0) spec.seed = derive_seed(seed, "model/" + family_name(spec.family));
    return specs;
}

const EvalReport* ExperimentResult::find(const std::string& model, const std::string& tag) const {
    for (const auto& r : reports)
        if (r.model == model && r.eval_tag == tag) return &r.report;
    return nullptr;
}

void assert_disjoint_ids(const Dataset& train, const Dataset& eval) {
    std::unordered_set<RowId> train_ids;
    train_ids.reserve(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) train_ids.insert(train.row_id(i));
    for (std::size_t i = 0; i < eval.rows(); ++i)
        if (train_ids.count(eval.row_id(i)))
            throw LeakageError("leakage: training row " + std::to_string(eval.row_id(i)) +
                               " appears in an evaluation set");
}

void assert_scaler_from(const ScalerParams& scaler, const Dataset& train) {
    if (scaler.fitted_on != train.fingerprint())
        throw LeakageError("leakage: scaler was not fitted on the training partition");
}

void assert_no_synthetic_rows(const Dataset& eval, RowId original_id_bound) {
    for (std::size_t i = 0; i < eval.rows(); ++i)
        if (eval.row_id(i) >= original_id_bound)
            throw LeakageError("leakage: synthetic row " + std::to_string(eval.row_id(i)) +
                               " appears in an original-data evaluation set");
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::vector<std::string> present_scale_columns(const ExperimentConfig& config, const Dataset& ds) {
    std::vector<std::string> cols;
    for (const auto& name : config.scale_columns)
        if (ds.column_index(name)) cols.push_back(name);
    return cols;
}

Dataset drop_ids(const Dataset& ds, const std::unordered_set<RowId>& banned) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (!banned.count(ds.row_id(i))) keep.push_back(i);
    return ds.select(keep);
}

} // namespace

ExperimentResult run_baseline(const ExperimentConfig& config) {
    Timer timer;
    ExperimentResult result;
    result.experiment = "baseline";
    result.config_snapshot = serialize_config(config);

    const Dataset ds = config.load_data();
    const RowId original_bound = ds.fresh_id_base();
    auto [train, test] = stratified_split(ds, config.split_fraction, derive_seed(config.seed, "split"));

    const ScalerParams scaler = fit_robust_scaler(train, present_scale_columns(config, train));
    assert_scaler_from(scaler, train);
    const Dataset train_s = apply_scaler(train, scaler);
    const Dataset test_s = apply_scaler(test, scaler);
    assert_disjoint_ids(train_s, test_s);
    assert_no_synthetic_rows(test_s, original_bound);

    const std::string sampling_desc = "baseline: stratified split " +
                                      std::to_string(config.split_fraction) + ", no resampling";
    for (const auto& spec : config.resolved_models()) {
        const TrainedModel model = fit_model(spec, train_s, config.threads);
        EvalReport report = evaluate(model, test_s, config.threshold, config.threads, sampling_desc);
        result.reports.push_back({family_name(spec.family), "test", std::move(report)});
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_undersampling(const ExperimentConfig& config) {
    Timer timer;
    ExperimentResult result;
    result.experiment = "undersample";
    result.config_snapshot = serialize_config(config);

    const Dataset ds = config.load_data();
    const RowId original_bound = ds.fresh_id_base();
    auto [master_train, master_test] =
        stratified_split(ds, config.split_fraction, derive_seed(config.seed, "split"));

    // 1:1 pool drawn from the full data, then an unstratified split of the pool.
    const std::size_t minority = ds.class_count(1);
    const Dataset pool = undersample(ds, minority, derive_seed(config.seed, "under"));
    auto [pool_train, pool_test] =
        random_split(pool, config.split_fraction, derive_seed(config.seed, "pool_split"));

    const ScalerParams scaler = fit_robust_scaler(pool_train, present_scale_columns(config, pool_train));
    assert_scaler_from(scaler, pool_train);
    const Dataset pool_train_s = apply_scaler(pool_train, scaler);
    const Dataset pool_test_s = apply_scaler(pool_test, scaler);

    // The imbalanced evaluation reuses the master test split with any
    // pool-training rows removed, so nothing trained on is ever scored.
    std::unordered_set<RowId> trained_ids;
    for (std::size_t i = 0; i < pool_train.rows(); ++i) trained_ids.insert(pool_train.row_id(i));
    const Dataset imbalanced_eval = apply_scaler(drop_ids(master_test, trained_ids), scaler);

    assert_disjoint_ids(pool_train_s, pool_test_s);
    assert_disjoint_ids(pool_train_s, imbalanced_eval);
    assert_no_synthetic_rows(imbalanced_eval, original_bound);

    const std::string pool_desc = "undersample(target_majority=" + std::to_string(minority) +
                                  ") of full data, unstratified pool split " +
                                  std::to_string(config.split_fraction);
    for (const auto& spec : config.resolved_models()) {
        const TrainedModel model = fit_model(spec, pool_train_s, config.threads);
        EvalReport balanced =
            evaluate(model, pool_test_s, config.threshold, config.threads, pool_desc + "; balanced pool test");
        EvalReport imbalanced = evaluate(model, imbalanced_eval, config.threshold, config.threads,
                                         pool_desc + "; original imbalanced test minus pool-train rows");
        result.reports.push_back({family_name(spec.family), "balanced-test", std::move(balanced)});
        result.reports.push_back({family_name(spec.family), "imbalanced-test", std::move(imbalanced)});
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_smote(const ExperimentConfig& config) {
    Timer timer;
    ExperimentResult result;
    result.experiment = "smote";
    result.config_snapshot = serialize_config(config);

    const Dataset ds = config.load_data();
    const RowId original_bound = ds.fresh_id_base();
    auto [train, test] = stratified_split(ds, config.split_fraction, derive_seed(config.seed, "split"));

    const ScalerParams scaler = fit_robust_scaler(train, present_scale_columns(config, train));
    assert_scaler_from(scaler, train);
    const Dataset train_s = apply_scaler(train, scaler);
    const Dataset test_s = apply_scaler(test, scaler);

    const std::size_t k = config.sampling.smote_k;
    const Dataset smote_train =
        smote(train_s, train_s.class_count(0), k, derive_seed(config.seed, "smote/train")).data;

    // Balanced test: SMOTE applied to the held-out partition alone. Shift its
    // fresh-id space past the training synthetics so ids stay globally unique.
    Dataset test_pre = test_s;
    test_pre.set_fresh_id_base(smote_train.fresh_id_base());
    const Dataset balanced_test =
        smote(test_pre, test_pre.class_count(0), k, derive_seed(config.seed, "smote/test")).data;

    assert_disjoint_ids(smote_train, test_s);
    assert_disjoint_ids(smote_train, balanced_test);
    assert_no_synthetic_rows(test_s, original_bound);

    const std::string desc = "smote train to 1:1 (k=" + std::to_string(k) + ") after stratified split";
    for (const auto& spec : config.resolved_models()) {
        const TrainedModel model = fit_model(spec, smote_train, config.threads);
        EvalReport imbalanced = evaluate(model, test_s, config.threshold, config.threads,
                                         desc + "; original imbalanced test");
        EvalReport balanced = evaluate(model, balanced_test, config.threshold, config.threads,
                                       desc + "; smote-balanced test partition");
        result.reports.push_back({family_name(spec.family), "imbalanced-test", std::move(imbalanced)});
        result.reports.push_back({family_name(spec.family), "balanced-test", std::move(balanced)});
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_hybrid(const ExperimentConfig& config) {
    Timer timer;
    ExperimentResult result;
    result.experiment = "hybrid";
    result.config_snapshot = serialize_config(config);

    const Dataset ds = config.load_data();
    const RowId original_bound = ds.fresh_id_base();
    auto [train, test] = stratified_split(ds, config.split_fraction, derive_seed(config.seed, "split"));

    const ScalerParams scaler = fit_robust_scaler(train, present_scale_columns(config, train));
    assert_scaler_from(scaler, train);
    const Dataset train_s = apply_scaler(train, scaler);
    const Dataset test_s = apply_scaler(test, scaler);
    assert_disjoint_ids(train_s, test_s);
    assert_no_synthetic_rows(test_s, original_bound);

    // Sweep protocol: leak-free default scores each ratio on a validation
    // carve-out; the paper's own protocol scores on the test set.
    Dataset sweep_train = train_s, sweep_eval = test_s;
    if (!config.sweep.paper_protocol) {
        auto parts = stratified_split(train_s, config.sweep.validation_fraction,
                                      derive_seed(config.seed, "sweep/val"));
        sweep_train = std::move(parts.first);
        sweep_eval = std::move(parts.second);
    }
    assert_disjoint_ids(sweep_train, sweep_eval);

    const auto ratios = config.sweep.resolved_ratios();
    for (const auto& spec : config.resolved_models()) {
        const std::string name = family_name(spec.family);

        const TrainedModel baseline_model = fit_model(spec, train_s, config.threads);
        EvalReport baseline = evaluate(baseline_model, test_s, config.threshold, config.threads,
                                       "baseline: no resampling");
        result.reports.push_back({name, "baseline", std::move(baseline)});

        ModelSweep ms;
        ms.model = name;
        ms.sweep = ratio_sweep(sweep_train, ratios, spec, sweep_eval, config.sweep.multiplier,
                               config.sweep.smote_k, derive_seed(config.seed, "sweep/" + name),
                               config.threads, config.threshold);
        ms.selected_ratio = select_ratio(ms.sweep, config.sweep.criterion, config.sweep.precision_floor);

        const Dataset hybrid_train =
            hybrid_resample(train_s, ms.selected_ratio, config.sweep.multiplier, config.sweep.smote_k,
                            derive_seed(config.seed, "hybrid/" + name));
        assert_disjoint_ids(hybrid_train, test_s);
        const TrainedModel final_model = fit_model(spec, hybrid_train, config.threads);
        EvalReport hybrid_report =
            evaluate(final_model, test_s, config.threshold, config.threads,
                     "hybrid(ratio=" + std::to_string(ms.selected_ratio) + ", multiplier=" +
                         std::to_string(config.sweep.multiplier) + ", k=" +
                         std::to_string(config.sweep.smote_k) + ") selected by " +
                         criterion_name(config.sweep.criterion));
        result.reports.push_back({name, "hybrid", std::move(hybrid_report)});
        result.sweeps.push_back(std::move(ms));
    }
    result.wall_seconds = timer.seconds();
    return result;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& config) {
    if (name == "baseline") return run_baseline(config);
    if (name == "undersample") return run_undersampling(config);
    if (name == "smote") return run_smote(config);
    if (name == "hybrid") return run_hybrid(config);
    throw ValidationError("unknown experiment '" + name +
                          "' (expected baseline|undersample|smote|hybrid)");
}

} // namespace fraudlab
