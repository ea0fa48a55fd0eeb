#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fraudlab/config.hpp"
#include "fraudlab/error.hpp"
#include "fraudlab/experiments.hpp"
#include "fraudlab/report.hpp"

using namespace fraudlab;
namespace fs = std::filesystem;

namespace {

// A small, quick configuration shared by the experiment tests.
ExperimentConfig small_config() {
    ExperimentConfig config;
    SyntheticSpec spec;
    spec.n_majority = 1200;
    spec.n_minority = 36;
    spec.dimensions = 4;
    spec.class_separation = 3.5;
    spec.clusters_per_class = 2;
    spec.seed = 71;
    config.synthetic = spec;
    config.seed = 42;
    config.model_names = {"logreg", "gbt"};
    config.model_overrides = {ModelSpec::defaults(ModelFamily::logreg),
                              ModelSpec::defaults(ModelFamily::gbt)};
    std::get<LogRegHyper>(config.model_overrides[0].hyper).max_iters = 150;
    std::get<GbtHyper>(config.model_overrides[1].hyper).n_rounds = 15;
    config.sweep.ratios = {0.1, 0.3, 0.5};
    config.sweep.multiplier = 3.0;
    config.sweep.smote_k = 3;
    return config;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("leakage guards trip on corrupted inputs and stay quiet on clean ones") {
    const ExperimentConfig config = small_config();
    const Dataset ds = config.load_data();
    auto [train, test] = stratified_split(ds, 0.25, 5);

    SUBCASE("overlapping ids") {
        assert_disjoint_ids(train, test); // clean
        std::vector<std::size_t> first{0};
        Dataset corrupt = test;
        // rebuild test with one training row smuggled in
        Dataset smuggled(test.feature_names());
        smuggled.append_row(train.row(0), train.label(0), train.row_id(0));
        for (std::size_t i = 0; i < test.rows(); ++i)
            smuggled.append_row(test.row(i), test.label(i), test.row_id(i));
        CHECK_THROWS_AS(assert_disjoint_ids(train, smuggled), LeakageError);
    }

    SUBCASE("scaler fitted on the wrong partition") {
        const std::vector<std::size_t> no_columns;
        const ScalerParams good = fit_robust_scaler(train, no_columns);
        assert_scaler_from(good, train); // clean
        const ScalerParams bad = fit_robust_scaler(ds, no_columns); // full data: leaks
        CHECK_THROWS_AS(assert_scaler_from(bad, train), LeakageError);
    }

    SUBCASE("synthetic rows in an original-data evaluation") {
        assert_no_synthetic_rows(test, ds.fresh_id_base()); // clean
        const SmoteResult synth = smote(test, test.class_count(1) + 5, 3, 9);
        CHECK_THROWS_AS(assert_no_synthetic_rows(synth.data, ds.fresh_id_base()), LeakageError);
    }
}

TEST_CASE("baseline: reruns are byte-identical, reports carry provenance") {
    const ExperimentConfig config = small_config();
    const ExperimentResult a = run_baseline(config);
    const ExperimentResult b = run_baseline(config);
    REQUIRE(a.reports.size() == 2);
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
        CHECK(report_to_json(a.reports[i].report) == report_to_json(b.reports[i].report));
        CHECK(a.reports[i].eval_tag == "test");
        CHECK_FALSE(a.reports[i].report.model_desc.empty());
        CHECK_FALSE(a.reports[i].report.sampling_desc.empty());
    }
    CHECK(a.config_snapshot == b.config_snapshot);
}

TEST_CASE("undersample experiment: pool counts follow the rounding rules") {
    const ExperimentConfig config = small_config();
    const ExperimentResult result = run_undersampling(config);

    // pool = 36 + 36 rows; unstratified 25% split -> 18 test, 54 train
    const EvalReport* balanced = result.find("logreg", "balanced-test");
    REQUIRE(balanced != nullptr);
    CHECK(balanced->data.rows == 18);

    const EvalReport* imbalanced = result.find("logreg", "imbalanced-test");
    REQUIRE(imbalanced != nullptr);
    // master test: round(1200*0.25) + round(36*0.25) = 309 rows, minus overlap
    CHECK(imbalanced->data.rows <= 309);
    CHECK(imbalanced->data.rows >= 309 - 54);
    // both classes still present
    CHECK(imbalanced->data.fraud >= 1);
}

TEST_CASE("baseline on well-separated data beats the majority-class floor for every model") {
    ExperimentConfig config = small_config();
    config.synthetic->class_separation = 6.0;
    config.model_names = {"logreg", "forest", "gbt", "knn", "mlp"};
    config.model_overrides = {};
    for (const auto& name : config.model_names) {
        ModelSpec spec = ModelSpec::defaults(family_from_name(name));
        if (name == "forest") std::get<ForestHyper>(spec.hyper).n_trees = 15;
        if (name == "gbt") std::get<GbtHyper>(spec.hyper).n_rounds = 15;
        if (name == "mlp") {
            std::get<MlpHyper>(spec.hyper).epochs = 8;
            std::get<MlpHyper>(spec.hyper).batch_size = 64;
        }
        config.model_overrides.push_back(spec);
    }
    const ExperimentResult result = run_baseline(config);
    const double majority_prevalence = 1.0 - config.synthetic->n_minority /
        static_cast<double>(config.synthetic->n_minority + config.synthetic->n_majority);
    REQUIRE(result.reports.size() == 5);
    for (const auto& r : result.reports) {
        CHECK(r.report.class1.f1 > 0.0);
        CHECK(r.report.class1.accuracy > majority_prevalence);
    }
}

TEST_CASE("smote experiment: train reaches 1:1 and the canonical test stays untouched") {
    const ExperimentConfig config = small_config();
    const ExperimentResult result = run_smote(config);
    const EvalReport* imbalanced = result.find("gbt", "imbalanced-test");
    REQUIRE(imbalanced != nullptr);
    CHECK(imbalanced->data.rows == 309); // round(1200*.25)=300 + round(36*.25)=9
    CHECK(imbalanced->data.fraud == 9);
    const EvalReport* balanced = result.find("gbt", "balanced-test");
    REQUIRE(balanced != nullptr);
    CHECK(balanced->data.rows == 600); // 300 majority + smote to 300 minority
    CHECK(balanced->data.fraud == 300);

    // the balanced test flatters precision relative to the imbalanced one
    for (const char* model : {"logreg", "gbt"}) {
        const EvalReport* bal = result.find(model, "balanced-test");
        const EvalReport* imb = result.find(model, "imbalanced-test");
        REQUIRE(bal);
        REQUIRE(imb);
        CHECK(bal->class1.precision >= imb->class1.precision);
    }
}

TEST_CASE("hybrid experiment: sweeps, selection, and comparison reports") {
    ExperimentConfig config = small_config();
    const ExperimentResult result = run_hybrid(config);
    REQUIRE(result.sweeps.size() == 2);
    for (const auto& ms : result.sweeps) {
        CHECK(ms.selected_ratio > 0.0);
        CHECK(ms.selected_ratio <= 0.5);
        CHECK(ms.sweep.points.size() == 3);
        CHECK(result.find(ms.model, "baseline") != nullptr);
        CHECK(result.find(ms.model, "hybrid") != nullptr);
    }
}

TEST_CASE("hybrid paper protocol sweeps against the test set") {
    ExperimentConfig config = small_config();
    config.model_names = {"logreg"};
    config.model_overrides = {config.model_overrides[0]};
    const ExperimentResult leak_free = run_hybrid(config);
    config.sweep.paper_protocol = true;
    const ExperimentResult paper = run_hybrid(config);
    // both run to completion; the sweep curves differ because the eval set does
    REQUIRE(leak_free.sweeps.size() == 1);
    REQUIRE(paper.sweeps.size() == 1);
    bool any_difference = false;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = leak_free.sweeps[0].sweep.points[i];
        const auto& b = paper.sweeps[0].sweep.points[i];
        if (a.precision != b.precision || a.recall != b.recall) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("experiment dispatch rejects unknown names") {
    CHECK_THROWS_AS(run_experiment("bogus", small_config()), ValidationError);
}

TEST_CASE("config validation rejects conflicting or missing sources") {
    ExperimentConfig config = small_config();
    config.csv_path = "also.csv";
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config.csv_path.clear();
    config.synthetic.reset();
    CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("emit_reports writes the documented layout and a consistent manifest") {
    const ExperimentConfig config = small_config();
    const ExperimentResult result = run_baseline(config);
    const std::string dir = "/tmp/fraudlab_test_emit";
    fs::remove_all(dir);

    const auto files = emit_reports(
        result, {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown}, dir);
    CHECK(fs::exists(fs::path(dir) / "reports/baseline/logreg-test.json"));
    CHECK(fs::exists(fs::path(dir) / "reports/baseline/logreg-test.csv"));
    CHECK(fs::exists(fs::path(dir) / "reports/baseline/gbt-test.md"));
    CHECK(fs::exists(fs::path(dir) / "reports/baseline/summary-test.md"));
    CHECK(fs::exists(fs::path(dir) / "manifest.json"));

    // markdown column order is the paper's table layout
    const std::string md = slurp(fs::path(dir) / "reports/baseline/logreg-test.md");
    CHECK(md.find("| Model | Precision | Recall | F1-Score | Accuracy |") != std::string::npos);

    // identical rerun: identical manifest; any report change: different manifest
    const std::string manifest_a = slurp(fs::path(dir) / "manifest.json");
    emit_reports(result, {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown}, dir);
    CHECK(slurp(fs::path(dir) / "manifest.json") == manifest_a);

    ExperimentResult tweaked = result;
    tweaked.reports[0].report.threshold = 0.25; // content change
    emit_reports(tweaked, {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown}, dir);
    CHECK(slurp(fs::path(dir) / "manifest.json") != manifest_a);

    // empty format set: manifest only
    const std::string dir2 = "/tmp/fraudlab_test_emit_empty";
    fs::remove_all(dir2);
    const auto only_manifest = emit_reports(result, {}, dir2);
    CHECK(only_manifest.paths.empty());
    CHECK(fs::exists(fs::path(dir2) / "manifest.json"));
    CHECK_FALSE(fs::exists(fs::path(dir2) / "reports"));
}

TEST_CASE("hybrid emits sweep curves as csv and svg") {
    ExperimentConfig config = small_config();
    config.model_names = {"gbt"};
    config.model_overrides = {config.model_overrides[1]};
    const ExperimentResult result = run_hybrid(config);
    const std::string dir = "/tmp/fraudlab_test_emit_sweep";
    fs::remove_all(dir);
    emit_reports(result, formats_from_list("json,csv,markdown,svg"), dir);
    CHECK(fs::exists(fs::path(dir) / "sweeps/gbt.csv"));
    CHECK(fs::exists(fs::path(dir) / "sweeps/gbt.svg"));
    CHECK(fs::exists(fs::path(dir) / "reports/hybrid/comparison.md"));
    const std::string svg = slurp(fs::path(dir) / "sweeps/gbt.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    const std::string csv = slurp(fs::path(dir) / "sweeps/gbt.csv");
    CHECK(csv.rfind("ratio,precision,recall,f1,skipped_reason", 0) == 0);
}

TEST_CASE("ensure_writable_dir fails fast on bogus locations") {
    CHECK_THROWS(ensure_writable_dir("/proc/definitely/not/writable"));
    CHECK_THROWS_AS(ensure_writable_dir(""), ValidationError);
}
