#include <doctest.h>

#include <cmath>

#include "fraudlab/error.hpp"
#include "fraudlab/evaluate.hpp"
#include "fraudlab/models.hpp"
#include "fraudlab/rng.hpp"
#include "helpers.hpp"

using namespace fraudlab;
using testutil::make_dataset;

namespace {

Dataset blobs(std::size_t per_class, double separation, std::size_t dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int cls : {0, 1}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> row(dims);
            for (std::size_t j = 0; j < dims; ++j) row[j] = rng.normal() + (cls ? separation : 0.0);
            rows.push_back(std::move(row));
            labels.push_back(cls);
        }
    }
    return make_dataset(rows, labels);
}

double train_accuracy(const TrainedModel& model, const Dataset& ds) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) hits += (predict(model, ds.row(i)) == ds.label(i));
    return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

} // namespace

// ---- predict / predict_proba contract ----

TEST_CASE("logreg with all-zero coefficients says 0.5 everywhere") {
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::logreg);
    LogRegModel lr;
    lr.coefficients = {0.0, 0.0, 0.0};
    lr.intercept = 0.0;
    model.impl = lr;
    const std::vector<double> x{5.0, -3.0, 100.0};
    CHECK(predict_proba(model, x) == 0.5);
}

TEST_CASE("predict uses strict inequality at the threshold") {
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::logreg);
    LogRegModel lr;
    lr.coefficients = {0.0};
    lr.intercept = 0.0; // proba exactly 0.5
    model.impl = lr;
    const std::vector<double> x{1.0};
    CHECK(predict(model, x, 0.5) == 0); // 0.5 > 0.5 is false
    lr.intercept = 3.0; // proba ~= 0.95
    model.impl = lr;
    CHECK(predict(model, x, 0.5) == 1);
    CHECK(predict(model, x, 1.0) == 0); // nothing beats threshold 1
    CHECK_THROWS_AS(predict(model, x, 1.5), ValidationError);
    CHECK_THROWS_AS(predict(model, x, -0.1), ValidationError);
}

TEST_CASE("predict rejects dimension mismatches") {
    const Dataset ds = blobs(20, 4.0, 3, 1);
    const TrainedModel model = fit_model(ModelSpec::defaults(ModelFamily::logreg, 1), ds);
    const std::vector<double> wrong{1.0, 2.0};
    CHECK_THROWS_AS(predict_proba(model, wrong), ValidationError);
}

// ---- logistic regression ----

TEST_CASE("logreg separates 1-D separable data with l2 > 0") {
    const Dataset ds = make_dataset({{-3}, {-2.5}, {-2}, {-1.5}, {2}, {2.5}, {3}, {3.5}},
                                    {0, 0, 0, 0, 1, 1, 1, 1});
    LogRegHyper hyper;
    hyper.l2 = 1e-3;
    hyper.max_iters = 2000;
    const LogRegModel lr = logreg_fit(ds, hyper, 0);
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::logreg);
    model.impl = lr;
    CHECK(train_accuracy(model, ds) == 1.0);
}

TEST_CASE("logreg stops with gradient below tol and sets the convergence flag") {
    const Dataset ds = blobs(50, 2.0, 2, 3);
    LogRegHyper hyper;
    hyper.max_iters = 5000;
    hyper.tol = 1e-5;
    const LogRegModel lr = logreg_fit(ds, hyper, 0);
    CHECK(lr.converged);
    CHECK(lr.final_grad_norm <= hyper.tol);
}

TEST_CASE("logreg non-convergence is a flag, not an exception") {
    const Dataset ds = blobs(50, 2.0, 2, 4);
    LogRegHyper hyper;
    hyper.max_iters = 1;
    hyper.tol = 1e-12;
    const LogRegModel lr = logreg_fit(ds, hyper, 0);
    CHECK_FALSE(lr.converged);
}

TEST_CASE("logreg rejects single-class training data") {
    const Dataset ds = make_dataset({{1}, {2}, {3}}, {0, 0, 0});
    CHECK_THROWS_AS(logreg_fit(ds, LogRegHyper{}, 0), ValidationError);
}

TEST_CASE("logreg analytic gradient matches central finite differences") {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const Dataset ds = blobs(15, 1.0, 3, 5 + trial);
        const double l2 = 0.01;
        std::vector<double> beta{rng.normal(), rng.normal(), rng.normal()};
        const double intercept = rng.normal();

        std::vector<double> grad;
        double grad_intercept = 0.0;
        logreg_objective(ds, beta, intercept, l2, &grad, &grad_intercept);

        const double h = 1e-6;
        auto check_close = [](double numeric, double analytic) {
            CHECK(std::abs(numeric - analytic) / std::max(1.0, std::abs(analytic)) <= 1e-6);
        };
        for (std::size_t j = 0; j < 3; ++j) {
            auto plus = beta, minus = beta;
            plus[j] += h;
            minus[j] -= h;
            const double numeric = (logreg_objective(ds, plus, intercept, l2) -
                                    logreg_objective(ds, minus, intercept, l2)) / (2 * h);
            check_close(numeric, grad[j]);
        }
        const double numeric_b0 = (logreg_objective(ds, beta, intercept + h, l2) -
                                   logreg_objective(ds, beta, intercept - h, l2)) / (2 * h);
        check_close(numeric_b0, grad_intercept);
    }
}

// ---- random forest ----

TEST_CASE("forest of one tree without bootstrap equals a plain CART tree") {
    const Dataset ds = blobs(40, 3.0, 2, 9);
    ForestHyper hyper;
    hyper.n_trees = 1;
    hyper.bootstrap = false;
    hyper.max_depth = 10;
    hyper.features_per_split = 2; // all features
    const ForestModel forest = forest_fit(ds, hyper, 42);
    REQUIRE(forest.trees.size() == 1);

    // grow the same CART tree directly and compare predictions
    GiniGrowth growth;
    growth.max_depth = 10;
    growth.min_leaf = 1;
    growth.features_per_split = 2;
    std::vector<std::uint32_t> all(ds.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    Rng rng(derive_seed(42, "forest/tree", 0));
    const Tree cart = grow_gini_tree(ds, all, growth, rng);
    for (std::size_t i = 0; i < ds.rows(); ++i)
        CHECK(forest.predict_one(ds.row(i)) == cart.predict(ds.row(i)));
}

TEST_CASE("pure nodes become leaves without splits") {
    const Dataset ds = make_dataset({{1}, {2}, {3}}, {1, 1, 1});
    Rng rng(1);
    const std::vector<std::uint32_t> samples{0, 1, 2};
    const Tree tree = grow_gini_tree(ds, samples, GiniGrowth{}, rng);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].leaf());
    CHECK(tree.nodes[0].value == 1.0);
}

TEST_CASE("forest prediction is the arithmetic mean of its trees") {
    const Dataset ds = blobs(60, 2.0, 3, 10);
    ForestHyper hyper;
    hyper.n_trees = 11;
    hyper.max_depth = 6;
    const ForestModel forest = forest_fit(ds, hyper, 7, 2);
    Rng rng(5);
    for (int q = 0; q < 20; ++q) {
        const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
        double sum = 0.0;
        for (const auto& tree : forest.trees) sum += tree.predict(x);
        CHECK(std::abs(forest.predict_one(x) - sum / 11.0) <= 1e-12);
    }
}

TEST_CASE("forest fits are deterministic under seed, serial or parallel") {
    const Dataset ds = blobs(50, 2.0, 3, 11);
    ForestHyper hyper;
    hyper.n_trees = 8;
    const ForestModel a = forest_fit(ds, hyper, 13, 1);
    const ForestModel b = forest_fit(ds, hyper, 13, 4);
    REQUIRE(a.trees.size() == b.trees.size());
    Rng rng(6);
    for (int q = 0; q < 30; ++q) {
        const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
        CHECK(a.predict_one(x) == b.predict_one(x));
    }
}

// ---- gradient-boosted trees ----

TEST_CASE("gbt with zero rounds predicts the training prevalence") {
    const Dataset ds = blobs(32, 1.0, 2, 12); // prevalence 0.5
    GbtHyper hyper;
    hyper.n_rounds = 0;
    const GbtModel gbt = gbt_fit(ds, hyper, 0);
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::gbt);
    model.impl = gbt;
    Rng rng(7);
    const std::vector<double> x{rng.normal(), rng.normal()};
    CHECK(std::abs(predict_proba(model, x) - 0.5) <= 1e-12);

    // skewed prevalence too
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    Rng gen(14);
    for (int i = 0; i < 40; ++i) {
        rows.push_back({gen.normal(), gen.normal()});
        labels.push_back(i < 10 ? 1 : 0);
    }
    const Dataset skewed = make_dataset(rows, labels);
    const GbtModel gbt2 = gbt_fit(skewed, hyper, 0);
    model.impl = gbt2;
    CHECK(std::abs(predict_proba(model, x) - 0.25) <= 1e-12);
}

TEST_CASE("gbt with huge lambda collapses to the base score") {
    const Dataset ds = blobs(30, 3.0, 2, 15);
    GbtHyper hyper;
    hyper.n_rounds = 5;
    hyper.lambda_l2 = 1e12;
    const GbtModel gbt = gbt_fit(ds, hyper, 0);
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::gbt);
    model.impl = gbt;
    const std::vector<double> x{0.0, 0.0};
    CHECK(std::abs(predict_proba(model, x) - 0.5) <= 1e-6);
}

TEST_CASE("gbt one round, depth 1, 4-point 1-D set matches the hand computation") {
    // x = [0,1,2,3], y = [0,0,1,1]; base = logit(0.5) = 0 so p = 0.5, g = p-y,
    // h = 0.25 for every row. Best split at 1.5: GL = 1, HL = 0.5.
    // Leaf values: -G/(H+lambda) with lambda = 1 -> left -1/1.5, right +1/1.5.
    const Dataset ds = make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 1, 1});
    GbtHyper hyper;
    hyper.n_rounds = 1;
    hyper.max_depth = 1;
    hyper.lambda_l2 = 1.0;
    hyper.min_child_weight = 0.0;
    const GbtModel gbt = gbt_fit(ds, hyper, 0);
    REQUIRE(gbt.trees.size() == 1);
    const Tree& tree = gbt.trees[0];
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == doctest::Approx(1.5));
    const double expected = 1.0 / 1.5;
    CHECK(tree.predict(std::vector<double>{0.0}) == doctest::Approx(-expected));
    CHECK(tree.predict(std::vector<double>{3.0}) == doctest::Approx(expected));

    // brute-force check that 1.5 beats the other two candidate thresholds
    auto gain_at = [&](double gl, double hl, double g, double h, double lambda) {
        const double gr = g - gl, hr = h - hl;
        return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda));
    };
    const double split_05 = gain_at(0.5, 0.25, 0.0, 1.0, 1.0);
    const double split_15 = gain_at(1.0, 0.5, 0.0, 1.0, 1.0);
    const double split_25 = gain_at(0.5, 0.75, 0.0, 1.0, 1.0);
    CHECK(split_15 > split_05);
    CHECK(split_15 > split_25);
}

TEST_CASE("gbt training loss never increases") {
    const Dataset ds = blobs(100, 1.5, 3, 16);
    GbtHyper hyper;
    hyper.n_rounds = 40;
    const GbtModel gbt = gbt_fit(ds, hyper, 0, 2);
    REQUIRE(gbt.train_loss.size() == 41);
    for (std::size_t i = 1; i < gbt.train_loss.size(); ++i)
        CHECK(gbt.train_loss[i] <= gbt.train_loss[i - 1] + 1e-12);
}

// ---- knn ----

TEST_CASE("knn with k = n returns the global class-1 fraction") {
    const Dataset ds = blobs(10, 5.0, 2, 17);
    const KnnModel knn = knn_fit(ds, ds.rows());
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::knn);
    model.impl = knn;
    const std::vector<double> x{100.0, -42.0};
    CHECK(predict_proba(model, x) == 0.5);
}

TEST_CASE("knn at a training point with k = 1 returns that point's label") {
    const Dataset ds = make_dataset({{0, 0}, {5, 5}, {9, 9}}, {0, 1, 0});
    const KnnModel knn = knn_fit(ds, 1);
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::knn);
    model.impl = knn;
    CHECK(predict_proba(model, std::vector<double>{5.0, 5.0}) == 1.0);
    CHECK(predict_proba(model, std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("knn vote fraction: neighbors {1,1,1,0,0} give 0.6") {
    const Dataset ds = make_dataset(
        {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1.5, 0}, {50, 50}, {60, 60}}, {1, 1, 1, 0, 0, 0, 0});
    const KnnModel knn = knn_fit(ds, 5);
    TrainedModel model;
    model.spec = ModelSpec::defaults(ModelFamily::knn);
    model.impl = knn;
    CHECK(predict_proba(model, std::vector<double>{0.0, 0.0}) == doctest::Approx(0.6));
}

TEST_CASE("knn matches the exhaustive-sort oracle on random queries, ties included") {
    // integer grid coordinates force plenty of exact distance ties
    Rng rng(18);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 150; ++i) {
        rows.push_back({static_cast<double>(rng.uniform_below(5)),
                        static_cast<double>(rng.uniform_below(5))});
        labels.push_back(static_cast<int>(rng.uniform_below(2)));
    }
    const Dataset ds = make_dataset(rows, labels);
    for (std::size_t k : {1ULL, 3ULL, 5ULL, 11ULL}) {
        const KnnModel knn = knn_fit(ds, k);
        TrainedModel model;
        model.spec = ModelSpec::defaults(ModelFamily::knn);
        model.impl = knn;
        for (int q = 0; q < 100; ++q) {
            const std::vector<double> x{static_cast<double>(rng.uniform_below(5)),
                                        static_cast<double>(rng.uniform_below(5))};
            CHECK(predict_proba(model, x) == testutil::knn_oracle(ds, x, k));
        }
    }
}

TEST_CASE("knn rejects invalid k") {
    const Dataset ds = blobs(5, 1.0, 2, 19);
    CHECK_THROWS_AS(knn_fit(ds, 0), ValidationError);
    CHECK_THROWS_AS(knn_fit(ds, ds.rows() + 1), ValidationError);
}

// ---- unified contract ----

TEST_CASE("all families produce probabilities in [0,1]; the smooth ones stay inside (0,1)") {
    const Dataset ds = blobs(30, 3.0, 3, 20);
    Rng rng(21);
    for (auto family : {ModelFamily::logreg, ModelFamily::forest, ModelFamily::gbt, ModelFamily::knn,
                        ModelFamily::mlp}) {
        ModelSpec spec = ModelSpec::defaults(family, 3);
        if (family == ModelFamily::forest) std::get<ForestHyper>(spec.hyper).n_trees = 10;
        if (family == ModelFamily::gbt) std::get<GbtHyper>(spec.hyper).n_rounds = 10;
        if (family == ModelFamily::mlp) {
            std::get<MlpHyper>(spec.hyper).epochs = 2;
            std::get<MlpHyper>(spec.hyper).batch_size = 16;
        }
        const TrainedModel model = fit_model(spec, ds, 2);
        for (int q = 0; q < 25; ++q) {
            const std::vector<double> x{rng.normal() * 3, rng.normal() * 3, rng.normal() * 3};
            const double p = predict_proba(model, x);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            if (family == ModelFamily::logreg || family == ModelFamily::gbt ||
                family == ModelFamily::mlp) {
                CHECK(p > 0.0);
                CHECK(p < 1.0);
            }
        }
    }
}

TEST_CASE("model JSON round-trips with identical predictions") {
    const Dataset ds = blobs(25, 2.5, 3, 22);
    Rng rng(23);
    for (auto family : {ModelFamily::logreg, ModelFamily::forest, ModelFamily::gbt, ModelFamily::knn,
                        ModelFamily::mlp}) {
        ModelSpec spec = ModelSpec::defaults(family, 4);
        if (family == ModelFamily::forest) std::get<ForestHyper>(spec.hyper).n_trees = 5;
        if (family == ModelFamily::gbt) std::get<GbtHyper>(spec.hyper).n_rounds = 5;
        if (family == ModelFamily::mlp) {
            std::get<MlpHyper>(spec.hyper).epochs = 1;
            std::get<MlpHyper>(spec.hyper).batch_size = 8;
        }
        const TrainedModel model = fit_model(spec, ds);
        const TrainedModel back = model_from_json(model_to_json(model));
        for (int q = 0; q < 10; ++q) {
            const std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
            CHECK(predict_proba(model, x) == predict_proba(back, x));
        }
    }
}

TEST_CASE("same seed, same model; different seed, different forest") {
    const Dataset ds = blobs(40, 2.0, 2, 24);
    ModelSpec spec = ModelSpec::defaults(ModelFamily::forest, 9);
    std::get<ForestHyper>(spec.hyper).n_trees = 6;
    const std::string a = model_to_json(fit_model(spec, ds));
    const std::string b = model_to_json(fit_model(spec, ds));
    CHECK(a == b);
    spec.seed = 10;
    const std::string c = model_to_json(fit_model(spec, ds));
    CHECK(a != c);
}

TEST_CASE("evaluate: perfect predictor scores 1.0 everywhere and reports are pure") {
    const Dataset ds = blobs(30, 12.0, 2, 25); // far apart
    const TrainedModel model = fit_model(ModelSpec::defaults(ModelFamily::knn, 0), ds);
    const EvalReport a = evaluate(model, ds, 0.5, 1);
    CHECK(a.class1.precision == 1.0);
    CHECK(a.class1.recall == 1.0);
    CHECK(a.class1.f1 == 1.0);
    CHECK(a.class1.accuracy == 1.0);
    const EvalReport b = evaluate(model, ds, 0.5, 4);
    CHECK(a.cm.tp == b.cm.tp);
    CHECK(a.data.content_hash == b.data.content_hash);
}

TEST_CASE("evaluate fingerprint reacts to any row change") {
    const Dataset ds = blobs(10, 3.0, 2, 26);
    const TrainedModel model = fit_model(ModelSpec::defaults(ModelFamily::knn, 0), ds);
    const EvalReport a = evaluate(model, ds);
    Dataset tweaked(ds.feature_names());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::vector<double> row(ds.row(i).begin(), ds.row(i).end());
        if (i == 3) row[0] += 1e-9;
        tweaked.append_row(row, ds.label(i), ds.row_id(i));
    }
    const EvalReport b = evaluate(model, tweaked);
    CHECK(a.data.content_hash != b.data.content_hash);
}
