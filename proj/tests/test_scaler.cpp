#include <doctest.h>

#include <cmath>

#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"
#include "fraudlab/scaler.hpp"
#include "helpers.hpp"

using namespace fraudlab;
using testutil::make_dataset;
using testutil::quantile_oracle;

TEST_CASE("robust scaler on [1,2,3,4,100]: median 3, IQR 2") {
    const Dataset ds = make_dataset({{1}, {2}, {3}, {4}, {100}}, {0, 0, 0, 0, 1});
    const std::vector<std::size_t> cols{0};
    const ScalerParams params = fit_robust_scaler(ds, cols);
    REQUIRE(params.columns.size() == 1);

    // oracle cross-check before the frozen values
    const std::vector<double> v{1, 2, 3, 4, 100};
    CHECK(params.columns[0].center == doctest::Approx(quantile_oracle(v, 0.5)));
    CHECK(params.columns[0].spread ==
          doctest::Approx(quantile_oracle(v, 0.75) - quantile_oracle(v, 0.25)));

    CHECK(params.columns[0].center == doctest::Approx(3.0));
    CHECK(params.columns[0].spread == doctest::Approx(2.0));
    CHECK_FALSE(params.columns[0].constant);
}

TEST_CASE("constant column: center 5, spread 0, flagged, scales to 0") {
    const Dataset ds = make_dataset({{5}, {5}, {5}}, {0, 0, 1});
    const std::vector<std::size_t> cols{0};
    const ScalerParams params = fit_robust_scaler(ds, cols);
    CHECK(params.columns[0].center == 5.0);
    CHECK(params.columns[0].spread == 0.0);
    CHECK(params.columns[0].constant);
    const Dataset scaled = apply_scaler(ds, params);
    for (std::size_t i = 0; i < scaled.rows(); ++i) CHECK(scaled.at(i, 0) == 0.0);
}

TEST_CASE("symmetric column centers at 0; x == center maps to 0") {
    const Dataset ds = make_dataset({{-1}, {0}, {1}}, {0, 0, 1});
    const std::vector<std::size_t> cols{0};
    const ScalerParams params = fit_robust_scaler(ds, cols);
    CHECK(params.columns[0].center == doctest::Approx(0.0));
    const Dataset scaled = apply_scaler(ds, params);
    CHECK(scaled.at(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("apply then invert reproduces inputs within 1e-9 relative error") {
    Rng rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (int i = 0; i < 40; ++i) {
            rows.push_back({rng.normal() * 100 + 50, rng.normal(), rng.uniform() * 1e4});
            labels.push_back(i % 5 == 0 ? 1 : 0);
        }
        const Dataset ds = make_dataset(rows, labels);
        const std::vector<std::size_t> cols{0, 1, 2};
        const ScalerParams params = fit_robust_scaler(ds, cols);
        const Dataset back = invert_scaler(apply_scaler(ds, params), params);
        for (std::size_t i = 0; i < ds.rows(); ++i)
            for (std::size_t j = 0; j < ds.cols(); ++j) {
                const double expected = ds.at(i, j);
                const double got = back.at(i, j);
                const double scale = std::max(1.0, std::abs(expected));
                CHECK(std::abs(got - expected) / scale <= 1e-9);
            }
    }
}

TEST_CASE("scaling leaves labels, ids, and unscaled columns alone") {
    const Dataset ds = make_dataset({{1, 10}, {2, 20}, {3, 30}, {4, 40}}, {0, 1, 0, 1});
    const std::vector<std::size_t> cols{0};
    const ScalerParams params = fit_robust_scaler(ds, cols);
    const Dataset scaled = apply_scaler(ds, params);
    CHECK(scaled.class_count(1) == ds.class_count(1));
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        CHECK(scaled.label(i) == ds.label(i));
        CHECK(scaled.row_id(i) == ds.row_id(i));
        CHECK(scaled.at(i, 1) == ds.at(i, 1));
    }
}

TEST_CASE("scaler fit is row-order invariant") {
    const Dataset a = make_dataset({{1}, {2}, {3}, {4}, {100}}, {0, 0, 0, 0, 1});
    Dataset b(a.feature_names());
    for (std::size_t i = a.rows(); i-- > 0;) {
        const auto r = a.row(i);
        b.append_row(r, a.label(i), a.row_id(i));
    }
    const std::vector<std::size_t> cols{0};
    const ScalerParams pa = fit_robust_scaler(a, cols);
    const ScalerParams pb = fit_robust_scaler(b, cols);
    CHECK(pa.columns[0].center == pb.columns[0].center);
    CHECK(pa.columns[0].spread == pb.columns[0].spread);
}

TEST_CASE("scaler errors: empty dataset, unknown column, column mismatch") {
    CHECK_THROWS_AS(fit_robust_scaler(Dataset({"f0"}), std::vector<std::size_t>{0}), ValidationError);
    const Dataset ds = make_dataset({{1}, {2}}, {0, 1});
    CHECK_THROWS_AS(fit_robust_scaler(ds, {"nope"}), ValidationError);
    const std::vector<std::size_t> cols{0};
    const ScalerParams params = fit_robust_scaler(ds, cols);
    const Dataset wider = make_dataset({{1, 2}, {3, 4}}, {0, 1});
    CHECK_THROWS_AS(apply_scaler(wider, params), ValidationError);
}
