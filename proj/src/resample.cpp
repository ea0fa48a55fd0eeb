#include "fraudlab/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

void ResamplePlan::validate() const {
    if (smote_k < 1) throw ValidationError("plan: smote_k must be >= 1");
    switch (kind) {
    case PlanKind::undersample:
        if (target_majority == 0) throw ValidationError("plan: undersample needs target_majority > 0");
        break;
    case PlanKind::smote:
        if (target_minority == 0) throw ValidationError("plan: smote needs target_minority > 0");
        break;
    case PlanKind::hybrid:
        if (!(fraud_ratio > 0.0 && fraud_ratio <= 0.5))
            throw ValidationError("plan: fraud_ratio must be in (0, 0.5]");
        if (!(minority_multiplier >= 1.0))
            throw ValidationError("plan: minority_multiplier must be >= 1");
        break;
    }
}

std::string ResamplePlan::describe() const {
    switch (kind) {
    case PlanKind::undersample:
        return "undersample(target_majority=" + std::to_string(target_majority) +
               ", seed=" + std::to_string(seed) + ")";
    case PlanKind::smote:
        return "smote(target_minority=" + std::to_string(target_minority) +
               ", k=" + std::to_string(smote_k) + ", seed=" + std::to_string(seed) + ")";
    case PlanKind::hybrid:
        return "hybrid(fraud_ratio=" + std::to_string(fraud_ratio) +
               ", multiplier=" + std::to_string(minority_multiplier) +
               ", k=" + std::to_string(smote_k) + ", seed=" + std::to_string(seed) + ")";
    }
    return "?";
}

Dataset undersample(const Dataset& ds, std::size_t target_majority, std::uint64_t seed) {
    auto majority = ds.class_indices(0);
    if (target_majority > majority.size())
        throw InfeasiblePlanError("undersample: target " + std::to_string(target_majority) +
                                  " exceeds the " + std::to_string(majority.size()) +
                                  " majority rows available");
    Rng rng(derive_seed(seed, "undersample"));
    rng.shuffle(majority);
    majority.resize(target_majority);

    auto keep = ds.class_indices(1);
    keep.insert(keep.end(), majority.begin(), majority.end());
    std::sort(keep.begin(), keep.end());
    return ds.select(keep);
}

namespace {

// k nearest minority neighbors per minority row, exact brute force.
// Ties broken toward smaller row id so results are order-independent.
std::vector<std::vector<std::size_t>> minority_knn(const Dataset& ds,
                                                   const std::vector<std::size_t>& minority,
                                                   std::size_t k) {
    const std::size_t m = minority.size();
    std::vector<std::vector<std::size_t>> neighbors(m);
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto xa = ds.row(minority[a]);
        for (std::size_t b = 0; b < m; ++b) {
            double d2 = 0.0;
            const auto xb = ds.row(minority[b]);
            for (std::size_t j = 0; j < xa.size(); ++j) {
                const double diff = xa[j] - xb[j];
                d2 += diff * diff;
            }
            dist[b] = {a == b ? std::numeric_limits<double>::infinity() : d2, b};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end(),
                          [&](const auto& l, const auto& r) {
                              if (l.first != r.first) return l.first < r.first;
                              return ds.row_id(minority[l.second]) < ds.row_id(minority[r.second]);
                          });
        neighbors[a].reserve(k);
        for (std::size_t i = 0; i < k; ++i) neighbors[a].push_back(dist[i].second);
    }
    return neighbors;
}

} // namespace

SmoteResult smote(const Dataset& ds, std::size_t target_minority, std::size_t k, std::uint64_t seed) {
    const auto minority = ds.class_indices(1);
    const std::size_t m = minority.size();
    if (m < 2) throw ValidationError("smote: need at least 2 minority rows, have " + std::to_string(m));
    if (k < 1 || k > m - 1)
        throw ValidationError("smote: k must be in [1, " + std::to_string(m - 1) + "], got " +
                              std::to_string(k));
    if (target_minority < m)
        throw ValidationError("smote: target_minority " + std::to_string(target_minority) +
                              " is below the current minority count " + std::to_string(m));

    SmoteResult result;
    std::vector<std::size_t> all(ds.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    result.data = ds.select(all);

    const std::size_t n_new = target_minority - m;
    if (n_new == 0) return result;

    const auto neighbors = minority_knn(ds, minority, k);

    Rng rng(derive_seed(seed, "smote"));
    std::vector<std::size_t> base_order(m);
    for (std::size_t i = 0; i < m; ++i) base_order[i] = i;
    rng.shuffle(base_order);

    RowId next_id = ds.fresh_id_base();
    std::vector<double> buf(ds.cols());
    result.origins.reserve(n_new);
    for (std::size_t t = 0; t < n_new; ++t) {
        const std::size_t base = base_order[t % m];
        const std::size_t nn = neighbors[base][rng.uniform_below(k)];
        const double u = rng.uniform();
        const auto xb = ds.row(minority[base]);
        const auto xn = ds.row(minority[nn]);
        for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = xb[j] + u * (xn[j] - xb[j]);
        result.data.append_row(buf, 1, next_id);
        result.origins.push_back({next_id, ds.row_id(minority[base]), ds.row_id(minority[nn]), u});
        ++next_id;
    }
    return result;
}

Dataset hybrid_resample(const Dataset& ds, double fraud_ratio, double minority_multiplier,
                        std::size_t smote_k, std::uint64_t seed) {
    if (!(fraud_ratio > 0.0 && fraud_ratio <= 0.5))
        throw ValidationError("hybrid: fraud_ratio must be in (0, 0.5]");
    if (!(minority_multiplier >= 1.0)) throw ValidationError("hybrid: minority_multiplier must be >= 1");

    const std::size_t minority_count = ds.class_count(1);
    const std::size_t majority_count = ds.class_count(0);
    const auto minority_target = static_cast<std::size_t>(
        std::llround(minority_multiplier * static_cast<double>(minority_count)));
    const auto majority_target = static_cast<std::size_t>(std::llround(
        static_cast<double>(minority_target) * (1.0 - fraud_ratio) / fraud_ratio));
    if (majority_target > majority_count)
        throw InfeasiblePlanError(
            "hybrid: ratio " + std::to_string(fraud_ratio) + " with multiplier " +
            std::to_string(minority_multiplier) + " needs " + std::to_string(majority_target) +
            " majority rows but only " + std::to_string(majority_count) +
            " exist; lower the multiplier or raise the ratio");

    // SMOTE first, then undersample, per the two-step procedure.
    auto oversampled = smote(ds, minority_target, smote_k, derive_seed(seed, "hybrid/smote")).data;
    return undersample(oversampled, majority_target, derive_seed(seed, "hybrid/under"));
}

Dataset apply_plan(const Dataset& ds, const ResamplePlan& plan) {
    plan.validate();
    switch (plan.kind) {
    case PlanKind::undersample:
        return undersample(ds, plan.target_majority, plan.seed);
    case PlanKind::smote:
        return smote(ds, plan.target_minority, plan.smote_k, plan.seed).data;
    case PlanKind::hybrid:
        return hybrid_resample(ds, plan.fraud_ratio, plan.minority_multiplier, plan.smote_k, plan.seed);
    }
    throw ValidationError("plan: unknown kind");
}

} // namespace fraudlab
