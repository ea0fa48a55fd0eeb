#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudlab/dataset.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

/// Binary decision tree node. feature < 0 marks a leaf; `value` is a class-1
/// fraction for forest trees and an additive log-odds contribution for
/// boosted trees. Rows with x[feature] < threshold go left.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
    bool leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const {
        std::int32_t i = 0;
        while (!nodes[i].leaf()) i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
    int depth() const;
};

struct GiniGrowth {
    int max_depth = 12;
    std::size_t min_leaf = 1;          // minimum samples (with multiplicity) per child
    std::size_t features_per_split = 0; // 0 = all features
};

/// Greedy CART on Gini impurity. `samples` are row indices with repetition
/// (a bootstrap multiset). Leaves store the class-1 fraction of their rows.
/// Pure nodes stop splitting. The rng drives per-node feature subsets.
Tree grow_gini_tree(const Dataset& ds, std::span<const std::uint32_t> samples,
                    const GiniGrowth& cfg, Rng& rng);

struct XgbGrowth {
    int max_depth = 3;
    double lambda_l2 = 1.0;
    double min_child_weight = 1.0;
};

/// Second-order regression tree: leaf value -G/(H+lambda), split gain
/// (1/2)[GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)]. Splits with non-positive
/// gain are not taken. Split search parallelizes across features with a
/// deterministic reduction, so results match serial execution.
Tree grow_xgb_tree(const Dataset& ds, std::span<const double> grad, std::span<const double> hess,
                   const XgbGrowth& cfg, int threads);

} // namespace fraudlab
