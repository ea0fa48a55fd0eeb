#include "fraudlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraudlab/parallel.hpp"

namespace fraudlab {

int Tree::depth() const {
    int best = 0;
    // depth of node = longest path from root; nodes form a topological order
    std::vector<int> d(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].leaf()) {
            best = std::max(best, d[i]);
        } else {
            d[nodes[i].left] = d[i] + 1;
            d[nodes[i].right] = d[i] + 1;
        }
    }
    return best;
}

namespace {

struct ValueEntry {
    double value;
    std::uint32_t sample; // index into the node's sample slice
};

void sort_by_value(std::vector<ValueEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ValueEntry& a, const ValueEntry& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.sample < b.sample;
    });
}

// ---------------------------------------------------------------------------
// Gini CART
// ---------------------------------------------------------------------------

struct GiniBuilder {
    const Dataset& ds;
    const GiniGrowth& cfg;
    Rng& rng;
    std::vector<TreeNode>& nodes;
    std::vector<std::uint32_t>& samples;
    std::vector<std::uint32_t> feature_pool;

    std::int32_t build(std::size_t begin, std::size_t end, int depth) {
        const std::size_t count = end - begin;
        std::size_t positives = 0;
        for (std::size_t i = begin; i < end; ++i) positives += ds.label(samples[i]);

        const auto node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].value = static_cast<double>(positives) / static_cast<double>(count);

        if (positives == 0 || positives == count) return node_id; // pure
        if (depth >= cfg.max_depth || count < 2 * cfg.min_leaf) return node_id;

        const std::size_t want =
            cfg.features_per_split == 0 ? ds.cols() : std::min(cfg.features_per_split, ds.cols());
        for (std::size_t j = 0; j < ds.cols(); ++j) feature_pool[j] = static_cast<std::uint32_t>(j);
        // partial Fisher-Yates: first `want` entries are the node's candidates
        for (std::size_t j = 0; j < want; ++j) {
            const std::size_t pick = j + rng.uniform_below(ds.cols() - j);
            std::swap(feature_pool[j], feature_pool[pick]);
        }

        double best_impurity = std::numeric_limits<double>::infinity();
        std::int32_t best_feature = -1;
        double best_threshold = 0.0;

        std::vector<ValueEntry> entries(count);
        for (std::size_t c = 0; c < want; ++c) {
            const std::uint32_t f = feature_pool[c];
            for (std::size_t i = 0; i < count; ++i)
                entries[i] = {ds.at(samples[begin + i], f), static_cast<std::uint32_t>(i)};
            sort_by_value(entries);

            std::size_t left_count = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                ++left_count;
                left_pos += ds.label(samples[begin + entries[i].sample]);
                if (entries[i].value == entries[i + 1].value) continue;
                const std::size_t right_count = count - left_count;
                if (left_count < cfg.min_leaf || right_count < cfg.min_leaf) continue;
                const double pl = static_cast<double>(left_pos) / static_cast<double>(left_count);
                const double pr = static_cast<double>(positives - left_pos) / static_cast<double>(right_count);
                const double impurity = static_cast<double>(left_count) * 2.0 * pl * (1.0 - pl) +
                                        static_cast<double>(right_count) * 2.0 * pr * (1.0 - pr);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = static_cast<std::int32_t>(f);
                    best_threshold = entries[i].value + 0.5 * (entries[i + 1].value - entries[i].value);
                }
            }
        }

        const double parent_impurity = static_cast<double>(count) * 2.0 *
                                       (static_cast<double>(positives) / count) *
                                       (1.0 - static_cast<double>(positives) / count);
        if (best_feature < 0 || best_impurity >= parent_impurity) return node_id;

        const auto mid = std::partition(samples.begin() + begin, samples.begin() + end,
                                        [&](std::uint32_t s) { return ds.at(s, best_feature) < best_threshold; }) -
                         samples.begin();
        if (mid == static_cast<std::ptrdiff_t>(begin) || mid == static_cast<std::ptrdiff_t>(end))
            return node_id;

        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        const std::int32_t left = build(begin, mid, depth + 1);
        nodes[node_id].left = left;
        const std::int32_t right = build(mid, end, depth + 1);
        nodes[node_id].right = right;
        return node_id;
    }
};

// ---------------------------------------------------------------------------
// Second-order regression tree
// ---------------------------------------------------------------------------

struct SplitCandidate {
    double gain = 0.0;
    double threshold = 0.0;
    bool valid = false;
};

struct XgbBuilder {
    const Dataset& ds;
    std::span<const double> grad;
    std::span<const double> hess;
    const XgbGrowth& cfg;
    int threads;
    std::vector<TreeNode>& nodes;
    std::vector<std::uint32_t>& samples;

    std::int32_t build(std::size_t begin, std::size_t end, int depth) {
        const std::size_t count = end - begin;
        double g_sum = 0.0, h_sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            g_sum += grad[samples[i]];
            h_sum += hess[samples[i]];
        }

        const auto node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].value = -g_sum / (h_sum + cfg.lambda_l2);

        if (depth >= cfg.max_depth || count < 2) return node_id;

        const double parent_score = g_sum * g_sum / (h_sum + cfg.lambda_l2);
        std::vector<SplitCandidate> per_feature(ds.cols());
        parallel_for(ds.cols(), threads, [&](std::size_t f) {
            std::vector<ValueEntry> entries(count);
            for (std::size_t i = 0; i < count; ++i)
                entries[i] = {ds.at(samples[begin + i], f), static_cast<std::uint32_t>(i)};
            sort_by_value(entries);

            SplitCandidate best;
            double gl = 0.0, hl = 0.0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                const std::uint32_t s = samples[begin + entries[i].sample];
                gl += grad[s];
                hl += hess[s];
                if (entries[i].value == entries[i + 1].value) continue;
                const double gr = g_sum - gl, hr = h_sum - hl;
                if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
                const double gain = 0.5 * (gl * gl / (hl + cfg.lambda_l2) +
                                           gr * gr / (hr + cfg.lambda_l2) - parent_score);
                if (gain > 0.0 && (!best.valid || gain > best.gain)) {
                    best.valid = true;
                    best.gain = gain;
                    best.threshold = entries[i].value + 0.5 * (entries[i + 1].value - entries[i].value);
                }
            }
            per_feature[f] = best;
        });

        // deterministic reduction regardless of thread interleaving
        std::int32_t best_feature = -1;
        SplitCandidate best;
        for (std::size_t f = 0; f < per_feature.size(); ++f) {
            if (!per_feature[f].valid) continue;
            if (best_feature < 0 || per_feature[f].gain > best.gain) {
                best = per_feature[f];
                best_feature = static_cast<std::int32_t>(f);
            }
        }
        if (best_feature < 0) return node_id;

        const auto mid = std::partition(samples.begin() + begin, samples.begin() + end,
                                        [&](std::uint32_t s) { return ds.at(s, best_feature) < best.threshold; }) -
                         samples.begin();
        if (mid == static_cast<std::ptrdiff_t>(begin) || mid == static_cast<std::ptrdiff_t>(end))
            return node_id;

        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best.threshold;
        const std::int32_t left = build(begin, mid, depth + 1);
        nodes[node_id].left = left;
        const std::int32_t right = build(mid, end, depth + 1);
        nodes[node_id].right = right;
        return node_id;
    }
};

} // namespace

Tree grow_gini_tree(const Dataset& ds, std::span<const std::uint32_t> samples,
                    const GiniGrowth& cfg, Rng& rng) {
    Tree tree;
    std::vector<std::uint32_t> work(samples.begin(), samples.end());
    GiniBuilder builder{ds, cfg, rng, tree.nodes, work, std::vector<std::uint32_t>(ds.cols())};
    builder.build(0, work.size(), 0);
    return tree;
}

Tree grow_xgb_tree(const Dataset& ds, std::span<const double> grad, std::span<const double> hess,
                   const XgbGrowth& cfg, int threads) {
    Tree tree;
    std::vector<std::uint32_t> work(ds.rows());
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = static_cast<std::uint32_t>(i);
    XgbBuilder builder{ds, grad, hess, cfg, threads, tree.nodes, work};
    builder.build(0, work.size(), 0);
    return tree;
}

} // namespace fraudlab
