#pragma once

// Shared test utilities: tiny dataset builders and independent oracles.
// Oracles here must stay independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fraudlab/dataset.hpp"

namespace testutil {

inline fraudlab::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                      const std::vector<int>& labels) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < rows.at(0).size(); ++j) names.push_back("f" + std::to_string(j));
    fraudlab::Dataset ds(names);
    for (std::size_t i = 0; i < rows.size(); ++i)
        ds.append_row(rows[i], labels.at(i), static_cast<fraudlab::RowId>(i));
    return ds;
}

/// Exhaustive-sort KNN oracle: sorts every (distance^2, row_id) pair and
/// votes over the first k. The tie order is part of the contract.
inline double knn_oracle(const fraudlab::Dataset& train, std::span<const double> x, std::size_t k) {
    struct Entry {
        double d2;
        fraudlab::RowId id;
        int label;
    };
    std::vector<Entry> entries;
    entries.reserve(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) {
        const auto r = train.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) d2 += (x[j] - r[j]) * (x[j] - r[j]);
        entries.push_back({d2, train.row_id(i), train.label(i)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        return a.id < b.id;
    });
    std::size_t positives = 0;
    for (std::size_t i = 0; i < k; ++i) positives += entries[i].label;
    return static_cast<double>(positives) / static_cast<double>(k);
}

/// Independent linear-interpolation quantile, written from the definition:
/// position p = q*(n-1), value = x[floor(p)] + (p - floor(p)) * gap.
inline double quantile_oracle(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double p = q * static_cast<double>(values.size() - 1);
    const double lo = std::floor(p);
    const auto i = static_cast<std::size_t>(lo);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + (p - lo) * (values[i + 1] - values[i]);
}

inline std::string write_temp_csv(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/fraudlab_test_" + name;
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
    return path;
}

} // namespace testutil
