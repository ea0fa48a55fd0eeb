#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fraudlab {

using RowId = std::int64_t;

/// Labeled feature matrix with stable row identities.
///
/// Row ids survive splitting and resampling, which is what makes the
/// train/test leakage guards assertable. Synthetic rows (SMOTE) receive fresh
/// ids drawn above `fresh_id_base()`, a high-water mark inherited from the
/// originally loaded data so synthetic ids never collide with any original
/// row, including rows held out in another partition.
///
/// Datasets are treated as immutable once built; every transformation
/// returns a new Dataset.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<std::string> feature_names);

    void reserve(std::size_t rows);
    void append_row(std::span<const double> features, int label, RowId id);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return feature_names_.size(); }
    bool empty() const { return labels_.empty(); }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * cols(), cols()};
    }
    double at(std::size_t i, std::size_t j) const { return features_[i * cols() + j]; }
    int label(std::size_t i) const { return labels_[i]; }
    RowId row_id(std::size_t i) const { return row_ids_[i]; }

    const std::vector<std::string>& feature_names() const { return feature_names_; }
    std::optional<std::size_t> column_index(std::string_view name) const;

    std::size_t class_count(int label) const;
    double fraud_fraction() const;

    /// Row indices of one class, ordered by row id. Samplers iterate these so
    /// their output is independent of input row order.
    std::vector<std::size_t> class_indices(int label) const;

    /// New dataset holding the given rows (indices into this one).
    Dataset select(std::span<const std::size_t> indices) const;

    /// One past the largest id in this dataset's lineage; see class comment.
    RowId fresh_id_base() const { return fresh_id_base_; }
    void set_fresh_id_base(RowId base) { fresh_id_base_ = base; }

    /// FNV-1a over shape, ids, labels and feature bytes. Changes when any row changes.
    std::uint64_t fingerprint() const;

    /// Checks the structural invariants (finite features, binary labels,
    /// unique ids). Throws ValidationError on violation.
    void validate() const;

private:
    std::vector<std::string> feature_names_;
    std::vector<double> features_; // row-major, rows() x cols()
    std::vector<std::uint8_t> labels_;
    std::vector<RowId> row_ids_;
    RowId fresh_id_base_ = 0;
};

/// The ULB credit-card schema: Time, V1..V28, Amount (Class column is the label).
std::vector<std::string> ulb_schema();

/// Loads a CSV whose header must equal `schema` + trailing "Class" column.
/// Rejects missing/extra columns, non-numeric and non-finite cells, and labels
/// outside {0,1}, each with a diagnostic naming the column or row.
Dataset load_csv(const std::string& path, const std::vector<std::string>& schema);

/// Loads a CSV accepting whatever feature columns the header declares; the last
/// column must be named "Class".
Dataset load_csv(const std::string& path);

/// Writes header + rows; round-trips through load_csv (ids are reassigned on load).
void save_csv(const Dataset& ds, const std::string& path);

/// Per-class split: test gets round(class_count * test_fraction) rows of each
/// class, chosen by seeded shuffle within the class. Same seed, same partition.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Unstratified split: test gets round(rows * test_fraction) rows overall.
std::pair<Dataset, Dataset> random_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

} // namespace fraudlab
