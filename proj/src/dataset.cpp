#include "fraudlab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

Dataset::Dataset(std::vector<std::string> feature_names)
    : feature_names_(std::move(feature_names)) {}

void Dataset::reserve(std::size_t rows) {
    features_.reserve(rows * cols());
    labels_.reserve(rows);
    row_ids_.reserve(rows);
}

void Dataset::append_row(std::span<const double> features, int label, RowId id) {
    if (features.size() != cols())
        throw ValidationError("append_row: expected " + std::to_string(cols()) + " features, got " +
                              std::to_string(features.size()));
    for (double v : features)
        if (!std::isfinite(v)) throw ValidationError("append_row: non-finite feature value");
    if (label != 0 && label != 1)
        throw ValidationError("append_row: label must be 0 or 1, got " + std::to_string(label));
    features_.insert(features_.end(), features.begin(), features.end());
    labels_.push_back(static_cast<std::uint8_t>(label));
    row_ids_.push_back(id);
    if (id >= fresh_id_base_) fresh_id_base_ = id + 1;
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < feature_names_.size(); ++j)
        if (feature_names_[j] == name) return j;
    return std::nullopt;
}

std::size_t Dataset::class_count(int label) const {
    std::size_t n = 0;
    for (auto l : labels_) n += (l == label);
    return n;
}

double Dataset::fraud_fraction() const {
    return empty() ? 0.0 : static_cast<double>(class_count(1)) / static_cast<double>(rows());
}

std::vector<std::size_t> Dataset::class_indices(int label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows(); ++i)
        if (labels_[i] == label) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [this](std::size_t a, std::size_t b) { return row_ids_[a] < row_ids_[b]; });
    return idx;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
    Dataset out(feature_names_);
    out.reserve(indices.size());
    for (std::size_t i : indices) out.append_row(row(i), labels_[i], row_ids_[i]);
    out.fresh_id_base_ = fresh_id_base_; // keep the lineage high-water mark
    return out;
}

std::uint64_t Dataset::fingerprint() const {
    const std::uint64_t shape[2] = {rows(), cols()};
    std::uint64_t h = fnv1a(shape, sizeof shape);
    h = fnv1a(row_ids_.data(), row_ids_.size() * sizeof(RowId), h);
    h = fnv1a(labels_.data(), labels_.size(), h);
    h = fnv1a(features_.data(), features_.size() * sizeof(double), h);
    return h;
}

void Dataset::validate() const {
    if (labels_.size() != row_ids_.size() || features_.size() != labels_.size() * cols())
        throw ValidationError("dataset: feature/label/id lengths disagree");
    for (double v : features_)
        if (!std::isfinite(v)) throw ValidationError("dataset: non-finite feature value");
    for (auto l : labels_)
        if (l > 1) throw ValidationError("dataset: label outside {0,1}");
    std::unordered_set<RowId> seen;
    seen.reserve(row_ids_.size());
    for (RowId id : row_ids_)
        if (!seen.insert(id).second)
            throw ValidationError("dataset: duplicate row id " + std::to_string(id));
}

std::vector<std::string> ulb_schema() {
    std::vector<std::string> cols{"Time"};
    for (int i = 1; i <= 28; ++i) cols.push_back("V" + std::to_string(i));
    cols.push_back("Amount");
    return cols;
}

namespace {

// Strips whitespace and one layer of double quotes (the Kaggle export quotes
// the header and the Class column).
std::string_view clean_token(std::string_view tok) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t' || tok.front() == '\r')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        tok.remove_prefix(1);
        tok.remove_suffix(1);
    }
    return tok;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.emplace_back(clean_token(std::string_view(line).substr(start)));
            break;
        }
        out.emplace_back(clean_token(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t file_row, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("row " + std::to_string(file_row) + ", column " + column +
                         ": cannot parse '" + cell + "' as a number");
    if (!std::isfinite(value))
        throw ParseError("row " + std::to_string(file_row) + ", column " + column +
                         ": non-finite value '" + cell + "'");
    return value;
}

Dataset load_csv_impl(const std::string& path, const std::vector<std::string>* expected_schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
    auto header = split_line(line);
    if (header.empty() || header.back() != "Class")
        throw SchemaError(path + ": last header column must be 'Class'");
    header.pop_back();

    if (expected_schema) {
        const auto& want = *expected_schema;
        for (std::size_t j = 0; j < std::min(want.size(), header.size()); ++j)
            if (header[j] != want[j])
                throw SchemaError(path + ": header column " + std::to_string(j) + " is '" + header[j] +
                                  "', expected '" + want[j] + "'");
        if (header.size() < want.size())
            throw SchemaError(path + ": missing column '" + want[header.size()] + "'");
        if (header.size() > want.size())
            throw SchemaError(path + ": unexpected extra column '" + header[want.size()] + "'");
    }

    Dataset ds(header);
    std::vector<double> row_buf(header.size());
    std::size_t file_row = 1; // header is row 0
    RowId next_id = 0;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) {
            ++file_row;
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != header.size() + 1)
            throw ParseError(path + ": row " + std::to_string(file_row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size() + 1));
        for (std::size_t j = 0; j < header.size(); ++j)
            row_buf[j] = parse_cell(cells[j], file_row, ds.feature_names()[j]);
        const double label_value = parse_cell(cells.back(), file_row, "Class");
        if (label_value != 0.0 && label_value != 1.0)
            throw ValidationError(path + ": row " + std::to_string(file_row) +
                                  ": Class must be 0 or 1, got '" + cells.back() + "'");
        ds.append_row(row_buf, static_cast<int>(label_value), next_id++);
        ++file_row;
    }
    return ds;
}

void append_sorted_by_index(std::vector<std::size_t>& dest, std::vector<std::size_t>&& src) {
    dest.insert(dest.end(), src.begin(), src.end());
}

} // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& schema) {
    return load_csv_impl(path, &schema);
}

Dataset load_csv(const std::string& path) { return load_csv_impl(path, nullptr); }

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    for (const auto& name : ds.feature_names()) out << name << ',';
    out << "Class\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const auto r = ds.row(i);
        for (double v : r) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        out << ds.label(i) << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("stratified_split: test_fraction must be in (0,1)");
    std::vector<std::size_t> train_idx, test_idx;
    for (int cls : {0, 1}) {
        auto members = ds.class_indices(cls);
        if (members.size() < 2)
            throw ValidationError("stratified_split: class " + std::to_string(cls) + " has " +
                                  std::to_string(members.size()) + " members, need at least 2");
        Rng rng(derive_seed(seed, "stratified_split", static_cast<std::uint64_t>(cls)));
        rng.shuffle(members);
        const auto test_count = static_cast<std::size_t>(
            std::llround(static_cast<double>(members.size()) * test_fraction));
        append_sorted_by_index(test_idx, {members.begin(), members.begin() + test_count});
        append_sorted_by_index(train_idx, {members.begin() + test_count, members.end()});
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {ds.select(train_idx), ds.select(test_idx)};
}

std::pair<Dataset, Dataset> random_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (ds.empty()) throw ValidationError("random_split: empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("random_split: test_fraction must be in (0,1)");
    std::vector<std::size_t> order(ds.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&ds](std::size_t a, std::size_t b) { return ds.row_id(a) < ds.row_id(b); });
    Rng rng(derive_seed(seed, "random_split"));
    rng.shuffle(order);
    const auto test_count =
        static_cast<std::size_t>(std::llround(static_cast<double>(ds.rows()) * test_fraction));
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + test_count);
    std::vector<std::size_t> train_idx(order.begin() + test_count, order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {ds.select(train_idx), ds.select(test_idx)};
}

} // namespace fraudlab
