#include "fraudlab/scaler.hpp"

#include <algorithm>
#include <cmath>

#include "fraudlab/error.hpp"

namespace fraudlab {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of empty sequence");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lower);
    if (frac == 0.0 || lower + 1 >= sorted.size()) return sorted[lower];
    return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

ScalerParams fit_robust_scaler(const Dataset& ds, std::span<const std::size_t> columns) {
    if (ds.empty()) throw ValidationError("fit_robust_scaler: empty dataset");
    ScalerParams params;
    params.feature_count = ds.cols();
    params.fitted_on = ds.fingerprint();
    std::vector<double> values(ds.rows());
    for (std::size_t col : columns) {
        if (col >= ds.cols())
            throw ValidationError("fit_robust_scaler: column " + std::to_string(col) + " out of range");
        for (std::size_t i = 0; i < ds.rows(); ++i) values[i] = ds.at(i, col);
        std::sort(values.begin(), values.end());
        ColumnScale cs;
        cs.column = col;
        cs.center = quantile_sorted(values, 0.5);
        cs.spread = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
        cs.constant = (cs.spread == 0.0);
        params.columns.push_back(cs);
    }
    return params;
}

ScalerParams fit_robust_scaler(const Dataset& ds, const std::vector<std::string>& column_names) {
    std::vector<std::size_t> cols;
    for (const auto& name : column_names) {
        const auto idx = ds.column_index(name);
        if (!idx) throw ValidationError("fit_robust_scaler: no column named '" + name + "'");
        cols.push_back(*idx);
    }
    return fit_robust_scaler(ds, cols);
}

namespace {

Dataset transform(const Dataset& ds, const ScalerParams& params, bool inverse) {
    if (params.feature_count != ds.cols())
        throw ValidationError("scaler: fitted on " + std::to_string(params.feature_count) +
                              " columns, dataset has " + std::to_string(ds.cols()));
    Dataset out(ds.feature_names());
    out.reserve(ds.rows());
    std::vector<double> buf(ds.cols());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const auto r = ds.row(i);
        std::copy(r.begin(), r.end(), buf.begin());
        for (const auto& cs : params.columns) {
            if (inverse)
                buf[cs.column] = cs.constant ? cs.center : buf[cs.column] * cs.spread + cs.center;
            else
                buf[cs.column] = cs.constant ? 0.0 : (buf[cs.column] - cs.center) / cs.spread;
        }
        out.append_row(buf, ds.label(i), ds.row_id(i));
    }
    out.set_fresh_id_base(ds.fresh_id_base());
    return out;
}

} // namespace

Dataset apply_scaler(const Dataset& ds, const ScalerParams& params) {
    return transform(ds, params, false);
}

Dataset invert_scaler(const Dataset& ds, const ScalerParams& params) {
    return transform(ds, params, true);
}

} // namespace fraudlab
