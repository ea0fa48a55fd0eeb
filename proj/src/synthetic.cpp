#include "fraudlab/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fraudlab/error.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

void SyntheticSpec::validate() const {
    if (dimensions < 1) throw ValidationError("synthetic: dimensions must be >= 1");
    if (clusters_per_class < 1) throw ValidationError("synthetic: clusters_per_class must be >= 1");
    if (n_minority > n_majority) throw ValidationError("synthetic: n_minority must be <= n_majority");
    if (!(class_separation >= 0.0)) throw ValidationError("synthetic: class_separation must be >= 0");
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dimensions;

    Rng center_rng(derive_seed(spec.seed, "synthetic/centers"));
    // Shared base center per cluster index; class 1 offsets along a random unit
    // direction. With separation 0 the two classes share every cluster center.
    std::vector<std::vector<double>> base(spec.clusters_per_class, std::vector<double>(d));
    std::vector<std::vector<double>> offset(spec.clusters_per_class, std::vector<double>(d));
    for (std::size_t c = 0; c < spec.clusters_per_class; ++c) {
        for (std::size_t j = 0; j < d; ++j) base[c][j] = 3.0 * center_rng.normal();
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            offset[c][j] = center_rng.normal();
            norm += offset[c][j] * offset[c][j];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            offset[c][0] = 1.0;
            norm = 1.0;
        }
        for (std::size_t j = 0; j < d; ++j) offset[c][j] *= spec.class_separation / norm;
    }

    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) names[j] = "f" + std::to_string(j);
    Dataset ds(names);
    ds.reserve(spec.n_majority + spec.n_minority);

    Rng row_rng(derive_seed(spec.seed, "synthetic/rows"));
    std::vector<double> buf(d);
    RowId next_id = 0;
    for (int cls : {0, 1}) {
        const std::size_t count = (cls == 0) ? spec.n_majority : spec.n_minority;
        for (std::size_t i = 0; i < count; ++i) {
            const auto c = static_cast<std::size_t>(row_rng.uniform_below(spec.clusters_per_class));
            for (std::size_t j = 0; j < d; ++j) {
                const double mean = base[c][j] + (cls == 1 ? offset[c][j] : 0.0);
                buf[j] = mean + row_rng.normal();
            }
            ds.append_row(buf, cls, next_id++);
        }
    }
    return ds;
}

} // namespace fraudlab
