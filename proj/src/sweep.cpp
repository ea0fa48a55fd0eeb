#include "fraudlab/sweep.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "fraudlab/error.hpp"
#include "fraudlab/evaluate.hpp"
#include "fraudlab/parallel.hpp"
#include "fraudlab/resample.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

RatioSweepResult ratio_sweep(const Dataset& train, std::span<const double> ratios,
                             const ModelSpec& model, const Dataset& eval, double multiplier,
                             std::size_t smote_k, std::uint64_t seed, int threads, double threshold) {
    if (ratios.empty()) throw ValidationError("ratio_sweep: empty ratio list");
    for (double r : ratios)
        if (!(r > 0.0 && r <= 0.5))
            throw ValidationError("ratio_sweep: ratio " + std::to_string(r) + " outside (0, 0.5]");
    std::unordered_set<RowId> train_ids;
    train_ids.reserve(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) train_ids.insert(train.row_id(i));
    for (std::size_t i = 0; i < eval.rows(); ++i)
        if (train_ids.count(eval.row_id(i)))
            throw LeakageError("ratio_sweep: evaluation set shares row " +
                               std::to_string(eval.row_id(i)) + " with the training set");

    RatioSweepResult result;
    result.points.resize(ratios.size());
    parallel_for(ratios.size(), threads, [&](std::size_t i) {
        const double ratio = ratios[i];
        SweepPoint point;
        point.ratio = ratio;
        try {
            const std::uint64_t ratio_seed = derive_seed(seed, "sweep/ratio", seed_salt(ratio));
            const Dataset resampled = hybrid_resample(train, ratio, multiplier, smote_k, ratio_seed);
            ModelSpec spec = model;
            spec.seed = derive_seed(ratio_seed, "sweep/model");
            const TrainedModel fitted = fit_model(spec, resampled, 1);
            const EvalReport report = evaluate(fitted, eval, threshold, 1);
            point.precision = report.class1.precision;
            point.recall = report.class1.recall;
            point.f1 = report.class1.f1;
        } catch (const InfeasiblePlanError& e) {
            point.skipped = true;
            point.skip_reason = e.what();
        } catch (const ValidationError& e) {
            point.skipped = true;
            point.skip_reason = e.what();
        }
        result.points[i] = std::move(point);
    });
    return result;
}

SelectCriterion criterion_from_name(const std::string& name) {
    if (name == "max_f1") return SelectCriterion::max_f1;
    if (name == "min_precision_floor") return SelectCriterion::min_precision_floor;
    if (name == "knee") return SelectCriterion::knee;
    throw ValidationError("unknown selection criterion '" + name + "'");
}

std::string criterion_name(SelectCriterion c) {
    switch (c) {
    case SelectCriterion::max_f1: return "max_f1";
    case SelectCriterion::min_precision_floor: return "min_precision_floor";
    case SelectCriterion::knee: return "knee";
    }
    return "?";
}

double select_ratio(const RatioSweepResult& sweep, SelectCriterion criterion, double floor) {
    if (criterion == SelectCriterion::knee)
        throw ValidationError("select_ratio: the knee criterion is not implemented");

    const SweepPoint* best = nullptr;
    for (const auto& p : sweep.points) {
        if (p.skipped) continue;
        switch (criterion) {
        case SelectCriterion::max_f1:
            if (!best || p.f1 > best->f1 || (p.f1 == best->f1 && p.ratio < best->ratio)) best = &p;
            break;
        case SelectCriterion::min_precision_floor:
            if (p.precision < floor) continue;
            if (!best || p.recall > best->recall || (p.recall == best->recall && p.ratio < best->ratio))
                best = &p;
            break;
        case SelectCriterion::knee:
            break;
        }
    }
    if (!best) {
        if (criterion == SelectCriterion::min_precision_floor)
            throw ValidationError("select_ratio: no sweep point reaches precision floor " +
                                  std::to_string(floor));
        throw ValidationError("select_ratio: sweep has no successful points");
    }
    return best->ratio;
}

std::vector<double> log_spaced_ratios(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo)) throw ValidationError("log_spaced_ratios: need 0 < lo <= hi");
    if (count == 0) throw ValidationError("log_spaced_ratios: need at least one point");
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::exp(std::log(lo) + step * i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

void write_sweep_csv(const RatioSweepResult& sweep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << "ratio,precision,recall,f1,skipped_reason\n";
    char buf[40];
    for (const auto& p : sweep.points) {
        std::snprintf(buf, sizeof buf, "%.10g", p.ratio);
        out << buf;
        if (p.skipped) {
            std::string reason = p.skip_reason;
            for (auto& c : reason)
                if (c == ',' || c == '\n') c = ';';
            out << ",,,," << reason << '\n';
        } else {
            out << ',' << p.precision << ',' << p.recall << ',' << p.f1 << ",\n";
        }
    }
    if (!out) throw Error("write failed: " + path);
}

} // namespace fraudlab
