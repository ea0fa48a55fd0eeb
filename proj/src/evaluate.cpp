#include "fraudlab/evaluate.hpp"

#include "fraudlab/error.hpp"
#include "fraudlab/parallel.hpp"

namespace fraudlab {

EvalReport evaluate(const TrainedModel& model, const Dataset& ds, double threshold, int threads,
                    const std::string& sampling_desc) {
    if (ds.empty()) throw ValidationError("evaluate: empty dataset");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ValidationError("evaluate: threshold must be in [0,1]");

    std::vector<int> y_true(ds.rows()), y_pred(ds.rows());
    parallel_for(ds.rows(), threads, [&](std::size_t i) {
        y_true[i] = ds.label(i);
        y_pred[i] = predict(model, ds.row(i), threshold);
    });

    EvalReport report;
    report.cm = confusion(y_true, y_pred, 1);
    report.class1 = class_report(report.cm, 1);
    report.class0 = class_report(confusion(y_true, y_pred, 0), 0);
    report.threshold = threshold;
    report.data = {ds.rows(), ds.class_count(1), ds.fingerprint()};
    report.model_desc = model.spec.describe();
    report.sampling_desc = sampling_desc;
    report.model_seed = model.spec.seed;
    return report;
}

} // namespace fraudlab
