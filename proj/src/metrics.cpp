#include "fraudlab/metrics.hpp"

#include "fraudlab/error.hpp"

namespace fraudlab {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int positive) {
    if (y_true.size() != y_pred.size())
        throw ValidationError("confusion: " + std::to_string(y_true.size()) + " truths vs " +
                              std::to_string(y_pred.size()) + " predictions");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1))
            throw ValidationError("confusion: labels must be 0 or 1");
        const bool truth = (y_true[i] == positive);
        const bool pred = (y_pred[i] == positive);
        if (truth && pred) ++cm.tp;
        else if (truth && !pred) ++cm.fn;
        else if (!truth && pred) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

namespace {
double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
} // namespace

double accuracy(const ConfusionMatrix& cm) { return ratio(cm.tp + cm.tn, cm.total()); }
double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
double f1(const ConfusionMatrix& cm) { return ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn); }

ClassReport class_report(const ConfusionMatrix& cm, int positive_class) {
    ClassReport r;
    r.positive_class = positive_class;
    r.precision = precision(cm);
    r.recall = recall(cm);
    r.f1 = f1(cm);
    r.accuracy = accuracy(cm);
    r.support = cm.tp + cm.fn;
    r.degenerate = (cm.tp + cm.fp == 0) || (cm.tp + cm.fn == 0) || (2 * cm.tp + cm.fp + cm.fn == 0);
    return r;
}

} // namespace fraudlab
