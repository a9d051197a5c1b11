#include "mwv/error.hpp"
#include "mwv/eval.hpp"

namespace mwv::eval {

void ConfusionMatrix::add(Label gold, Label predicted) {
    if (gold == Label::Misleading) {
        (predicted == Label::Misleading ? tp : fn) += 1;
    } else {
        (predicted == Label::Misleading ? fp : tn) += 1;
    }
}

ConfusionMatrix tally(const std::vector<Label>& gold, const std::vector<Label>& predicted) {
    if (gold.size() != predicted.size()) {
        throw Error(ErrorCode::DimensionMismatch, "gold and predicted label counts differ");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i) cm.add(gold[i], predicted[i]);
    return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den, const char* name, std::vector<std::string>& undefined) {
    if (den == 0) {
        undefined.emplace_back(name);
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

// tp, fp, fn seen from one class.
ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn, const std::string& suffix,
                           std::vector<std::string>& undefined) {
    ClassMetrics m;
    m.support = tp + fn;
    m.precision = ratio(tp, tp + fp, ("precision_" + suffix).c_str(), undefined);
    m.recall = ratio(tp, tp + fn, ("recall_" + suffix).c_str(), undefined);
    // 2PR / (P + R) written over counts.
    m.f1 = ratio(2 * tp, 2 * tp + fp + fn, ("f1_" + suffix).c_str(), undefined);
    return m;
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
    const std::size_t n = cm.total();
    if (n == 0) throw Error(ErrorCode::EmptyEvaluation, "no evaluated instances");
    MetricsReport r;
    r.cm = cm;
    r.fake = class_metrics(cm.tp, cm.fp, cm.fn, "fake", r.undefined);
    r.real = class_metrics(cm.tn, cm.fn, cm.fp, "real", r.undefined);
    const double total = static_cast<double>(n);
    const std::size_t correct = cm.tp + cm.tn;
    r.accuracy = static_cast<double>(correct) / total;

    r.macro.precision = 0.5 * (r.fake.precision + r.real.precision);
    r.macro.recall = 0.5 * (r.fake.recall + r.real.recall);
    r.macro.f1 = 0.5 * (r.fake.f1 + r.real.f1);

    // Pooled over both classes: TP = correct, FP = FN = wrong.
    const std::size_t wrong = cm.fp + cm.fn;
    r.micro.precision = static_cast<double>(correct) / static_cast<double>(correct + wrong);
    r.micro.recall = r.micro.precision;
    r.micro.f1 = static_cast<double>(2 * correct) / static_cast<double>(2 * correct + 2 * wrong);

    const double wf = static_cast<double>(r.fake.support);
    const double wr = static_cast<double>(r.real.support);
    r.weighted.precision = (wf * r.fake.precision + wr * r.real.precision) / total;
    // support_k * recall_k is tp_k for every class (0 when the class is absent).
    r.weighted.recall = static_cast<double>(cm.tp + cm.tn) / total;
    r.weighted.f1 = (wf * r.fake.f1 + wr * r.real.f1) / total;
    return r;
}

}  // namespace mwv::eval
