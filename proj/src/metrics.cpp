#include "clsunbias/metrics.hpp"

#include "clsunbias/errors.hpp"

#include <string>
#include <tuple>

namespace clsunbias {

LabelVector predict(const Eigen::VectorXd &logits) {
    return (logits.array() > 0.0).cast<int>();
}

Confusion confusion(const LabelVector &preds, const LabelVector &labels) {
    if (preds.size() != labels.size()) {
        throw structural_error("predictions and labels differ in length (" + std::to_string(preds.size()) + " vs " + std::to_string(labels.size()) + ")");
    }
    Confusion c;
    for (Eigen::Index i = 0; i < preds.size(); ++i) {
        if ((preds[i] != 0 && preds[i] != 1) || (labels[i] != 0 && labels[i] != 1)) {
            throw domain_error("predictions and labels must be 0 or 1");
        }
        if (labels[i] == 1) {
            (preds[i] == 1 ? c.tp : c.fn) += 1;
        } else {
            (preds[i] == 1 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

namespace {

void require_nonempty(const Confusion &c) {
    if (c.total() == 0) {
        throw domain_error("metrics of an empty confusion matrix");
    }
}

}  // namespace

double f1(const Confusion &c, class_label cls) {
    require_nonempty(c);
    // For the negative class the roles of tp/tn and fp/fn swap.
    const auto [hit, false_alarm, miss] = cls == class_label::pos ? std::tuple{ c.tp, c.fp, c.fn } : std::tuple{ c.tn, c.fn, c.fp };
    const std::size_t denom = 2 * hit + false_alarm + miss;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(hit) / static_cast<double>(denom);
}

double macro_f1(const Confusion &c) {
    return (f1(c, class_label::pos) + f1(c, class_label::neg)) / 2.0;
}

double accuracy(const Confusion &c) {
    require_nonempty(c);
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

ClassAccuracy per_class_accuracy(const Confusion &c, class_label cls) {
    require_nonempty(c);
    const std::size_t correct = cls == class_label::pos ? c.tp : c.tn;
    const std::size_t support = cls == class_label::pos ? c.positives() : c.negatives();
    if (support == 0) {
        return { 0.0, true };
    }
    return { static_cast<double>(correct) / static_cast<double>(support), false };
}

MetricsReport metrics_report(const Confusion &c) {
    MetricsReport r;
    r.pos_f1 = f1(c, class_label::pos);
    r.neg_f1 = f1(c, class_label::neg);
    r.mf1 = (r.pos_f1 + r.neg_f1) / 2.0;
    r.accuracy = accuracy(c);
    r.pos_acc = per_class_accuracy(c, class_label::pos).value;
    r.neg_acc = per_class_accuracy(c, class_label::neg).value;
    r.n_pos = c.positives();
    r.n_neg = c.negatives();
    return r;
}

MetricsReport evaluate_model(const ModelSpec &spec, const ParamVector &params, const Eigen::MatrixXd &X, const LabelVector &y) {
    MetricsReport r = metrics_report(confusion(predict(forward(spec, params, X)), y));
    if (spec.architecture() == ModelSpec::kind::linear && params.head(spec.input_dim()).norm() > 0.0) {
        r.normalized_weights = normalized_weights(spec, params);
    }
    return r;
}

Eigen::VectorXd normalized_weights(const Eigen::VectorXd &weights) {
    const double norm = weights.norm();
    if (!(norm > 0.0)) {
        throw degenerate_weights_error("cannot normalize a zero weight vector");
    }
    return weights / norm;
}

Eigen::VectorXd normalized_weights(const ModelSpec &spec, const ParamVector &params) {
    if (spec.architecture() != ModelSpec::kind::linear) {
        throw structural_error("normalized weights are defined for linear models only");
    }
    spec.check_params(params);
    return normalized_weights(Eigen::VectorXd(params.head(spec.input_dim())));
}

}  // namespace clsunbias
