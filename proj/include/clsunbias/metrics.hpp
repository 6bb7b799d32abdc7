#ifndef CLSUNBIAS_METRICS_HPP_
#define CLSUNBIAS_METRICS_HPP_
#pragma once

#include "clsunbias/models.hpp"
#include "clsunbias/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace clsunbias {

/// Binary confusion counts; label 1 is the positive class.
struct Confusion {
    std::size_t tp{};
    std::size_t fp{};
    std::size_t fn{};
    std::size_t tn{};

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
    [[nodiscard]] std::size_t positives() const noexcept { return tp + fn; }
    [[nodiscard]] std::size_t negatives() const noexcept { return tn + fp; }
};

/// logit > 0 means positive.
LabelVector predict(const Eigen::VectorXd &logits);

Confusion confusion(const LabelVector &preds, const LabelVector &labels);

/// F1 for one class, 0 when the denominator vanishes.
double f1(const Confusion &c, class_label cls);
double macro_f1(const Confusion &c);
double accuracy(const Confusion &c);

struct ClassAccuracy {
    double value{};
    /// No samples of that class were evaluated; value is then 0.
    bool absent{};
};

ClassAccuracy per_class_accuracy(const Confusion &c, class_label cls);

struct MetricsReport {
    double pos_f1{};
    double neg_f1{};
    double mf1{};
    double accuracy{};
    double pos_acc{};
    double neg_acc{};
    std::size_t n_pos{};
    std::size_t n_neg{};
    /// Linear models only.
    std::optional<Eigen::VectorXd> normalized_weights;

    /// The positive class is present but never predicted correctly.
    [[nodiscard]] bool collapsed() const noexcept { return n_pos > 0 && pos_f1 == 0.0; }
};

MetricsReport metrics_report(const Confusion &c);

/// Predictions of `params` on (X, y) summarized, with normalized weights for linear models.
MetricsReport evaluate_model(const ModelSpec &spec, const ParamVector &params, const Eigen::MatrixXd &X, const LabelVector &y);

/// w / |w| over the weights of a linear model; the bias is excluded.
Eigen::VectorXd normalized_weights(const ModelSpec &spec, const ParamVector &params);

/// Same, on a bare weight vector.
Eigen::VectorXd normalized_weights(const Eigen::VectorXd &weights);

}  // namespace clsunbias

#endif  // CLSUNBIAS_METRICS_HPP_
