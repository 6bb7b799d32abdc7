#ifndef CLSUNBIAS_OBJECTIVES_HPP_
#define CLSUNBIAS_OBJECTIVES_HPP_
#pragma once

#include "clsunbias/errors.hpp"
#include "clsunbias/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

namespace clsunbias {

template <typename Scalar>
Scalar softplus(Scalar x) {
    using std::exp;
    using std::log1p;
    return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    using std::exp;
    if (x >= Scalar(0)) {
        return Scalar(1) / (Scalar(1) + exp(-x));
    }
    const Scalar e = exp(x);
    return e / (Scalar(1) + e);
}

/// Binary cross-entropy of one logit, computed in logit space.
template <typename Scalar>
Scalar bce(Scalar logit, int label) {
    if (!std::isfinite(logit)) {
        throw domain_error("bce: non-finite logit");
    }
    return softplus(logit) - Scalar(label) * logit;
}

/// d bce / d logit
template <typename Scalar>
Scalar bce_grad(Scalar logit, int label) {
    return sigmoid(logit) - Scalar(label);
}

namespace detail {

template <typename Derived>
void check_batch(const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels) {
    if (logits.size() != labels.size()) {
        throw structural_error("logits and labels differ in length (" + std::to_string(logits.size()) + " vs " + std::to_string(labels.size()) + ")");
    }
    if (logits.size() == 0) {
        throw domain_error("empty batch");
    }
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw domain_error("labels must be 0 or 1");
        }
    }
}

}  // namespace detail

/// Mean cross-entropy of the positive samples and of the negative samples.
template <typename Scalar>
struct ClassLosses {
    Scalar pos{};
    Scalar neg{};
    Eigen::Index n_pos{};
    Eigen::Index n_neg{};
};

template <typename Derived>
ClassLosses<typename Derived::Scalar> class_losses(const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels) {
    using Scalar = typename Derived::Scalar;
    detail::check_batch(logits, labels);
    ClassLosses<Scalar> out;
    Scalar sum_pos{ 0 };
    Scalar sum_neg{ 0 };
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const Scalar l = bce(logits[i], labels[i]);
        if (labels[i] == 1) {
            sum_pos += l;
            ++out.n_pos;
        } else {
            sum_neg += l;
            ++out.n_neg;
        }
    }
    if (out.n_pos == 0) {
        throw empty_class_error(class_label::pos);
    }
    if (out.n_neg == 0) {
        throw empty_class_error(class_label::neg);
    }
    out.pos = sum_pos / Scalar(out.n_pos);
    out.neg = sum_neg / Scalar(out.n_neg);
    return out;
}

/// Plain batch-average cross-entropy. Single-class batches are fine.
template <typename Derived>
typename Derived::Scalar erm(const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels) {
    using Scalar = typename Derived::Scalar;
    detail::check_batch(logits, labels);
    Scalar sum{ 0 };
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        sum += bce(logits[i], labels[i]);
    }
    return sum / Scalar(logits.size());
}

/// Batch average of per-sample losses scaled by a class-dependent factor.
template <typename Derived>
typename Derived::Scalar erm_cls_w(const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels, double weight_pos, double weight_neg) {
    using Scalar = typename Derived::Scalar;
    detail::check_batch(logits, labels);
    Scalar sum{ 0 };
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        sum += Scalar(labels[i] == 1 ? weight_pos : weight_neg) * bce(logits[i], labels[i]);
    }
    return sum / Scalar(logits.size());
}

template <typename Scalar>
Scalar erm_per_cls(Scalar l_pos, Scalar l_neg) {
    return l_pos + l_neg;
}

/// |l_pos - l_neg|
template <typename Scalar>
Scalar cls_ineq(Scalar l_pos, Scalar l_neg) {
    using std::abs;
    return abs(l_pos - l_neg);
}

/// Subgradient sign of cls_ineq with respect to l_pos; 0 at equality.
template <typename Scalar>
Scalar cls_ineq_sign(Scalar l_pos, Scalar l_neg) {
    return l_pos > l_neg ? Scalar(1) : (l_pos < l_neg ? Scalar(-1) : Scalar(0));
}

template <typename Scalar>
struct GdroWeights {
    Scalar pos{};
    Scalar neg{};
};

template <typename Scalar>
struct GdroResult {
    Scalar value{};
    GdroWeights<Scalar> weights;
};

/// Softmax of tau * (l_pos, l_neg), shifted by the max for stability.
template <typename Scalar>
GdroWeights<Scalar> gdro_weights(Scalar l_pos, Scalar l_neg, Scalar tau) {
    using std::exp;
    if (!(tau > Scalar(0))) {
        throw domain_error("gdro: temperature must be > 0");
    }
    const Scalar top = std::max(l_pos, l_neg);
    const Scalar e_pos = exp(tau * (l_pos - top));
    const Scalar e_neg = exp(tau * (l_neg - top));
    const Scalar z = e_pos + e_neg;
    return { e_pos / z, e_neg / z };
}

/**
 * Class-wise group DRO. The weights are treated as constants when differentiating,
 * so the gradient is w_pos * grad(l_pos) + w_neg * grad(l_neg).
 */
template <typename Scalar>
GdroResult<Scalar> gdro(Scalar l_pos, Scalar l_neg, Scalar tau) {
    const GdroWeights<Scalar> w = gdro_weights(l_pos, l_neg, tau);
    return { w.pos * l_pos + w.neg * l_neg, w };
}

template <typename Scalar>
Scalar total_loss(Scalar alpha, Scalar l_cls_ineq, Scalar l_gdro) {
    return alpha * l_cls_ineq + l_gdro;
}

/// Value that moves linearly from `init` at t = 0 to `end` at t = T.
struct ScheduleSpec {
    double init{ 0.0 };
    double end{ 0.0 };
    std::size_t total_iterations{ 1 };
};

inline double schedule_value(const ScheduleSpec &spec, std::size_t t) {
    if (spec.total_iterations < 1) {
        throw domain_error("schedule: total_iterations must be >= 1");
    }
    if (t > spec.total_iterations) {
        throw domain_error("schedule: t = " + std::to_string(t) + " beyond T = " + std::to_string(spec.total_iterations));
    }
    return spec.init + (spec.end - spec.init) * static_cast<double>(t) / static_cast<double>(spec.total_iterations);
}

/// One of the training objectives, with whatever hyper-parameters it needs.
struct ObjectiveSpec {
    enum class kind { erm, erm_cls_w, erm_per_cls, gdro, cls_ineq, total };

    kind type{ kind::erm };
    double weight_pos{ 1.0 };
    double weight_neg{ 1.0 };
    double tau{ 1.0 };
    double alpha{ 0.0 };

    static ObjectiveSpec make_erm() { return {}; }
    static ObjectiveSpec make_erm_cls_w(double weight_pos, double weight_neg) {
        if (!(weight_pos > 0.0 && weight_neg > 0.0)) {
            throw domain_error("class weights must be > 0");
        }
        return { kind::erm_cls_w, weight_pos, weight_neg };
    }
    static ObjectiveSpec make_erm_per_cls() { return { kind::erm_per_cls }; }
    static ObjectiveSpec make_gdro(double tau) {
        if (!(tau > 0.0)) {
            throw domain_error("gdro: temperature must be > 0");
        }
        return { kind::gdro, 1.0, 1.0, tau };
    }
    static ObjectiveSpec make_cls_ineq() { return { kind::cls_ineq }; }
    static ObjectiveSpec make_total(double alpha, double tau) {
        if (!(tau > 0.0)) {
            throw domain_error("gdro: temperature must be > 0");
        }
        if (!(alpha >= 0.0)) {
            throw domain_error("alpha must be >= 0");
        }
        return { kind::total, 1.0, 1.0, tau, alpha };
    }

    [[nodiscard]] bool needs_both_classes() const noexcept { return type != kind::erm && type != kind::erm_cls_w; }
    [[nodiscard]] bool has_gdro_weights() const noexcept { return type == kind::gdro || type == kind::total; }
};

inline std::string to_string(ObjectiveSpec::kind k) {
    switch (k) {
        case ObjectiveSpec::kind::erm: return "erm";
        case ObjectiveSpec::kind::erm_cls_w: return "erm_cls_w";
        case ObjectiveSpec::kind::erm_per_cls: return "erm_per_cls";
        case ObjectiveSpec::kind::gdro: return "gdro";
        case ObjectiveSpec::kind::cls_ineq: return "cls_ineq";
        case ObjectiveSpec::kind::total: return "total";
    }
    return "?";
}

/// Objective value together with its derivative with respect to every logit.
template <typename Scalar>
struct ObjectiveValue {
    Scalar value{};
    VectorX<Scalar> dlogits;
    /// G-DRO weights used, for objectives that have them.
    std::optional<GdroWeights<Scalar>> weights;
};

/**
 * Evaluate an objective on a batch of logits.
 *
 * `frozen` replaces the G-DRO weights that would otherwise be computed from the current
 * class losses; it is how finite differences honor the stop-gradient.
 */
template <typename Derived>
ObjectiveValue<typename Derived::Scalar> evaluate_objective(const ObjectiveSpec &objective, const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels,
                                                            const std::optional<GdroWeights<typename Derived::Scalar>> &frozen = std::nullopt) {
    using Scalar = typename Derived::Scalar;
    detail::check_batch(logits, labels);
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        if (!std::isfinite(logits[i])) {
            throw numerical_overflow_error("non-finite logit at sample " + std::to_string(i));
        }
    }
    const Eigen::Index n = logits.size();
    ObjectiveValue<Scalar> out;
    out.dlogits.resize(n);

    if (objective.type == ObjectiveSpec::kind::erm || objective.type == ObjectiveSpec::kind::erm_cls_w) {
        const bool weighted = objective.type == ObjectiveSpec::kind::erm_cls_w;
        out.value = weighted ? erm_cls_w(logits, labels, objective.weight_pos, objective.weight_neg) : erm(logits, labels);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar scale = weighted ? Scalar(labels[i] == 1 ? objective.weight_pos : objective.weight_neg) : Scalar(1);
            out.dlogits[i] = scale * bce_grad(logits[i], labels[i]) / Scalar(n);
        }
    } else {
        const ClassLosses<Scalar> cl = class_losses(logits, labels);
        // Every class-partitioned objective has per-sample gradient
        //   (coef_c / n_c) * dbce_i, where c is the sample's class.
        Scalar coef_pos{ 0 };
        Scalar coef_neg{ 0 };
        switch (objective.type) {
            case ObjectiveSpec::kind::erm_per_cls:
                out.value = erm_per_cls(cl.pos, cl.neg);
                coef_pos = coef_neg = Scalar(1);
                break;
            case ObjectiveSpec::kind::cls_ineq: {
                out.value = cls_ineq(cl.pos, cl.neg);
                const Scalar s = cls_ineq_sign(cl.pos, cl.neg);
                coef_pos = s;
                coef_neg = -s;
                break;
            }
            case ObjectiveSpec::kind::gdro:
            case ObjectiveSpec::kind::total: {
                const GdroWeights<Scalar> w = frozen ? *frozen : gdro_weights(cl.pos, cl.neg, Scalar(objective.tau));
                const Scalar l_gdro = w.pos * cl.pos + w.neg * cl.neg;
                out.weights = w;
                if (objective.type == ObjectiveSpec::kind::gdro) {
                    out.value = l_gdro;
                    coef_pos = w.pos;
                    coef_neg = w.neg;
                } else {
                    const Scalar alpha{ objective.alpha };
                    const Scalar s = cls_ineq_sign(cl.pos, cl.neg);
                    out.value = total_loss(alpha, cls_ineq(cl.pos, cl.neg), l_gdro);
                    coef_pos = alpha * s + w.pos;
                    coef_neg = -alpha * s + w.neg;
                }
                break;
            }
            default: break;
        }
        const Scalar scale_pos = coef_pos / Scalar(cl.n_pos);
        const Scalar scale_neg = coef_neg / Scalar(cl.n_neg);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.dlogits[i] = (labels[i] == 1 ? scale_pos : scale_neg) * bce_grad(logits[i], labels[i]);
        }
    }
    if (!std::isfinite(out.value) || !out.dlogits.allFinite()) {
        throw numerical_overflow_error("non-finite objective value or gradient");
    }
    return out;
}

/// All scalar losses of one batch at one iteration.
struct LossBreakdown {
    double l_pos{};
    double l_neg{};
    double l_erm{};
    double l_cls_ineq{};
    double l_gdro{};
    double l_total{};
    double w_pos{};
    double w_neg{};
    double alpha{};
    double tau{};
};

template <typename Derived>
LossBreakdown loss_breakdown(const Eigen::MatrixBase<Derived> &logits, const LabelVector &labels, double alpha, double tau) {
    const auto cl = class_losses(logits, labels);
    const auto g = gdro(double(cl.pos), double(cl.neg), tau);
    LossBreakdown b;
    b.l_pos = cl.pos;
    b.l_neg = cl.neg;
    b.l_erm = erm(logits, labels);
    b.l_cls_ineq = cls_ineq(b.l_pos, b.l_neg);
    b.l_gdro = g.value;
    b.l_total = total_loss(alpha, b.l_cls_ineq, b.l_gdro);
    b.w_pos = g.weights.pos;
    b.w_neg = g.weights.neg;
    b.alpha = alpha;
    b.tau = tau;
    return b;
}

}  // namespace clsunbias

#endif  // CLSUNBIAS_OBJECTIVES_HPP_
