#ifndef CLSUNBIAS_NUMERICS_HPP_
#define CLSUNBIAS_NUMERICS_HPP_
#pragma once

#include "clsunbias/dataset.hpp"
#include "clsunbias/errors.hpp"
#include "clsunbias/models.hpp"
#include "clsunbias/objectives.hpp"
#include "clsunbias/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

namespace clsunbias {

namespace detail {

inline void check_data(const ModelSpec &spec, const ParamVector &params, const ObjectiveSpec &objective, const Dataset &data) {
    spec.check_params(params);
    if (data.size() == 0) {
        throw domain_error("empty dataset");
    }
    if (objective.needs_both_classes()) {
        if (data.count_pos() == 0) {
            throw empty_class_error(class_label::pos);
        }
        if (data.count_neg() == 0) {
            throw empty_class_error(class_label::neg);
        }
    }
}

}  // namespace detail

/// Objective value and its exact gradient with respect to every parameter.
inline std::pair<double, Gradient> value_and_grad(const ModelSpec &spec, const ParamVector &params, const ObjectiveSpec &objective, const Dataset &data) {
    detail::check_data(spec, params, objective, data);
    const ForwardTrace<double> trace = forward_trace(spec, params, data.X);
    const ObjectiveValue<double> obj = evaluate_objective(objective, trace.logits, data.y);
    Gradient grad = backward(spec, params, trace, obj.dlogits);
    if (!grad.allFinite()) {
        throw numerical_overflow_error("non-finite gradient");
    }
    return { obj.value, std::move(grad) };
}

/// Central differences of an arbitrary scalar function.
template <typename Function>
Gradient finite_diff_grad(Function &&f, const ParamVector &params, double h) {
    if (!(h > 0.0)) {
        throw domain_error("finite difference step must be > 0");
    }
    Gradient grad(params.size());
    ParamVector probe = params;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        probe[i] = params[i] + h;
        const double up = f(probe);
        probe[i] = params[i] - h;
        const double down = f(probe);
        probe[i] = params[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

/**
 * Central-difference gradient of an objective. G-DRO weights are computed once at
 * `params` and held fixed for every perturbed evaluation.
 */
inline Gradient finite_diff_grad(const ModelSpec &spec, const ParamVector &params, const ObjectiveSpec &objective, const Dataset &data, double h) {
    detail::check_data(spec, params, objective, data);
    std::optional<GdroWeights<double>> frozen;
    if (objective.has_gdro_weights()) {
        const auto cl = class_losses(forward(spec, params, data.X), data.y);
        frozen = gdro_weights(cl.pos, cl.neg, objective.tau);
    }
    return finite_diff_grad(
        [&](const ParamVector &p) { return evaluate_objective(objective, forward(spec, p, data.X), data.y, frozen).value; },
        params, h);
}

/// Adam moments. Defaults follow the usual beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
template <typename Scalar>
struct AdamState {
    VectorX<Scalar> m;
    VectorX<Scalar> v;
    std::size_t t{ 0 };
    Scalar beta1{ 0.9 };
    Scalar beta2{ 0.999 };
    Scalar eps{ 1e-8 };

    static AdamState zeros(Eigen::Index n) { return { VectorX<Scalar>::Zero(n), VectorX<Scalar>::Zero(n) }; }
};

/**
 * One Adam step with bias correction, followed by decoupled weight decay
 * theta <- theta - lr * weight_decay * theta.
 */
template <typename Scalar>
std::pair<AdamState<Scalar>, VectorX<Scalar>> adam_step(AdamState<Scalar> state, VectorX<Scalar> params, const VectorX<Scalar> &grad, Scalar lr, Scalar weight_decay) {
    using std::pow;
    using std::sqrt;
    if (params.size() != grad.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw structural_error("adam_step: parameter, gradient, and moment lengths differ");
    }
    if (lr < Scalar(0) || weight_decay < Scalar(0)) {
        throw domain_error("adam_step: lr and weight decay must be >= 0");
    }
    state.t += 1;
    state.m = state.beta1 * state.m + (Scalar(1) - state.beta1) * grad;
    state.v = state.beta2 * state.v + (Scalar(1) - state.beta2) * grad.cwiseProduct(grad);
    const Scalar correction1 = Scalar(1) - pow(state.beta1, Scalar(state.t));
    const Scalar correction2 = Scalar(1) - pow(state.beta2, Scalar(state.t));
    params.array() -= lr * (state.m.array() / correction1) / ((state.v.array() / correction2).sqrt() + state.eps);
    params *= Scalar(1) - lr * weight_decay;
    return { std::move(state), std::move(params) };
}

/// Linear warmup from 0 to the peak over ceil(warmup_ratio * T) steps, then cosine decay to 0 at T.
struct LRSchedule {
    double peak_lr{ 1e-3 };
    double warmup_ratio{ 0.0 };
    std::size_t total_iterations{ 1 };

    [[nodiscard]] std::size_t warmup_steps() const {
        // guard against ratio * T landing a hair above an integer
        return static_cast<std::size_t>(std::ceil(warmup_ratio * static_cast<double>(total_iterations) - 1e-9));
    }
};

inline double cosine_warmup_lr(const LRSchedule &sched, std::size_t t) {
    if (!(sched.peak_lr > 0.0) || sched.warmup_ratio < 0.0 || sched.warmup_ratio > 1.0 || sched.total_iterations < 1) {
        throw domain_error("invalid learning-rate schedule");
    }
    if (t > sched.total_iterations) {
        throw domain_error("lr schedule: t = " + std::to_string(t) + " beyond T = " + std::to_string(sched.total_iterations));
    }
    const std::size_t warmup = sched.warmup_steps();
    if (warmup > 0 && t <= warmup) {
        return sched.peak_lr * (static_cast<double>(t) / static_cast<double>(warmup));
    }
    if (warmup >= sched.total_iterations) {
        return sched.peak_lr;
    }
    const double progress = static_cast<double>(t - warmup) / static_cast<double>(sched.total_iterations - warmup);
    return sched.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace clsunbias

#endif  // CLSUNBIAS_NUMERICS_HPP_
