#ifndef CLSUNBIAS_MODELS_HPP_
#define CLSUNBIAS_MODELS_HPP_
#pragma once

#include "clsunbias/errors.hpp"
#include "clsunbias/rng.hpp"
#include "clsunbias/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace clsunbias {

enum class activation { tanh, relu };

/**
 * Architecture descriptor of a binary classifier producing one logit per sample.
 *
 * A model is a chain of affine layers. Hidden layers are followed by the activation,
 * the final layer is affine only. A linear model is the single-layer case. Each layer
 * stores its weight matrix (d_out x d_in, column-major) followed by its bias (d_out)
 * when biases are enabled.
 */
class ModelSpec {
  public:
    enum class kind { linear, mlp };

    /// Linear classifier. No bias by default.
    static ModelSpec linear(Eigen::Index input_dim, bool bias = false) {
        return ModelSpec{ kind::linear, { input_dim, 1 }, activation::tanh, bias };
    }

    /// Fully connected network input_dim -> hidden... -> 1.
    static ModelSpec mlp(Eigen::Index input_dim, const std::vector<Eigen::Index> &hidden, activation act = activation::tanh, bool bias = true) {
        std::vector<Eigen::Index> dims{ input_dim };
        dims.insert(dims.end(), hidden.begin(), hidden.end());
        dims.push_back(1);
        return ModelSpec{ kind::mlp, std::move(dims), act, bias };
    }

    [[nodiscard]] kind architecture() const noexcept { return kind_; }
    [[nodiscard]] activation hidden_activation() const noexcept { return act_; }
    [[nodiscard]] bool has_bias() const noexcept { return bias_; }
    [[nodiscard]] const std::vector<Eigen::Index> &dims() const noexcept { return dims_; }
    [[nodiscard]] Eigen::Index input_dim() const noexcept { return dims_.front(); }
    [[nodiscard]] std::size_t num_layers() const noexcept { return dims_.size() - 1; }
    [[nodiscard]] Eigen::Index fan_in(std::size_t layer) const { return dims_.at(layer); }
    [[nodiscard]] Eigen::Index fan_out(std::size_t layer) const { return dims_.at(layer + 1); }

    /// Offset of layer `layer`'s weight block inside the flat vector.
    [[nodiscard]] Eigen::Index weight_offset(std::size_t layer) const { return offsets_.at(layer); }
    [[nodiscard]] Eigen::Index bias_offset(std::size_t layer) const { return offsets_.at(layer) + fan_in(layer) * fan_out(layer); }

    [[nodiscard]] Eigen::Index param_count() const noexcept { return offsets_.back(); }

    /// Throws structural_error when `params` does not fit this layout.
    template <typename Derived>
    void check_params(const Eigen::MatrixBase<Derived> &params) const {
        if (params.size() != param_count()) {
            throw structural_error("parameter vector has length " + std::to_string(params.size()) + ", model expects " + std::to_string(param_count()));
        }
    }

    [[nodiscard]] std::string describe() const {
        std::string s = kind_ == kind::linear ? "linear(" : "mlp(";
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            s += (i ? "," : "") + std::to_string(dims_[i]);
        }
        s += ")";
        if (kind_ == kind::mlp) {
            s += act_ == activation::tanh ? " tanh" : " relu";
        }
        s += bias_ ? " bias" : " nobias";
        return s;
    }

  private:
    ModelSpec(kind k, std::vector<Eigen::Index> dims, activation act, bool bias) :
        kind_{ k }, dims_{ std::move(dims) }, act_{ act }, bias_{ bias } {
        if (dims_.size() < 2) {
            throw structural_error("model needs at least one layer");
        }
        offsets_.push_back(0);
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            if (dims_[l] < 1 || dims_[l + 1] < 1) {
                throw structural_error("layer dimensions must be >= 1");
            }
            offsets_.push_back(offsets_.back() + dims_[l] * dims_[l + 1] + (bias_ ? dims_[l + 1] : 0));
        }
    }

    kind kind_;
    std::vector<Eigen::Index> dims_;
    activation act_;
    bool bias_;
    std::vector<Eigen::Index> offsets_;
};

namespace detail {

template <typename Scalar>
using ConstMatrixMap = Eigen::Map<const MatrixX<Scalar>>;

template <typename Scalar>
ConstMatrixMap<Scalar> layer_weights(const ModelSpec &spec, const VectorX<Scalar> &params, std::size_t layer) {
    return ConstMatrixMap<Scalar>(params.data() + spec.weight_offset(layer), spec.fan_out(layer), spec.fan_in(layer));
}

template <typename Scalar>
auto layer_bias(const ModelSpec &spec, const VectorX<Scalar> &params, std::size_t layer) {
    return params.segment(spec.bias_offset(layer), spec.fan_out(layer));
}

template <typename Scalar>
void apply_activation(activation act, MatrixX<Scalar> &z) {
    if (act == activation::tanh) {
        z = z.array().tanh().matrix();
    } else {
        z = z.array().max(Scalar(0)).matrix();
    }
}

}  // namespace detail

/// Glorot-uniform weights, zero biases. Deterministic per seed.
inline ParamVector param_init(const ModelSpec &spec, std::uint64_t seed) {
    rng gen{ seed, "param_init" };
    ParamVector params = ParamVector::Zero(spec.param_count());
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in(l) + spec.fan_out(l)));
        const Eigen::Index count = spec.fan_in(l) * spec.fan_out(l);
        for (Eigen::Index i = 0; i < count; ++i) {
            params[spec.weight_offset(l) + i] = gen.uniform(-limit, limit);
        }
    }
    return params;
}

/// Intermediate values of a forward pass, kept for backpropagation.
template <typename Scalar>
struct ForwardTrace {
    /// inputs[l] is the (n x d_l) input of layer l; inputs[0] is X.
    std::vector<MatrixX<Scalar>> inputs;
    VectorX<Scalar> logits;
};

template <typename Scalar, typename Derived>
ForwardTrace<Scalar> forward_trace(const ModelSpec &spec, const VectorX<Scalar> &params, const Eigen::MatrixBase<Derived> &X) {
    spec.check_params(params);
    if (X.cols() != spec.input_dim()) {
        throw structural_error("input has " + std::to_string(X.cols()) + " columns, model expects " + std::to_string(spec.input_dim()));
    }
    ForwardTrace<Scalar> trace;
    trace.inputs.reserve(spec.num_layers());
    trace.inputs.emplace_back(X.template cast<Scalar>());
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        MatrixX<Scalar> z = trace.inputs.back() * detail::layer_weights(spec, params, l).transpose();
        if (spec.has_bias()) {
            z.rowwise() += detail::layer_bias(spec, params, l).transpose();
        }
        if (l + 1 == spec.num_layers()) {
            trace.logits = z.col(0);
        } else {
            detail::apply_activation(spec.hidden_activation(), z);
            trace.inputs.push_back(std::move(z));
        }
    }
    return trace;
}

/// Logits, one per row of X.
template <typename Scalar, typename Derived>
VectorX<Scalar> forward(const ModelSpec &spec, const VectorX<Scalar> &params, const Eigen::MatrixBase<Derived> &X) {
    return forward_trace(spec, params, X).logits;
}

/**
 * Gradient of a scalar objective with respect to all parameters, given the derivative
 * of that objective with respect to each logit.
 */
template <typename Scalar, typename Derived>
VectorX<Scalar> backward(const ModelSpec &spec, const VectorX<Scalar> &params, const ForwardTrace<Scalar> &trace, const Eigen::MatrixBase<Derived> &dlogits) {
    VectorX<Scalar> grad = VectorX<Scalar>::Zero(spec.param_count());
    MatrixX<Scalar> dz = dlogits;  // n x d_out of the current layer
    for (std::size_t l = spec.num_layers(); l-- > 0;) {
        const MatrixX<Scalar> &input = trace.inputs[l];
        Eigen::Map<MatrixX<Scalar>>(grad.data() + spec.weight_offset(l), spec.fan_out(l), spec.fan_in(l)) = dz.transpose() * input;
        if (spec.has_bias()) {
            grad.segment(spec.bias_offset(l), spec.fan_out(l)) = dz.colwise().sum().transpose();
        }
        if (l == 0) {
            break;
        }
        MatrixX<Scalar> dh = dz * detail::layer_weights(spec, params, l);
        // input of layer l is the activated output of layer l-1
        if (spec.hidden_activation() == activation::tanh) {
            dz = dh.array() * (Scalar(1) - input.array().square());
        } else {
            dz = dh.array() * (input.array() > Scalar(0)).template cast<Scalar>();
        }
    }
    return grad;
}

/**
 * Statistics pooling of a (T x d) frame sequence: per-dimension temporal mean,
 * population standard deviation, and mean first-order difference, concatenated.
 */
template <typename Derived>
VectorX<typename Derived::Scalar> stats_pool(const Eigen::MatrixBase<Derived> &frames) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index steps = frames.rows();
    const Eigen::Index d = frames.cols();
    if (steps < 2) {
        throw domain_error("stats_pool needs at least two frames");
    }
    const VectorX<Scalar> mean = frames.colwise().mean().transpose();
    const VectorX<Scalar> stddev = ((frames.rowwise() - mean.transpose()).array().square().colwise().sum() / Scalar(steps)).sqrt().transpose();
    const VectorX<Scalar> drift = ((frames.row(steps - 1) - frames.row(0)) / Scalar(steps - 1)).transpose();
    VectorX<Scalar> pooled(3 * d);
    pooled << mean, stddev, drift;
    return pooled;
}

}  // namespace clsunbias

#endif  // CLSUNBIAS_MODELS_HPP_
