#ifndef CLSUNBIAS_TYPES_HPP_
#define CLSUNBIAS_TYPES_HPP_
#pragma once

#include <Eigen/Dense>

namespace clsunbias {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Binary labels, 1 = positive class.
using LabelVector = Eigen::VectorXi;

/// Flat parameter storage. The layout is defined by a ModelSpec.
using ParamVector = Eigen::VectorXd;

/// Same layout as ParamVector.
using Gradient = Eigen::VectorXd;

}  // namespace clsunbias

#endif  // CLSUNBIAS_TYPES_HPP_
