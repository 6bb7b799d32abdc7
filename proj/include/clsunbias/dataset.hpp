#ifndef CLSUNBIAS_DATASET_HPP_
#define CLSUNBIAS_DATASET_HPP_
#pragma once

#include "clsunbias/types.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace clsunbias {

/// Feature matrix (one row per sample) with binary labels.
struct Dataset {
    Eigen::MatrixXd X;
    LabelVector y;
    std::string role;

    [[nodiscard]] Eigen::Index size() const noexcept { return y.size(); }
    [[nodiscard]] Eigen::Index num_features() const noexcept { return X.cols(); }
    [[nodiscard]] Eigen::Index count_pos() const { return y.sum(); }
    [[nodiscard]] Eigen::Index count_neg() const { return size() - count_pos(); }

    /// Throws structural_error / domain_error on inconsistent shapes or labels.
    void validate() const;

    /// Rows selected by `indices`, in that order.
    [[nodiscard]] Dataset subset(const std::vector<Eigen::Index> &indices) const;
};

/// Writes `f1,f2,...,label` with 9 significant digits.
void write_csv(const Dataset &ds, const std::filesystem::path &path);

/// Reads the format produced by write_csv.
Dataset read_csv(const std::filesystem::path &path);

}  // namespace clsunbias

#endif  // CLSUNBIAS_DATASET_HPP_
