#ifndef CLSUNBIAS_ERRORS_HPP_
#define CLSUNBIAS_ERRORS_HPP_
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clsunbias {

/// Base of every error raised by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shapes or parameter layouts that do not agree.
class structural_error : public error {
  public:
    using error::error;
};

/// Argument outside the domain of an operation (negative temperature, t > T, ...).
class domain_error : public error {
  public:
    using error::error;
};

enum class class_label { neg = 0, pos = 1 };

inline const char *to_string(class_label c) { return c == class_label::pos ? "pos" : "neg"; }

/// A class-partitioned objective was evaluated on a batch missing one class.
class empty_class_error : public error {
  public:
    explicit empty_class_error(class_label missing, const std::string &context = {}) :
        error(std::string{ "empty class: no samples with label " } + to_string(missing) + (context.empty() ? "" : " (" + context + ")")),
        missing_{ missing } {}
    [[nodiscard]] class_label missing() const noexcept { return missing_; }

  private:
    class_label missing_;
};

class numerical_overflow_error : public error {
  public:
    using error::error;
};

class config_error : public error {
  public:
    using error::error;
};

class degenerate_feature_error : public error {
  public:
    using error::error;
};

class degenerate_weights_error : public error {
  public:
    using error::error;
};

class io_error : public error {
  public:
    using error::error;
};

/// Training produced a non-finite loss.
class diverged_error : public error {
  public:
    diverged_error(std::size_t iteration, const std::string &what) :
        error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_{ iteration } {}
    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

  private:
    std::size_t iteration_;
};

}  // namespace clsunbias

#endif  // CLSUNBIAS_ERRORS_HPP_
