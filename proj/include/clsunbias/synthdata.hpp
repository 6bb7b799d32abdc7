#ifndef CLSUNBIAS_SYNTHDATA_HPP_
#define CLSUNBIAS_SYNTHDATA_HPP_
#pragma once

#include "clsunbias/dataset.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clsunbias {

/// The three two-feature datasets of the class-feature-bias benchmark.
enum class data_role { train, test1, test2 };

std::string to_string(data_role role);
data_role parse_data_role(std::string_view name);

/**
 * Probability that a feature is drawn from the high component N(mean_b, sigma^2)
 * rather than the low one N(mean_a, sigma^2), per role, feature, and class.
 *
 * Defaults:
 *   f1 (class-shared)   pos 0.85, neg 0.15 in every role
 *   f2 train            pos 0.5,  neg 1.0   low f2 only occurs for positives
 *   f2 test1            pos 0.5,  neg 0.5   f2 carries no label information
 *   f2 test2            pos 1.0,  neg 0.5   the training association is reversed
 */
class MixtureTable {
  public:
    static constexpr std::size_t num_features = 2;

    MixtureTable();

    [[nodiscard]] double prob_high(data_role role, std::size_t feature, int label) const;
    void set_prob_high(data_role role, std::size_t feature, int label, double p);

  private:
    // [role][feature][label]
    std::array<std::array<std::array<double, 2>, num_features>, 3> prob_high_{};
};

struct GeneratorConfig {
    data_role role{ data_role::train };
    Eigen::Index n{ 2000 };
    double pos_prior{ 0.5 };
    double mean_a{ 0.0 };
    double mean_b{ 5.0 };
    double sigma{ 1.0 };
    std::uint64_t seed{ 0 };
    MixtureTable mixture;

    /// Throws config_error.
    void validate() const;
};

/**
 * Draws a dataset. Labels are Bernoulli(pos_prior); each feature picks the low or the
 * high Gaussian component according to the mixture table.
 *
 * Labels and f1 come from streams that depend only on the seed, so configs that differ
 * only in role share the label sequence and the f1 column.
 */
Dataset generate(const GeneratorConfig &cfg);

/// Per-class score in [0, 1]: bin-mass-weighted |P(y=c | bin) - P(y=c)|.
struct BiasScore {
    std::size_t feature{};
    std::size_t bins{};
    double pos{};
    double neg{};
};

/// Equal-width binning over the observed range of one feature.
BiasScore bias_score(const Dataset &ds, std::size_t feature, std::size_t bins = 20);

/// bias_score for every feature.
std::vector<BiasScore> bias_report(const Dataset &ds, std::size_t bins = 20);

}  // namespace clsunbias

#endif  // CLSUNBIAS_SYNTHDATA_HPP_
