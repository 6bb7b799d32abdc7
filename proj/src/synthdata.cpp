#include "clsunbias/synthdata.hpp"

#include "clsunbias/errors.hpp"
#include "clsunbias/rng.hpp"

#include <algorithm>
#include <cmath>

namespace clsunbias {

std::string to_string(data_role role) {
    switch (role) {
        case data_role::train: return "train";
        case data_role::test1: return "test1";
        case data_role::test2: return "test2";
    }
    return "?";
}

data_role parse_data_role(std::string_view name) {
    if (name == "train") {
        return data_role::train;
    }
    if (name == "test1") {
        return data_role::test1;
    }
    if (name == "test2") {
        return data_role::test2;
    }
    throw config_error("unknown role '" + std::string{ name } + "' (expected train, test1, or test2)");
}

MixtureTable::MixtureTable() {
    for (auto &role : prob_high_) {
        role[0] = { 0.15, 0.85 };  // f1: {neg, pos}
    }
    prob_high_[0][1] = { 1.0, 0.5 };
    prob_high_[1][1] = { 0.5, 0.5 };
    prob_high_[2][1] = { 0.5, 1.0 };
}

double MixtureTable::prob_high(data_role role, std::size_t feature, int label) const {
    return prob_high_.at(static_cast<std::size_t>(role)).at(feature).at(static_cast<std::size_t>(label));
}

void MixtureTable::set_prob_high(data_role role, std::size_t feature, int label, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw config_error("mixture probability must lie in [0, 1]");
    }
    prob_high_.at(static_cast<std::size_t>(role)).at(feature).at(static_cast<std::size_t>(label)) = p;
}

void GeneratorConfig::validate() const {
    if (n < 2) {
        throw config_error("n must be >= 2");
    }
    if (!(pos_prior > 0.0 && pos_prior < 1.0)) {
        throw config_error("pos_prior must lie in (0, 1)");
    }
    const double expected_pos = static_cast<double>(n) * pos_prior;
    if (expected_pos < 1.0 || static_cast<double>(n) - expected_pos < 1.0) {
        throw config_error("n * pos_prior and n * (1 - pos_prior) must both be >= 1");
    }
    if (!(sigma > 0.0) || !std::isfinite(mean_a) || !std::isfinite(mean_b)) {
        throw config_error("component means must be finite and sigma > 0");
    }
}

namespace {

// Always consumes one selector uniform and one draw from each component so that the
// stream position of sample i does not depend on earlier outcomes.
double draw_feature(rng &gen, double prob_high, const GeneratorConfig &cfg) {
    const bool high = gen.uniform() < prob_high;
    const double low_draw = gen.normal(cfg.mean_a, cfg.sigma);
    const double high_draw = gen.normal(cfg.mean_b, cfg.sigma);
    return high ? high_draw : low_draw;
}

}  // namespace

Dataset generate(const GeneratorConfig &cfg) {
    cfg.validate();
    rng label_stream{ cfg.seed, "labels" };
    rng f1_stream{ cfg.seed, "f1" };
    rng f2_stream{ cfg.seed, "f2/" + to_string(cfg.role) };

    Dataset ds;
    ds.role = to_string(cfg.role);
    ds.X.resize(cfg.n, 2);
    ds.y.resize(cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i) {
        const int label = label_stream.bernoulli(cfg.pos_prior) ? 1 : 0;
        ds.y[i] = label;
        ds.X(i, 0) = draw_feature(f1_stream, cfg.mixture.prob_high(cfg.role, 0, label), cfg);
        ds.X(i, 1) = draw_feature(f2_stream, cfg.mixture.prob_high(cfg.role, 1, label), cfg);
    }
    return ds;
}

BiasScore bias_score(const Dataset &ds, std::size_t feature, std::size_t bins) {
    ds.validate();
    if (bins < 2) {
        throw domain_error("bias_score needs at least 2 bins");
    }
    if (feature >= static_cast<std::size_t>(ds.num_features())) {
        throw structural_error("feature index " + std::to_string(feature) + " out of range");
    }
    if (ds.size() == 0) {
        throw domain_error("bias_score on an empty dataset");
    }
    const auto column = ds.X.col(static_cast<Eigen::Index>(feature));
    const double lo = column.minCoeff();
    const double hi = column.maxCoeff();
    if (!(hi > lo)) {
        throw degenerate_feature_error("feature " + std::to_string(feature) + " is constant");
    }
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<double> mass(bins, 0.0);
    std::vector<double> pos(bins, 0.0);
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>((column[i] - lo) / width));
        mass[b] += 1.0;
        pos[b] += ds.y[i];
    }
    const double n = static_cast<double>(ds.size());
    const double prior_pos = static_cast<double>(ds.count_pos()) / n;
    const double prior_neg = 1.0 - prior_pos;

    BiasScore score{ feature, bins, 0.0, 0.0 };
    for (std::size_t b = 0; b < bins; ++b) {
        if (mass[b] == 0.0) {
            continue;
        }
        const double post_pos = pos[b] / mass[b];
        const double post_neg = 1.0 - post_pos;
        score.pos += mass[b] / n * std::abs(post_pos - prior_pos);
        score.neg += mass[b] / n * std::abs(post_neg - prior_neg);
    }
    return score;
}

std::vector<BiasScore> bias_report(const Dataset &ds, std::size_t bins) {
    std::vector<BiasScore> out;
    for (Eigen::Index j = 0; j < ds.num_features(); ++j) {
        out.push_back(bias_score(ds, static_cast<std::size_t>(j), bins));
    }
    return out;
}

}  // namespace clsunbias
