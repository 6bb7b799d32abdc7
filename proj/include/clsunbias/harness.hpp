#ifndef CLSUNBIAS_HARNESS_HPP_
#define CLSUNBIAS_HARNESS_HPP_
#pragma once

#include "clsunbias/dataset.hpp"
#include "clsunbias/metrics.hpp"
#include "clsunbias/models.hpp"
#include "clsunbias/objectives.hpp"
#include "clsunbias/synthdata.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clsunbias {

enum class method { erm, erm_cls_w, erm_per_cls, gdro_only, cls_unbias };

std::string to_string(method m);
method parse_method(std::string_view name);

/// Everything one training run needs.
struct TrainConfig {
    method objective{ method::cls_unbias };
    double lr{ 0.05 };
    std::size_t iterations{ 2000 };
    /// Absent means full batch.
    std::optional<std::size_t> batch_size;
    double warmup_ratio{ 0.1 };
    double weight_decay{ 0.0 };
    double alpha_init{ 0.0 };
    double alpha_end{ 1.0 };
    double tau_init{ 2.0 };
    double tau_end{ 0.01 };
    ModelSpec model{ ModelSpec::linear(2) };
    std::uint64_t seed{ 0 };

    /// Throws config_error.
    void validate() const;

    [[nodiscard]] ScheduleSpec alpha_schedule() const { return { alpha_init, alpha_end, iterations }; }
    [[nodiscard]] ScheduleSpec tau_schedule() const { return { tau_init, tau_end, iterations }; }
    /// Validation is evaluated every max(1, T/50) iterations and at the last one.
    [[nodiscard]] std::size_t eval_every() const { return std::max<std::size_t>(1, iterations / 50); }
};

/// Objective optimized by `m` at one iteration.
ObjectiveSpec objective_for(method m, double alpha, double tau, const Dataset &train);

struct ValidationPoint {
    std::size_t iteration{};
    LossBreakdown losses;
    MetricsReport metrics;
};

struct RunRecord {
    /// One entry per iteration, measured on the full training set before that iteration's update.
    std::vector<LossBreakdown> train_curve;
    std::vector<double> lr_curve;
    std::vector<ValidationPoint> validation;
    /// Metrics of the final parameters, keyed by split name.
    std::map<std::string, MetricsReport> final_metrics;
    std::optional<Eigen::VectorXd> final_weights;
};

struct TrainResult {
    ParamVector params;
    RunRecord record;
};

/// Throws diverged_error (with iteration) or empty_class_error.
TrainResult train(const TrainConfig &cfg, const Dataset &train_ds, const Dataset &valid_ds);

/// Data-side settings of an experiment.
struct DataConfig {
    Eigen::Index n_train{ 2000 };
    Eigen::Index n_test{ 2000 };
    double pos_prior{ 0.5 };
    double test_pos_prior{ 0.5 };
    double mean_a{ 0.0 };
    double mean_b{ 5.0 };
    double sigma{ 1.0 };
    MixtureTable mixture;
};

/// train, valid (an i.i.d. holdout drawn like train), test1, test2.
struct Benchmark {
    Dataset train;
    Dataset valid;
    Dataset test1;
    Dataset test2;

    [[nodiscard]] std::vector<std::pair<std::string, const Dataset *>> splits() const {
        return { { "train", &train }, { "valid", &valid }, { "test1", &test1 }, { "test2", &test2 } };
    }
};

Benchmark make_benchmark(const DataConfig &cfg, std::uint64_t master_seed);

struct ExperimentConfig {
    TrainConfig train;
    std::vector<method> methods{ method::erm, method::cls_unbias };
    std::size_t seeds{ 5 };
    std::uint64_t master_seed{ 2024 };
    DataConfig data;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Every key with its effective value, one per line, in a fixed order.
std::string resolved_config(const ExperimentConfig &cfg);

struct RunOutcome {
    std::size_t index{};
    std::uint64_t seed{};
    std::optional<ParamVector> params;
    RunRecord record;
    /// Set when the run diverged; the run is then excluded from aggregates.
    std::optional<std::string> failure;
};

struct MetricSummary {
    double mean{};
    double stddev{};
};

struct SplitAggregate {
    MetricSummary pos_f1;
    MetricSummary neg_f1;
    MetricSummary mf1;
    MetricSummary accuracy;
    MetricSummary pos_acc;
    MetricSummary neg_acc;
    std::size_t collapsed_runs{};
};

struct AggregateResult {
    method objective{};
    std::size_t seed_count{};
    std::size_t diverged{};
    std::map<std::string, SplitAggregate> splits;
    std::vector<RunOutcome> runs;
};

/// Run `k` seeds of one method (seed_i = derive_seed(master_seed, i)) concurrently and aggregate.
AggregateResult multi_seed(const TrainConfig &base, method m, std::size_t k, std::uint64_t master_seed, const Benchmark &data);

/// All methods of an experiment, each with paired seeds on the same data.
std::vector<AggregateResult> run_experiment(const ExperimentConfig &cfg);

/// Writes summary.csv, curves_<method>_<i>.csv, weights_<method>.csv, and config.resolved.
void emit(const std::vector<AggregateResult> &results, const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

}  // namespace clsunbias

#endif  // CLSUNBIAS_HARNESS_HPP_
