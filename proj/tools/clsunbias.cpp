// Command-line front end: run experiments, generate benchmark splits, score feature bias.

#include "clsunbias/dataset.hpp"
#include "clsunbias/errors.hpp"
#include "clsunbias/harness.hpp"
#include "clsunbias/synthdata.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum exit_code : int { ok = 0, usage = 1, config = 2, diverged = 3, io = 4 };

int run_command(const std::string &config_path, const std::string &out_dir, std::optional<std::size_t> seeds, const std::optional<std::string> &method_name) {
    using namespace clsunbias;
    ExperimentConfig cfg = load_config(config_path);
    if (seeds) {
        if (*seeds < 1) {
            throw config_error("--seeds must be >= 1");
        }
        cfg.seeds = *seeds;
    }
    if (method_name) {
        cfg.methods = { parse_method(*method_name) };
    }
    const auto results = run_experiment(cfg);
    emit(results, cfg, out_dir);

    int status = exit_code::ok;
    for (const AggregateResult &agg : results) {
        const SplitAggregate &t2 = agg.splits.at("test2");
        std::printf("%-12s seeds=%zu diverged=%zu test2 mf1=%.4f+-%.4f acc=%.4f\n", to_string(agg.objective).c_str(), agg.seed_count, agg.diverged, t2.mf1.mean,
                    t2.mf1.stddev, t2.accuracy.mean);
        for (const RunOutcome &run : agg.runs) {
            if (run.failure) {
                std::fprintf(stderr, "%s seed %zu: %s\n", to_string(agg.objective).c_str(), run.index, run.failure->c_str());
                status = exit_code::diverged;
            }
        }
    }
    return status;
}

int gen_data_command(const std::string &role, Eigen::Index n, double pos_prior, std::uint64_t seed, const std::string &out) {
    using namespace clsunbias;
    GeneratorConfig cfg;
    cfg.role = parse_data_role(role);
    cfg.n = n;
    cfg.pos_prior = pos_prior;
    cfg.seed = seed;
    write_csv(generate(cfg), out);
    return exit_code::ok;
}

int bias_score_command(const std::string &data, std::size_t feature, std::size_t bins) {
    using namespace clsunbias;
    const Dataset ds = read_csv(data);
    const BiasScore s = bias_score(ds, feature, bins);
    std::printf("feature=%zu bins=%zu pos=%.6f neg=%.6f\n", s.feature, s.bins, s.pos, s.neg);
    return exit_code::ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Class-unbiased training toolkit" };
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::size_t> seeds;
    std::optional<std::string> method_name;
    auto *run = app.add_subcommand("run", "Train every configured method over several seeds and write result tables");
    run->add_option("--config", config_path, "key = value configuration file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seeds", seeds, "Override the seed count");
    run->add_option("--method", method_name, "Run only this method");

    std::string role{ "train" };
    Eigen::Index n{ 2000 };
    double pos_prior{ 0.5 };
    std::uint64_t seed{ 0 };
    std::string out_csv;
    auto *gen = app.add_subcommand("gen-data", "Write one synthetic split as CSV");
    gen->add_option("--role", role, "train, test1, or test2");
    gen->add_option("--n", n, "Number of samples");
    gen->add_option("--pos-prior", pos_prior, "Probability of the positive class");
    gen->add_option("--seed", seed, "Generator seed");
    gen->add_option("--out", out_csv, "Output CSV path")->required();

    std::string data;
    std::size_t feature{ 1 };
    std::size_t bins{ 20 };
    auto *bias = app.add_subcommand("bias-score", "Per-class bias score of one feature");
    bias->add_option("--data", data, "Input CSV (f1,f2,label)")->required();
    bias->add_option("--feature", feature, "Feature column, 0-based");
    bias->add_option("--bins", bins, "Number of equal-width bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? exit_code::ok : exit_code::usage;
    }

    try {
        if (*run) {
            return run_command(config_path, out_dir, seeds, method_name);
        }
        if (*gen) {
            return gen_data_command(role, n, pos_prior, seed, out_csv);
        }
        return bias_score_command(data, feature, bins);
    } catch (const clsunbias::config_error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::config;
    } catch (const clsunbias::diverged_error &e) {
        std::cerr << e.what() << '\n';
        return exit_code::diverged;
    } catch (const clsunbias::io_error &e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_code::io;
    } catch (const clsunbias::error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::config;
    }
}
