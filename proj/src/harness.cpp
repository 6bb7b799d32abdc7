#include "clsunbias/harness.hpp"

#include "clsunbias/errors.hpp"
#include "clsunbias/numerics.hpp"
#include "clsunbias/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <sstream>
#include <utility>

namespace clsunbias {

std::string to_string(method m) {
    switch (m) {
        case method::erm: return "erm";
        case method::erm_cls_w: return "erm_cls_w";
        case method::erm_per_cls: return "erm_per_cls";
        case method::gdro_only: return "gdro_only";
        case method::cls_unbias: return "cls_unbias";
    }
    return "?";
}

method parse_method(std::string_view name) {
    for (const method m : { method::erm, method::erm_cls_w, method::erm_per_cls, method::gdro_only, method::cls_unbias }) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw config_error("unknown method '" + std::string{ name } + "'");
}

void TrainConfig::validate() const {
    if (iterations < 1) {
        throw config_error("iterations must be >= 1");
    }
    if (!(lr > 0.0)) {
        throw config_error("lr must be > 0");
    }
    if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0)) {
        throw config_error("warmup_ratio must lie in [0, 1]");
    }
    if (!(weight_decay >= 0.0)) {
        throw config_error("weight_decay must be >= 0");
    }
    if (!(alpha_init >= 0.0 && alpha_end >= 0.0)) {
        throw config_error("alpha schedule must be >= 0");
    }
    if (!(tau_init > 0.0 && tau_end > 0.0)) {
        throw config_error("tau schedule must be > 0");
    }
    if (batch_size && *batch_size < 1) {
        throw config_error("batch_size must be >= 1");
    }
}

ObjectiveSpec objective_for(method m, double alpha, double tau, const Dataset &train) {
    switch (m) {
        case method::erm: return ObjectiveSpec::make_erm();
        case method::erm_cls_w: {
            // inverse class frequency, mean weight over samples = 1
            const auto n = static_cast<double>(train.size());
            const auto n_pos = static_cast<double>(train.count_pos());
            const auto n_neg = static_cast<double>(train.count_neg());
            if (n_pos == 0.0) {
                throw empty_class_error(class_label::pos, "class weights");
            }
            if (n_neg == 0.0) {
                throw empty_class_error(class_label::neg, "class weights");
            }
            return ObjectiveSpec::make_erm_cls_w(n / (2.0 * n_pos), n / (2.0 * n_neg));
        }
        case method::erm_per_cls: return ObjectiveSpec::make_erm_per_cls();
        case method::gdro_only: return ObjectiveSpec::make_gdro(tau);
        case method::cls_unbias: return ObjectiveSpec::make_total(alpha, tau);
    }
    throw config_error("unknown method");
}

namespace {

std::string at_iteration(std::size_t t) { return "iteration " + std::to_string(t); }

bool finite(const LossBreakdown &b) {
    return std::isfinite(b.l_pos) && std::isfinite(b.l_neg) && std::isfinite(b.l_total) && std::isfinite(b.l_erm);
}

LossBreakdown breakdown_on(const ModelSpec &spec, const ParamVector &params, const Dataset &ds, double alpha, double tau, std::size_t t) {
    try {
        return loss_breakdown(forward(spec, params, ds.X), ds.y, alpha, tau);
    } catch (const empty_class_error &e) {
        throw empty_class_error(e.missing(), ds.role + " split, " + at_iteration(t));
    } catch (const domain_error &e) {
        throw diverged_error(t, e.what());
    }
}

/// Per-epoch shuffled mini-batches; the full set when no batch size is given.
class BatchSampler {
  public:
    BatchSampler(const Dataset &ds, std::optional<std::size_t> batch_size, std::uint64_t seed) :
        ds_{ ds }, batch_size_{ batch_size }, gen_{ seed, "batches" }, order_(static_cast<std::size_t>(ds.size())) {
        std::iota(order_.begin(), order_.end(), Eigen::Index{ 0 });
    }

    const Dataset &next() {
        if (!batch_size_ || *batch_size_ >= order_.size()) {
            return ds_;
        }
        if (cursor_ == 0) {
            for (std::size_t i = order_.size() - 1; i > 0; --i) {
                std::swap(order_[i], order_[gen_.index(i + 1)]);
            }
        }
        const std::size_t end = std::min(cursor_ + *batch_size_, order_.size());
        batch_ = ds_.subset({ order_.begin() + static_cast<std::ptrdiff_t>(cursor_), order_.begin() + static_cast<std::ptrdiff_t>(end) });
        cursor_ = end == order_.size() ? 0 : end;
        return batch_;
    }

  private:
    const Dataset &ds_;
    std::optional<std::size_t> batch_size_;
    rng gen_;
    std::vector<Eigen::Index> order_;
    std::size_t cursor_{ 0 };
    Dataset batch_;
};

}  // namespace

TrainResult train(const TrainConfig &cfg, const Dataset &train_ds, const Dataset &valid_ds) {
    cfg.validate();
    train_ds.validate();
    valid_ds.validate();

    const ModelSpec &spec = cfg.model;
    const LRSchedule lr_schedule{ cfg.lr, cfg.warmup_ratio, cfg.iterations };
    const ScheduleSpec alpha_schedule = cfg.alpha_schedule();
    const ScheduleSpec tau_schedule = cfg.tau_schedule();

    TrainResult result;
    result.params = param_init(spec, derive_seed(cfg.seed, stream_id("init")));
    auto adam = AdamState<double>::zeros(spec.param_count());
    BatchSampler sampler{ train_ds, cfg.batch_size, cfg.seed };
    RunRecord &record = result.record;
    record.train_curve.reserve(cfg.iterations);
    record.lr_curve.reserve(cfg.iterations);

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        const double alpha = schedule_value(alpha_schedule, t);
        const double tau = schedule_value(tau_schedule, t);
        const double lr = cosine_warmup_lr(lr_schedule, t);

        const LossBreakdown losses = breakdown_on(spec, result.params, train_ds, alpha, tau, t);
        if (!finite(losses)) {
            throw diverged_error(t, "non-finite training loss");
        }
        record.train_curve.push_back(losses);
        record.lr_curve.push_back(lr);

        if (t % cfg.eval_every() == 0 || t + 1 == cfg.iterations) {
            ValidationPoint point;
            point.iteration = t;
            point.losses = breakdown_on(spec, result.params, valid_ds, alpha, tau, t);
            point.metrics = evaluate_model(spec, result.params, valid_ds.X, valid_ds.y);
            record.validation.push_back(std::move(point));
        }

        const Dataset &batch = sampler.next();
        Gradient grad;
        try {
            grad = value_and_grad(spec, result.params, objective_for(cfg.objective, alpha, tau, train_ds), batch).second;
        } catch (const numerical_overflow_error &e) {
            throw diverged_error(t, e.what());
        } catch (const empty_class_error &e) {
            throw empty_class_error(e.missing(), "training batch, " + at_iteration(t));
        }
        std::tie(adam, result.params) = adam_step(std::move(adam), std::move(result.params), grad, lr, cfg.weight_decay);
        if (!result.params.allFinite()) {
            throw diverged_error(t, "non-finite parameters after update");
        }
    }

    record.final_metrics["train"] = evaluate_model(spec, result.params, train_ds.X, train_ds.y);
    record.final_metrics["valid"] = evaluate_model(spec, result.params, valid_ds.X, valid_ds.y);
    if (spec.architecture() == ModelSpec::kind::linear) {
        try {
            record.final_weights = normalized_weights(spec, result.params);
        } catch (const degenerate_weights_error &) {
            // all-zero weights: nothing to report
        }
    }
    return result;
}

Benchmark make_benchmark(const DataConfig &cfg, std::uint64_t master_seed) {
    auto make = [&](data_role role, Eigen::Index n, double prior, std::string_view stream, std::string name) {
        GeneratorConfig g;
        g.role = role;
        g.n = n;
        g.pos_prior = prior;
        g.mean_a = cfg.mean_a;
        g.mean_b = cfg.mean_b;
        g.sigma = cfg.sigma;
        g.mixture = cfg.mixture;
        g.seed = derive_seed(master_seed, stream_id(stream));
        Dataset ds = generate(g);
        ds.role = std::move(name);
        return ds;
    };
    return { make(data_role::train, cfg.n_train, cfg.pos_prior, "data/train", "train"),
             make(data_role::train, cfg.n_train, cfg.pos_prior, "data/valid", "valid"),
             make(data_role::test1, cfg.n_test, cfg.test_pos_prior, "data/test1", "test1"),
             make(data_role::test2, cfg.n_test, cfg.test_pos_prior, "data/test2", "test2") };
}

namespace {

MetricSummary summarize(const std::vector<double> &values) {
    if (values.empty()) {
        return { std::nan(""), std::nan("") };
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sq = 0.0;
    for (const double v : values) {
        sq += (v - mean) * (v - mean);
    }
    return { mean, std::sqrt(sq / n) };
}

}  // namespace

AggregateResult multi_seed(const TrainConfig &base, method m, std::size_t k, std::uint64_t master_seed, const Benchmark &data) {
    if (k < 1) {
        throw config_error("seed count must be >= 1");
    }
    AggregateResult agg;
    agg.objective = m;
    agg.seed_count = k;

    std::vector<std::future<RunOutcome>> pending;
    for (std::size_t i = 0; i < k; ++i) {
        TrainConfig cfg = base;
        cfg.objective = m;
        cfg.seed = derive_seed(master_seed, i);
        pending.push_back(std::async(std::launch::async, [cfg, i, &data] {
            RunOutcome run;
            run.index = i;
            run.seed = cfg.seed;
            try {
                TrainResult r = train(cfg, data.train, data.valid);
                for (const auto &[name, ds] : data.splits()) {
                    r.record.final_metrics[name] = evaluate_model(cfg.model, r.params, ds->X, ds->y);
                }
                run.params = std::move(r.params);
                run.record = std::move(r.record);
            } catch (const diverged_error &e) {
                run.failure = e.what();
            }
            return run;
        }));
    }
    for (auto &f : pending) {
        agg.runs.push_back(f.get());
    }

    for (const auto &[name, ds] : data.splits()) {
        std::vector<double> pos_f1, neg_f1, mf1, acc, pos_acc, neg_acc;
        SplitAggregate split;
        for (const RunOutcome &run : agg.runs) {
            if (run.failure) {
                continue;
            }
            const MetricsReport &r = run.record.final_metrics.at(name);
            pos_f1.push_back(r.pos_f1);
            neg_f1.push_back(r.neg_f1);
            mf1.push_back(r.mf1);
            acc.push_back(r.accuracy);
            pos_acc.push_back(r.pos_acc);
            neg_acc.push_back(r.neg_acc);
            split.collapsed_runs += r.collapsed() ? 1 : 0;
        }
        split.pos_f1 = summarize(pos_f1);
        split.neg_f1 = summarize(neg_f1);
        split.mf1 = summarize(mf1);
        split.accuracy = summarize(acc);
        split.pos_acc = summarize(pos_acc);
        split.neg_acc = summarize(neg_acc);
        agg.splits[name] = split;
    }
    for (const RunOutcome &run : agg.runs) {
        agg.diverged += run.failure ? 1 : 0;
    }
    return agg;
}

std::vector<AggregateResult> run_experiment(const ExperimentConfig &cfg) {
    cfg.train.validate();
    const Benchmark data = make_benchmark(cfg.data, cfg.master_seed);
    std::vector<AggregateResult> out;
    for (const method m : cfg.methods) {
        out.push_back(multi_seed(cfg.train, m, cfg.seeds, cfg.master_seed, data));
    }
    return out;
}

// ---------------------------------------------------------------------------
// configuration text

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string{ s.substr(first, last - first + 1) };
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string &key, const std::string &value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != value.size() || !std::isfinite(v)) {
        throw config_error(key + ": expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t to_uint(const std::string &key, const std::string &value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
        throw config_error(key + ": expected a non-negative integer, got '" + value + "'");
    }
    try {
        return std::stoull(value);
    } catch (const std::exception &) {
        throw config_error(key + ": integer out of range");
    }
}

bool to_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw config_error(key + ": expected true or false, got '" + value + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct ModelFields {
    std::string kind{ "linear" };
    std::vector<Eigen::Index> hidden{ 16, 16 };
    activation act{ activation::tanh };
    std::optional<bool> bias;
};

ModelSpec build_model(const ModelFields &f) {
    if (f.kind == "linear") {
        return ModelSpec::linear(2, f.bias.value_or(false));
    }
    if (f.kind == "mlp") {
        return ModelSpec::mlp(2, f.hidden, f.act, f.bias.value_or(true));
    }
    throw config_error("model: expected linear or mlp, got '" + f.kind + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    ModelFields model;
    std::istringstream in{ std::string{ text } };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view{ line }.substr(0, eq));
        const std::string value = trim(std::string_view{ line }.substr(eq + 1));
        TrainConfig &t = cfg.train;
        DataConfig &d = cfg.data;

        if (key == "method") {
            cfg.methods.clear();
            for (const auto &name : split_list(value)) {
                cfg.methods.push_back(parse_method(name));
            }
            if (cfg.methods.empty()) {
                throw config_error("method: empty list");
            }
        } else if (key == "lr") {
            t.lr = to_double(key, value);
        } else if (key == "iterations") {
            t.iterations = to_uint(key, value);
        } else if (key == "batch_size") {
            if (value == "full") {
                t.batch_size.reset();
            } else {
                t.batch_size = to_uint(key, value);
            }
        } else if (key == "warmup_ratio") {
            t.warmup_ratio = to_double(key, value);
        } else if (key == "weight_decay") {
            t.weight_decay = to_double(key, value);
        } else if (key == "alpha_init") {
            t.alpha_init = to_double(key, value);
        } else if (key == "alpha_end") {
            t.alpha_end = to_double(key, value);
        } else if (key == "tau_init") {
            t.tau_init = to_double(key, value);
        } else if (key == "tau_end") {
            t.tau_end = to_double(key, value);
        } else if (key == "model") {
            model.kind = value;
        } else if (key == "hidden") {
            model.hidden.clear();
            for (const auto &item : split_list(value)) {
                model.hidden.push_back(static_cast<Eigen::Index>(to_uint(key, item)));
            }
        } else if (key == "activation") {
            if (value != "tanh" && value != "relu") {
                throw config_error("activation: expected tanh or relu");
            }
            model.act = value == "tanh" ? activation::tanh : activation::relu;
        } else if (key == "bias") {
            model.bias = to_bool(key, value);
        } else if (key == "seeds") {
            cfg.seeds = to_uint(key, value);
        } else if (key == "master_seed") {
            cfg.master_seed = to_uint(key, value);
        } else if (key == "n_train") {
            d.n_train = static_cast<Eigen::Index>(to_uint(key, value));
        } else if (key == "n_test") {
            d.n_test = static_cast<Eigen::Index>(to_uint(key, value));
        } else if (key == "pos_prior") {
            d.pos_prior = to_double(key, value);
        } else if (key == "test_pos_prior") {
            d.test_pos_prior = to_double(key, value);
        } else if (key == "mean_a") {
            d.mean_a = to_double(key, value);
        } else if (key == "mean_b") {
            d.mean_b = to_double(key, value);
        } else if (key == "sigma") {
            d.sigma = to_double(key, value);
        } else if (key.rfind("mixture.", 0) == 0) {
            // mixture.<role>.<f1|f2>.<pos|neg>
            std::vector<std::string> parts;
            std::stringstream ks(key);
            std::string part;
            while (std::getline(ks, part, '.')) {
                parts.push_back(part);
            }
            if (parts.size() != 4 || (parts[2] != "f1" && parts[2] != "f2") || (parts[3] != "pos" && parts[3] != "neg")) {
                throw config_error("unknown key '" + key + "' (expected mixture.<role>.<f1|f2>.<pos|neg>)");
            }
            d.mixture.set_prob_high(parse_data_role(parts[1]), parts[2] == "f1" ? 0 : 1, parts[3] == "pos" ? 1 : 0, to_double(key, value));
        } else {
            throw config_error("unknown key '" + key + "'");
        }
    }
    try {
        cfg.train.model = build_model(model);
    } catch (const structural_error &e) {
        throw config_error(std::string{ "model: " } + e.what());
    }
    if (cfg.seeds < 1) {
        throw config_error("seeds must be >= 1");
    }
    cfg.train.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string resolved_config(const ExperimentConfig &cfg) {
    const TrainConfig &t = cfg.train;
    const DataConfig &d = cfg.data;
    std::ostringstream out;
    out << "method = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        out << (i ? "," : "") << to_string(cfg.methods[i]);
    }
    out << '\n';
    out << "lr = " << fmt(t.lr) << '\n';
    out << "iterations = " << t.iterations << '\n';
    out << "batch_size = " << (t.batch_size ? std::to_string(*t.batch_size) : "full") << '\n';
    out << "warmup_ratio = " << fmt(t.warmup_ratio) << '\n';
    out << "weight_decay = " << fmt(t.weight_decay) << '\n';
    out << "alpha_init = " << fmt(t.alpha_init) << '\n';
    out << "alpha_end = " << fmt(t.alpha_end) << '\n';
    out << "tau_init = " << fmt(t.tau_init) << '\n';
    out << "tau_end = " << fmt(t.tau_end) << '\n';
    const ModelSpec &m = t.model;
    out << "model = " << (m.architecture() == ModelSpec::kind::linear ? "linear" : "mlp") << '\n';
    if (m.architecture() == ModelSpec::kind::mlp) {
        out << "hidden = ";
        for (std::size_t i = 1; i + 1 < m.dims().size(); ++i) {
            out << (i > 1 ? "," : "") << m.dims()[i];
        }
        out << '\n';
        out << "activation = " << (m.hidden_activation() == activation::tanh ? "tanh" : "relu") << '\n';
    }
    out << "bias = " << (m.has_bias() ? "true" : "false") << '\n';
    out << "seeds = " << cfg.seeds << '\n';
    out << "master_seed = " << cfg.master_seed << '\n';
    out << "n_train = " << d.n_train << '\n';
    out << "n_test = " << d.n_test << '\n';
    out << "pos_prior = " << fmt(d.pos_prior) << '\n';
    out << "test_pos_prior = " << fmt(d.test_pos_prior) << '\n';
    out << "mean_a = " << fmt(d.mean_a) << '\n';
    out << "mean_b = " << fmt(d.mean_b) << '\n';
    out << "sigma = " << fmt(d.sigma) << '\n';
    for (const data_role role : { data_role::train, data_role::test1, data_role::test2 }) {
        for (std::size_t f = 0; f < MixtureTable::num_features; ++f) {
            for (const int label : { 1, 0 }) {
                out << "mixture." << to_string(role) << ".f" << (f + 1) << '.' << (label ? "pos" : "neg") << " = " << fmt(d.mixture.prob_high(role, f, label)) << '\n';
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// output files

namespace {

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

void close_out(std::ofstream &out, const std::filesystem::path &path) {
    out.close();
    if (!out) {
        throw io_error("write failed: " + path.string());
    }
}

}  // namespace

void emit(const std::vector<AggregateResult> &results, const ExperimentConfig &cfg, const std::filesystem::path &out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw io_error("cannot create " + out_dir.string() + ": " + ec.message());
    }

    {
        const auto path = out_dir / "summary.csv";
        auto out = open_out(path);
        out << "method,split,seeds,diverged,pos_f1_mean,pos_f1_std,neg_f1_mean,neg_f1_std,mf1_mean,mf1_std,acc_mean,acc_std,"
               "pos_acc_mean,pos_acc_std,neg_acc_mean,neg_acc_std,collapsed_runs,collapsed\n";
        for (const AggregateResult &agg : results) {
            for (const std::string split : { "train", "valid", "test1", "test2" }) {
                const SplitAggregate &s = agg.splits.at(split);
                const std::size_t included = agg.seed_count - agg.diverged;
                out << to_string(agg.objective) << ',' << split << ',' << agg.seed_count << ',' << agg.diverged;
                for (const MetricSummary &m : { s.pos_f1, s.neg_f1, s.mf1, s.accuracy, s.pos_acc, s.neg_acc }) {
                    out << ',' << fmt(m.mean) << ',' << fmt(m.stddev);
                }
                out << ',' << s.collapsed_runs << ',' << (included > 0 && s.collapsed_runs == included ? "true" : "false") << '\n';
            }
        }
        close_out(out, path);
    }

    for (const AggregateResult &agg : results) {
        for (const RunOutcome &run : agg.runs) {
            if (run.failure) {
                continue;
            }
            const auto path = out_dir / ("curves_" + to_string(agg.objective) + "_" + std::to_string(run.index) + ".csv");
            auto out = open_out(path);
            out << "iteration,l_pos,l_neg,l_cls_ineq,l_gdro,l_total,alpha,tau,lr,valid_mf1,valid_erm_loss\n";
            std::size_t next_valid = 0;
            const auto &curve = run.record.train_curve;
            for (std::size_t t = 0; t < curve.size(); ++t) {
                const LossBreakdown &b = curve[t];
                out << t << ',' << fmt(b.l_pos) << ',' << fmt(b.l_neg) << ',' << fmt(b.l_cls_ineq) << ',' << fmt(b.l_gdro) << ',' << fmt(b.l_total) << ','
                    << fmt(b.alpha) << ',' << fmt(b.tau) << ',' << fmt(run.record.lr_curve[t]) << ',';
                const auto &valid = run.record.validation;
                if (next_valid < valid.size() && valid[next_valid].iteration == t) {
                    out << fmt(valid[next_valid].metrics.mf1) << ',' << fmt(valid[next_valid].losses.l_erm);
                    ++next_valid;
                } else {
                    out << ',';
                }
                out << '\n';
            }
            close_out(out, path);
        }

        if (cfg.train.model.architecture() == ModelSpec::kind::linear) {
            const auto path = out_dir / ("weights_" + to_string(agg.objective) + ".csv");
            auto out = open_out(path);
            out << "seed";
            for (Eigen::Index j = 0; j < cfg.train.model.input_dim(); ++j) {
                out << ",w" << (j + 1);
            }
            out << '\n';
            for (const RunOutcome &run : agg.runs) {
                if (run.failure || !run.record.final_weights) {
                    continue;
                }
                out << run.index;
                for (const double w : *run.record.final_weights) {
                    out << ',' << fmt(w);
                }
                out << '\n';
            }
            close_out(out, path);
        }
    }

    {
        const auto path = out_dir / "config.resolved";
        auto out = open_out(path);
        out << resolved_config(cfg);
        close_out(out, path);
    }
}

}  // namespace clsunbias
