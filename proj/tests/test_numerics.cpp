#include "oracle.hpp"

#include "clsunbias/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace clsunbias;

namespace {

std::vector<ObjectiveSpec> all_objectives(rng &gen) {
    return { ObjectiveSpec::make_erm(),
             ObjectiveSpec::make_erm_cls_w(gen.uniform(0.2, 3), gen.uniform(0.2, 3)),
             ObjectiveSpec::make_erm_per_cls(),
             ObjectiveSpec::make_cls_ineq(),
             ObjectiveSpec::make_gdro(gen.uniform(0.01, 5)),
             ObjectiveSpec::make_total(gen.uniform(0, 2), gen.uniform(0.01, 5)) };
}

double max_rel_err(const Gradient &a, const Gradient &f) {
    double worst = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - f[i]) / std::max({ std::abs(a[i]), std::abs(f[i]), 1e-4 }));
    }
    return worst;
}

ParamVector random_params(rng &gen, const ModelSpec &spec) {
    ParamVector p(spec.param_count());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        p[i] = gen.normal(0, 0.7);
    }
    return p;
}

}  // namespace

TEST_CASE("value_and_grad: single-sample logistic case") {
    Dataset ds;
    ds.X.resize(1, 2);
    ds.X << 1, 2;
    ds.y.resize(1);
    ds.y << 1;
    const auto spec = ModelSpec::linear(2, true);
    const auto [value, grad] = value_and_grad(spec, ParamVector(ParamVector::Zero(3)), ObjectiveSpec::make_erm(), ds);
    CHECK(value == doctest::Approx(std::log(2.0)));
    CHECK(grad[0] == doctest::Approx(-0.5));
    CHECK(grad[1] == doctest::Approx(-1.0));
    CHECK(grad[2] == doctest::Approx(-0.5));

    const auto fd = finite_diff_grad(spec, ParamVector(ParamVector::Zero(3)), ObjectiveSpec::make_erm(), ds, 1e-6);
    CHECK(max_rel_err(grad, fd) < 1e-6);
}

TEST_CASE("value_and_grad: errors") {
    rng gen{ 31 };
    auto ds = oracle::dataset(gen, 10, 2);
    const auto spec = ModelSpec::linear(2);
    CHECK_THROWS_AS(value_and_grad(spec, ParamVector(ParamVector::Zero(3)), ObjectiveSpec::make_erm(), ds), structural_error);
    ds.y.setOnes();
    try {
        (void)value_and_grad(spec, ParamVector(ParamVector::Zero(2)), ObjectiveSpec::make_cls_ineq(), ds);
        FAIL("expected empty_class_error");
    } catch (const empty_class_error &e) {
        CHECK(e.missing() == class_label::neg);
    }
    CHECK_NOTHROW(value_and_grad(spec, ParamVector(ParamVector::Zero(2)), ObjectiveSpec::make_erm(), ds));
    ds.X(0, 0) = std::nan("");
    CHECK_THROWS_AS(value_and_grad(spec, ParamVector(ParamVector::Ones(2)), ObjectiveSpec::make_erm(), ds), numerical_overflow_error);
}

TEST_CASE("cls_ineq at equal class losses: zero value and zero gradient") {
    rng gen{ 36 };
    const auto ds = oracle::dataset(gen, 12, 3);
    for (const auto &spec : { ModelSpec::linear(3), ModelSpec::mlp(3, { 4, 4 }) }) {
        // a zero output layer makes every logit 0, so both class losses are exactly ln 2
        ParamVector p = random_params(gen, spec);
        p.segment(spec.weight_offset(spec.num_layers() - 1), spec.param_count() - spec.weight_offset(spec.num_layers() - 1)).setZero();
        const auto [value, grad] = value_and_grad(spec, p, ObjectiveSpec::make_cls_ineq(), ds);
        CHECK(value == 0.0);
        CHECK(grad.isZero(0.0));
    }
}

TEST_CASE("cls_ineq gradient equals grad l_pos - grad l_neg when l_pos > l_neg") {
    rng gen{ 32 };
    const auto spec = ModelSpec::linear(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ds = oracle::dataset(gen, 20, 2);
        const auto p = random_params(gen, spec);
        const auto cl = class_losses(forward(spec, p, ds.X), ds.y);
        if (std::abs(cl.pos - cl.neg) < 1e-3) {
            continue;
        }
        const double s = cl.pos > cl.neg ? 1.0 : -1.0;
        // grad(l_pos) - grad(l_neg) through the per-class ERM with frozen unit weights
        const auto ineq = value_and_grad(spec, p, ObjectiveSpec::make_cls_ineq(), ds).second;
        const auto fd = finite_diff_grad(
            [&](const ParamVector &q) {
                const auto c = class_losses(forward(spec, q, ds.X), ds.y);
                return s * (c.pos - c.neg);
            },
            p, 1e-6);
        CHECK(max_rel_err(ineq, fd) < 1e-6);
    }
}

TEST_CASE("property: analytic gradients match central differences for every objective") {
    rng gen{ 33 };
    const std::vector<ModelSpec> specs{ ModelSpec::linear(2), ModelSpec::linear(3, true), ModelSpec::mlp(2, { 6, 6 }, activation::tanh),
                                        ModelSpec::mlp(3, { 4, 5 }, activation::tanh, false) };
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        for (const auto &spec : specs) {
            const auto ds = oracle::dataset(gen, 20, spec.input_dim());
            const auto p = random_params(gen, spec);
            for (const auto &obj : all_objectives(gen)) {
                const auto [value, grad] = value_and_grad(spec, p, obj, ds);
                CHECK(std::isfinite(value));
                CHECK(grad.size() == p.size());
                const auto fd = finite_diff_grad(spec, p, obj, ds, 1e-6);
                const double err = max_rel_err(grad, fd);
                const double tol = spec.architecture() == ModelSpec::kind::linear ? 1e-6 : 1e-5;
                CHECK_MESSAGE(err < tol, spec.describe() << " " << to_string(obj.type) << " err=" << err);
                ++checked;
            }
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("finite_diff_grad on simple functions") {
    ParamVector x(2);
    x << 1, -2;
    const auto g = finite_diff_grad([](const ParamVector &p) { return p.squaredNorm(); }, x, 1e-5);
    CHECK(std::abs(g[0] - 2) < 1e-8);
    CHECK(std::abs(g[1] + 4) < 1e-8);
    CHECK(finite_diff_grad([](const ParamVector &) { return 3.0; }, x, 1e-5).isZero(0.0));
    CHECK_THROWS_AS(finite_diff_grad([](const ParamVector &) { return 0.0; }, x, 0.0), domain_error);
}

TEST_CASE("adam_step") {
    SUBCASE("zero gradient without decay is a fixed point") {
        ParamVector p(3);
        p << 1, -2, 3;
        auto [s, q] = adam_step(AdamState<double>::zeros(3), p, Gradient(Gradient::Zero(3)), 0.1, 0.0);
        CHECK(q == p);
        CHECK(s.t == 1);
        std::tie(s, q) = adam_step(std::move(s), q, Gradient(Gradient::Zero(3)), 0.1, 0.0);
        CHECK(s.t == 2);
        CHECK(q == p);
    }
    SUBCASE("first step moves each coordinate by about lr against the gradient") {
        Gradient g(4);
        g << 0.3, -7, 1e-3, 50;
        const auto [s, q] = adam_step(AdamState<double>::zeros(4), ParamVector(ParamVector::Zero(4)), g, 0.001, 0.0);
        for (Eigen::Index i = 0; i < 4; ++i) {
            const double step = -q[i];
            CHECK(std::abs(step) > 0.000999);
            CHECK(std::abs(step) < 0.001);
            CHECK((step > 0) == (g[i] > 0));
        }
        CHECK((s.v.array() >= 0).all());
    }
    SUBCASE("decoupled weight decay") {
        const auto [s, q] = adam_step(AdamState<double>::zeros(1), ParamVector(ParamVector::Ones(1)), Gradient(Gradient::Zero(1)), 0.1, 0.01);
        CHECK(q[0] == doctest::Approx(0.999).epsilon(1e-15));
    }
    SUBCASE("matches a scalar reference over several steps") {
        rng gen{ 34 };
        ParamVector p(3);
        p << 0.5, -1, 2;
        auto state = AdamState<double>::zeros(3);
        std::vector<oracle::real> m(3, 0), v(3, 0), th{ 0.5L, -1.0L, 2.0L };
        for (int t = 1; t <= 20; ++t) {
            Gradient g(3);
            g << gen.normal(), gen.normal(), gen.normal();
            std::tie(state, p) = adam_step(std::move(state), p, g, 0.01, 0.1);
            for (std::size_t i = 0; i < 3; ++i) {
                const auto gi = static_cast<oracle::real>(g[static_cast<Eigen::Index>(i)]);
                m[i] = 0.9L * m[i] + 0.1L * gi;
                v[i] = 0.999L * v[i] + 0.001L * gi * gi;
                const oracle::real mh = m[i] / (1 - std::pow(0.9L, t));
                const oracle::real vh = v[i] / (1 - std::pow(0.999L, t));
                th[i] -= 0.01L * mh / (std::sqrt(vh) + 1e-8L);
                th[i] *= 1 - 0.01L * 0.1L;
            }
        }
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(p[static_cast<Eigen::Index>(i)] == doctest::Approx(static_cast<double>(th[i])).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(adam_step(AdamState<double>::zeros(2), ParamVector(ParamVector::Zero(3)), Gradient(Gradient::Zero(3)), 0.1, 0.0), structural_error);
}

TEST_CASE("cosine_warmup_lr reference values") {
    const LRSchedule s{ 3e-3, 0.1, 100 };
    CHECK(s.warmup_steps() == 10);
    CHECK(cosine_warmup_lr(s, 0) == 0.0);
    CHECK(cosine_warmup_lr(s, 10) == 3e-3);
    CHECK(cosine_warmup_lr(s, 5) == doctest::Approx(1.5e-3).epsilon(1e-15));
    CHECK(cosine_warmup_lr(s, 100) == doctest::Approx(0.0).epsilon(1e-18));
    CHECK_THROWS_AS(cosine_warmup_lr(s, 101), domain_error);
    CHECK(cosine_warmup_lr(LRSchedule{ 0.1, 0.0, 10 }, 0) == 0.1);
    CHECK(cosine_warmup_lr(LRSchedule{ 0.1, 1.0, 10 }, 10) == 0.1);
}

TEST_CASE("property: cosine_warmup_lr shape") {
    rng gen{ 35 };
    for (int trial = 0; trial < 100; ++trial) {
        const double peak = std::exp(gen.uniform(-9, 0));
        const double ratio = gen.bernoulli(0.2) ? 0.0 : gen.uniform(0, 0.9);
        const auto total = static_cast<std::size_t>(1 + gen.index(500));
        const LRSchedule s{ peak, ratio, total };
        const std::size_t tw = s.warmup_steps();
        double prev = -1;
        for (std::size_t t = 0; t <= total; ++t) {
            const double lr = cosine_warmup_lr(s, t);
            CHECK(lr >= 0.0);
            CHECK(lr <= peak);
            CHECK(lr == doctest::Approx(static_cast<double>(oracle::lr(peak, ratio, total, t))).epsilon(1e-12));
            if (t > tw) {
                CHECK(lr <= prev + 1e-18);
            }
            prev = lr;
        }
        if (ratio > 0 && tw > 0) {
            CHECK(cosine_warmup_lr(s, 0) == 0.0);
            CHECK(cosine_warmup_lr(s, tw) == peak);
        }
    }
}
