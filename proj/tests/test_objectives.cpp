#include "oracle.hpp"

#include "clsunbias/objectives.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace clsunbias;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

Eigen::VectorXi ivec(std::initializer_list<int> v) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) {
        out[i++] = x;
    }
    return out;
}

const double ln2 = std::log(2.0);

}  // namespace

TEST_CASE("bce reference values") {
    CHECK(bce(0.0, 1) == doctest::Approx(ln2).epsilon(1e-12));
    CHECK(bce(2.0, 1) == doctest::Approx(0.126928).epsilon(1e-6));
    CHECK(bce(2.0, 1) == doctest::Approx(static_cast<double>(oracle::bce(2.0L, 1))).epsilon(1e-14));

    const double tiny = bce(-50.0, 0);
    CHECK(std::isfinite(tiny));
    CHECK(tiny == doctest::Approx(1.93e-22).epsilon(1e-2));
    CHECK(std::isfinite(bce(800.0, 0)));
    CHECK(bce(800.0, 0) == doctest::Approx(800.0));
    CHECK(bce(-800.0, 1) == doctest::Approx(800.0));
}

TEST_CASE("bce rejects non-finite logits") {
    CHECK_THROWS_AS(bce(std::numeric_limits<double>::quiet_NaN(), 1), domain_error);
    CHECK_THROWS_AS(bce(std::numeric_limits<double>::infinity(), 0), domain_error);
}

TEST_CASE("class_losses") {
    auto cl = class_losses(vec({ 0, 0 }), ivec({ 1, 0 }));
    CHECK(cl.pos == doctest::Approx(ln2));
    CHECK(cl.neg == doctest::Approx(ln2));

    cl = class_losses(vec({ 2, 0 }), ivec({ 1, 0 }));
    CHECK(cl.pos == doctest::Approx(0.126928).epsilon(1e-6));
    CHECK(cl.neg == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(cl.n_pos == 1);
    CHECK(cl.n_neg == 1);

    try {
        (void)class_losses(vec({ 1, 2 }), ivec({ 1, 1 }));
        FAIL("expected empty_class_error");
    } catch (const empty_class_error &e) {
        CHECK(e.missing() == class_label::neg);
    }
    CHECK_THROWS_AS((void)class_losses(vec({ 1, 2 }), ivec({ 0, 0 })), empty_class_error);
    CHECK_THROWS_AS((void)class_losses(vec({ 1, 2 }), ivec({ 0 })), structural_error);
}

TEST_CASE("erm family") {
    const auto z = vec({ 0, 0 });
    const auto y = ivec({ 1, 0 });
    CHECK(erm(z, y) == doctest::Approx(ln2));
    const auto cl = class_losses(z, y);
    CHECK(erm_per_cls(cl.pos, cl.neg) == doctest::Approx(2 * ln2));
    CHECK(erm_cls_w(z, y, 2.0, 1.0) == doctest::Approx(1.0397).epsilon(1e-4));
    CHECK(erm_cls_w(z, y, 2.0, 1.0) == doctest::Approx(1.5 * ln2));
}

TEST_CASE("property: unit class weights reduce erm_cls_w to erm") {
    rng gen{ 11 };
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen.index(40));
        const auto y = oracle::labels(gen, n);
        const auto z = oracle::logits(gen, n);
        CHECK(erm_cls_w(z, y, 1.0, 1.0) == erm(z, y));
        CHECK(erm(z, y) == doctest::Approx(static_cast<double>(oracle::erm(oracle::widen(z), oracle::widen(y)))).epsilon(1e-12));
    }
}

TEST_CASE("cls_ineq") {
    CHECK(cls_ineq(1.0, 1.0) == 0.0);
    CHECK(cls_ineq(2.0, 0.5) == 1.5);
    CHECK(cls_ineq_sign(1.0, 1.0) == 0.0);
    CHECK(cls_ineq_sign(2.0, 0.5) == 1.0);
    CHECK(cls_ineq_sign(0.5, 2.0) == -1.0);

    rng gen{ 12 };
    for (int trial = 0; trial < 200; ++trial) {
        const double a = gen.uniform(0, 5);
        const double b = gen.uniform(0, 5);
        CHECK(cls_ineq(a, b) == cls_ineq(b, a));
    }
}

TEST_CASE("gdro reference values") {
    auto g = gdro(1.0, 1.0, 3.7);
    CHECK(g.value == 1.0);
    CHECK(g.weights.pos == 0.5);
    CHECK(g.weights.neg == 0.5);

    g = gdro(2.0, 1.0, 1.0);
    CHECK(g.weights.pos == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(g.weights.neg == doctest::Approx(0.268941).epsilon(1e-6));
    CHECK(g.value == doctest::Approx(1.731059).epsilon(1e-6));

    g = gdro(2.0, 1.0, 10.0);
    CHECK(g.weights.pos > 0.9999);
    CHECK(std::abs(g.value - 2.0) < 1e-3);

    CHECK_THROWS_AS((void)gdro(2.0, 1.0, 0.0), domain_error);
    CHECK_THROWS_AS((void)gdro(2.0, 1.0, -1.0), domain_error);
}

TEST_CASE("property: gdro weights and limits") {
    rng gen{ 13 };
    for (int trial = 0; trial < 300; ++trial) {
        const double lp = gen.uniform(0, 4);
        const double ln = gen.uniform(0, 4);
        const double tau = std::exp(gen.uniform(-5, 3));
        const double c = gen.uniform(-3, 3);
        const auto w = gdro_weights(lp, ln, tau);
        CHECK(w.pos + w.neg == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(w.pos > 0.0);
        CHECK(w.neg > 0.0);
        CHECK(w.pos == doctest::Approx(static_cast<double>(oracle::gdro_weight_pos(lp, ln, tau))).epsilon(1e-12));
        // softmax shift invariance
        CHECK(gdro_weights(lp + c, ln + c, tau).pos == doctest::Approx(w.pos).epsilon(1e-12));

        CHECK(std::abs(gdro(lp, ln, 1e-6).value - (lp + ln) / 2) < 1e-4);
        if (std::abs(lp - ln) > 0.05) {
            CHECK(std::abs(gdro(lp, ln, 1e3).value - std::max(lp, ln)) < 1e-4);
        }
    }
}

TEST_CASE("total_loss") {
    CHECK(total_loss(0.0, 0.7, 1.3) == 1.3);
    CHECK(total_loss(1.0, 0.5, 1.5) == 2.0);
    CHECK(total_loss(2.0, 0.25, 1.0) == 1.5);
}

TEST_CASE("schedule_value") {
    const ScheduleSpec alpha{ 0.0, 1.0, 100 };
    CHECK(schedule_value(alpha, 0) == 0.0);
    CHECK(schedule_value(alpha, 50) == 0.5);
    CHECK(schedule_value(alpha, 100) == 1.0);
    const ScheduleSpec tau{ 2.0, 0.01, 100 };
    CHECK(schedule_value(tau, 0) == 2.0);
    CHECK(schedule_value(tau, 100) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(schedule_value(ScheduleSpec{ 0.0, 2.0, 10 }, 10) == 2.0);
    CHECK_THROWS_AS(schedule_value(alpha, 101), domain_error);
    CHECK_THROWS_AS(schedule_value(ScheduleSpec{ 0.0, 1.0, 0 }, 0), domain_error);
}

TEST_CASE("property: loss breakdown identities") {
    rng gen{ 14 };
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen.index(60));
        const auto y = oracle::labels(gen, n);
        const auto z = oracle::logits(gen, n);
        const double alpha = gen.uniform(0, 2);
        const double tau = gen.uniform(0.01, 5);
        const auto b = loss_breakdown(z, y, alpha, tau);
        const auto ref = oracle::per_class(oracle::widen(z), oracle::widen(y));
        CHECK(b.l_pos == doctest::Approx(static_cast<double>(ref.pos)).epsilon(1e-12));
        CHECK(b.l_neg == doctest::Approx(static_cast<double>(ref.neg)).epsilon(1e-12));
        CHECK(b.w_pos + b.w_neg == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(b.l_cls_ineq - std::abs(b.l_pos - b.l_neg)) <= 1e-12);
        CHECK(std::abs(b.l_gdro - (b.w_pos * b.l_pos + b.w_neg * b.l_neg)) <= 1e-12);
        CHECK(std::abs(b.l_total - (alpha * b.l_cls_ineq + b.l_gdro)) <= 1e-12);
        CHECK(b.l_gdro == doctest::Approx(static_cast<double>(oracle::gdro(ref.pos, ref.neg, tau))).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_objective: alpha = 0 makes the total objective identical to gdro") {
    rng gen{ 15 };
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen.index(30));
        const auto y = oracle::labels(gen, n);
        const auto z = oracle::logits(gen, n);
        const double tau = gen.uniform(0.01, 3);
        const auto a = evaluate_objective(ObjectiveSpec::make_total(0.0, tau), z, y);
        const auto b = evaluate_objective(ObjectiveSpec::make_gdro(tau), z, y);
        CHECK(a.value == b.value);
        CHECK(a.dlogits == b.dlogits);
    }
}

TEST_CASE("evaluate_objective: equal class losses give half the per-class ERM gradient") {
    // symmetric batch: l_pos == l_neg exactly
    const auto z = vec({ 1.5, -0.3, -1.5, 0.3 });
    const auto y = ivec({ 1, 1, 0, 0 });
    const auto g = evaluate_objective(ObjectiveSpec::make_gdro(1.7), z, y);
    const auto p = evaluate_objective(ObjectiveSpec::make_erm_per_cls(), z, y);
    REQUIRE(g.weights);
    CHECK(g.weights->pos == 0.5);
    CHECK(g.weights->neg == 0.5);
    CHECK(g.dlogits == 0.5 * p.dlogits);

    const auto ineq = evaluate_objective(ObjectiveSpec::make_cls_ineq(), z, y);
    CHECK(ineq.value == 0.0);
    CHECK(ineq.dlogits.isZero(0.0));
}

TEST_CASE("evaluate_objective errors") {
    const auto z = vec({ 1.0, 2.0 });
    CHECK_THROWS_AS((void)evaluate_objective(ObjectiveSpec::make_gdro(1.0), z, ivec({ 1, 1 })), empty_class_error);
    CHECK_NOTHROW((void)evaluate_objective(ObjectiveSpec::make_erm(), z, ivec({ 1, 1 })));
    CHECK_THROWS_AS((void)evaluate_objective(ObjectiveSpec::make_erm(), vec({ 1.0, std::nan("") }), ivec({ 1, 0 })), numerical_overflow_error);
    CHECK_THROWS_AS((void)evaluate_objective(ObjectiveSpec::make_erm(), z, ivec({ 1, 2 })), domain_error);
    CHECK_THROWS_AS(ObjectiveSpec::make_total(-1.0, 1.0), domain_error);
    CHECK_THROWS_AS(ObjectiveSpec::make_erm_cls_w(0.0, 1.0), domain_error);
}
