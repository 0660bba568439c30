#include <cmath>
#include <vector>

#include "dcu/errors.hpp"
#include "dcu/inequalities.hpp"
#include "dcu/paths.hpp"
#include "doctest.h"

using namespace dcu;

TEST_CASE("the pointwise registry is stable") {
    const auto& ids = pointwise_ids();
    CHECK(ids.size() == 11);
    CHECK(ids.front() == "young_inverse_pair");
    CHECK(ids.back() == "young_classic");
}

TEST_CASE("every pointwise inequality holds at the default parameters") {
    for (const auto& id : pointwise_ids()) {
        const auto rep = check_pointwise(id, {}, 5000, 71);
        CHECK_MESSAGE(rep.violations == 0, id, " worst margin ", rep.worst_margin);
        CHECK(rep.samples == 5000);
        CHECK(rep.worst_margin <= 0.0);
        CHECK(rep.violating_points.empty());
    }
}

TEST_CASE("pointwise sampling is deterministic in the seed") {
    const auto a = check_pointwise("young_entropy", {}, 1000, 5);
    const auto b = check_pointwise("young_entropy", {}, 1000, 5);
    const auto c = check_pointwise("young_entropy", {}, 1000, 6);
    CHECK(a.worst_margin == b.worst_margin);
    CHECK(a.worst_margin != c.worst_margin);
}

TEST_CASE("parameter constraints are enforced per inequality") {
    IneqParams bad;
    bad.q = 1.0;
    CHECK_THROWS_AS((void)check_pointwise("gauss_exp_split_explicit", bad, 10, 1), ParamError);
    IneqParams bad2;
    bad2.delta = 1.0;
    CHECK_THROWS_AS((void)check_pointwise("young_classic", bad2, 10, 1), ParamError);
    CHECK_THROWS_AS((void)check_pointwise("no_such_id", {}, 10, 1), InputError);
    IneqParams neg;
    neg.mu = -1.0;
    CHECK_THROWS_AS((void)check_pointwise("young_inverse_pair", neg, 10, 1), ParamError);
}

TEST_CASE("explicit gaussian-split constant matches its closed form") {
    for (double mu : {0.5, 1.0, 2.0})
        for (double q : {1.5, 2.0, 3.0}) {
            const double l2 = std::log(2.0);
            const double expect =
                std::exp(mu * mu / (2.0 * (q - 1.0)) + (q + 1.0) * l2 * l2 / ((q - 1.0) * mu * mu));
            CHECK(gauss_exp_split_constant(mu, q) == doctest::Approx(expect).epsilon(1e-13));
        }
}

TEST_CASE("searched slack constants validate and cover the low region") {
    IneqParams p;
    p.mu = 1.0;
    p.delta = 2.0;
    p.q = 2.0;
    p.eps = 0.01;  // small budget forces a crossover, so the threshold is real
    const auto s = search_exp_power_slack(p);
    CHECK(s.validated);
    CHECK(s.threshold > 0.0);
    CHECK(s.constant >= 0.0);
    CHECK(s.grid_points > 0);
    // brute recheck on an independent grid: x e^{(x/mu)^d} <= eps e^{q (x/mu)^d} + C
    double worst = -1e300;
    for (int i = 0; i <= 40000; ++i) {
        const double x = 1e-6 + (double)i * (s.threshold * 1.5) / 40000.0;
        const double a = std::pow(x / p.mu, p.delta);
        const double lhs = x * std::exp(a);
        const double rhs = p.eps * std::exp(p.q * a) + s.constant;
        worst = std::max(worst, lhs - rhs);
    }
    CHECK(worst <= 1e-7 * std::max(1.0, s.constant));

    const auto l = search_log_power_slack(p);
    CHECK(l.validated);
    CHECK(l.constant >= 0.0);

    // a generous budget dominates everywhere: no threshold, negligible constant
    IneqParams free_p;
    free_p.mu = 1.0;
    free_p.delta = 2.0;
    free_p.q = 2.0;
    free_p.eps = 1.0;
    const auto f = search_exp_power_slack(free_p);
    CHECK(f.validated);
    CHECK(f.threshold == 0.0);
    CHECK(f.constant <= 1e-9);
}

TEST_CASE("slack threshold shrinks as the damping budget grows") {
    IneqParams lo;
    lo.eps = 0.1;
    IneqParams hi;
    hi.eps = 10.0;
    const auto a = search_exp_power_slack(lo);
    const auto b = search_exp_power_slack(hi);
    CHECK(b.threshold <= a.threshold);
    CHECK(b.constant <= a.constant);
}

TEST_CASE("normal expectation quadrature hits gaussian moments") {
    CHECK(normal_expectation([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(normal_expectation([](double x) { return std::exp(x); }) ==
          doctest::Approx(std::exp(0.5)).epsilon(1e-10));
    CHECK(normal_expectation([](double x) { return x; }) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)normal_expectation([](double x) { return x; }, 1), ParamError);
}

TEST_CASE("zero control is the exact equality case of the entropy bound") {
    const auto ens = generate(20000, 8, 1, 1.0, 33, {});
    const auto rep = entropy_bound_const(ens, 0.0);
    CHECK(rep.equality_case);
    CHECK(rep.holds);
    CHECK(std::fabs(rep.rhs - rep.lhs) <= 1e-15);
    CHECK(rep.lhs == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("entropy bound holds for unit and double controls with quadrature cross-check") {
    const auto ens = generate(100000, 16, 1, 1.0, 37, {});
    for (double qv : {1.0, 2.0}) {
        const auto rep = entropy_bound_const(ens, qv);
        CHECK_MESSAGE(rep.holds, "q=", qv, " slack ", rep.slack);
        CHECK(!rep.equality_case);
        CHECK(std::isfinite(rep.lhs_quadrature));
        CHECK(std::fabs(rep.lhs - rep.lhs_quadrature) <= 3.0 * rep.lhs_se);
    }
}

TEST_CASE("power-entropy bound holds at the conjugate exponent four") {
    const auto ens = generate(100000, 16, 1, 1.0, 41, {});
    const auto rep = entropy_power_bound_const(ens, 1.0, 4.0);
    CHECK(rep.holds);
    CHECK(rep.rhs > rep.lhs);
    CHECK_THROWS_AS((void)entropy_power_bound_const(ens, 1.0, 1.5), ParamError);
}

TEST_CASE("exponential-entropy bound constants are finite and the bound holds") {
    const auto ens = generate(50000, 16, 1, 1.0, 43, {});
    const auto rep = entropy_exp_bound_const(ens, 1.0, 1.0, 1.0, 1.0);
    CHECK(rep.holds);
    CHECK(std::isfinite(rep.constants.ktilde));
    CHECK(rep.constants.ktilde >= std::exp(1.0));
    CHECK(std::isfinite(rep.constants.kbar));
    CHECK(rep.constants.kbar >= 0.0);
    CHECK(rep.constants.growth >= 1.0);
    CHECK(rep.constants.multiplier > 0.0);
    CHECK(rep.constants.additive > 0.0);
}

TEST_CASE("iterated-log slack constant dominates an independent grid scan") {
    const auto c = exp_bound_constants(1.0, 1.0, 1.0, 1.0);
    // kbar covers gamma^2 x ((ln(1+x))^{2 lambda} - 2 (ln x)^{2 lambda}) on (1, 100]
    double sup = 0.0;
    for (int i = 1; i <= 200000; ++i) {
        const double x = 1.0 + 99.0 * (double)i / 200000.0;
        const double v = x * (std::pow(std::log1p(x), 2.0) - 2.0 * std::pow(std::log(x), 2.0));
        sup = std::max(sup, v);
    }
    CHECK(c.kbar >= sup - 1e-9);
    CHECK(c.kbar <= std::max(1.0, sup) * 1.5);
}

TEST_CASE("controls beyond the declared bound are rejected") {
    const auto ens = generate(1000, 4, 1, 1.0, 47, {});
    CHECK_THROWS_AS((void)entropy_bound(ens, constant_control({1.0}), 0.5), RejectedControl);
    CHECK_THROWS_AS((void)entropy_bound(ens, constant_control({1.0}),
                                        std::numeric_limits<double>::infinity()),
                    RejectedControl);
    CHECK_THROWS_AS((void)entropy_bound(ens, constant_control({1.0}), -1.0), RejectedControl);
}

TEST_CASE("bound reports carry coherent uncertainty fields") {
    const auto ens = generate(20000, 8, 1, 1.0, 53, {});
    const auto rep = entropy_bound_const(ens, 1.0);
    CHECK(rep.lhs_se > 0.0);
    CHECK(rep.rhs_se > 0.0);
    CHECK(rep.combined_se >= rep.lhs_se);
    CHECK(rep.slack == rep.rhs - rep.lhs);
    CHECK(rep.id == "entropy_growth");
}
