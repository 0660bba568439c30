#include <cmath>
#include <vector>

#include "dcu/bsde.hpp"
#include "dcu/errors.hpp"
#include "dcu/model.hpp"
#include "dcu/parallel.hpp"
#include "dcu/paths.hpp"
#include "doctest.h"

using namespace dcu;

namespace {

struct Setup {
    PathEnsemble ens;
    StatePath state;
};

Setup brownian_setup(std::size_t M, std::size_t N, std::uint64_t seed) {
    Setup s;
    s.ens = generate(M, N, 1, 1.0, seed, {});
    s.state = brownian_state(s.ens);
    return s;
}

const EndowmentFn kIdentity = [](double x) { return x; };

} // namespace

TEST_CASE("polynomial fit recovers low-degree data and degrades on rank loss") {
    auto xs = linspace(-2.0, 3.0, 400);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = 1.0 - 2.0 * xs[i] + 0.5 * xs[i] * xs[i] * xs[i];
    const auto fit = fit_polynomial(xs, ys, 4);
    CHECK(!fit.degraded);
    for (double x : {-1.7, 0.0, 2.9})
        CHECK(fit.eval(x) == doctest::Approx(1.0 - 2.0 * x + 0.5 * x * x * x).epsilon(1e-10));

    std::vector<double> flat(100, 2.5), target(100, 7.0);
    const auto cfit = fit_polynomial(flat, target, 4);
    CHECK(cfit.degraded);
    CHECK(cfit.degree == 0);
    CHECK(cfit.eval(2.5) == doctest::Approx(7.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)fit_polynomial(xs, std::vector<double>(3, 0.0), 2), InputError);
    CHECK_THROWS_AS((void)fit_polynomial(xs, ys, -1), ParamError);
}

TEST_CASE("drift_band solve lands on the closed form") {
    // Y_t = B_t - gamma (T - t), so Y_0 = -1 at gamma = 1
    auto s = brownian_setup(50000, 32, 101);
    GrowthParams p;
    const auto e = build_catalogue_entry("drift_band", p);
    const auto sol = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    CHECK(std::fabs(sol.y0 + 1.0) <= 0.02);
    CHECK(sol.total_z_clips == 0);
    CHECK(sol.total_y_clips == 0);
    CHECK(sol.steps.size() == 33);
    // terminal diagnostics hold the raw claim
    const auto xim = par::block_mean_se(s.ens.M, [&](std::size_t q) { return s.state.at(q, 32); });
    CHECK(sol.steps[32].y_mean == doctest::Approx(xim.mean).epsilon(1e-14));
}

TEST_CASE("entropic solve agrees with the exponential-utility oracle on shared paths") {
    auto s = brownian_setup(50000, 32, 7);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    const auto sol = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    std::vector<double> xi(s.ens.M);
    for (std::size_t q = 0; q < s.ens.M; ++q) xi[q] = s.state.at(q, 32);
    const auto orc = entropic_oracle(xi, 1.0);
    // same paths, so the two estimates share most of their sampling noise
    CHECK(std::fabs(sol.y0 - orc.value) <= 0.01);
    CHECK(std::fabs(sol.y0 + 0.5) <= 0.03);
    CHECK(orc.se > 0.0);
}

TEST_CASE("affine claims with affine drivers are solved nearly exactly") {
    // xi = a B_T + b keeps every regression target affine in the state, so
    // only sampling noise remains
    auto s = brownian_setup(100000, 16, 23);
    GrowthParams p;
    p.k = 0.5;
    const auto e = build_catalogue_entry_dirac(p, 0.5, constant_fn(0.2));
    const EndowmentFn xi = [](double x) { return 2.0 * x - 1.0; };
    const auto sol = solve_lsmc(s.ens, s.state, xi, e.gen);
    const auto orc = affine_oracle(2.0, -1.0, e.gen);
    // y0 = b - int g(s, -a) ds = -1 - (0.5 (-2) - 0.2) = 0.2
    CHECK(orc.y0 == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(orc.z == -2.0);
    CHECK(std::fabs(sol.y0 - orc.y0) <= 0.02);
    // the oracle's value function is affine in the Brownian coordinate
    CHECK(orc.value(1.0, 0.3) == doctest::Approx(2.0 * 0.3 - 1.0).epsilon(1e-12));
    CHECK(orc.value(0.0, 0.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("time-dependent offsets are integrated along the grid") {
    GrowthParams p;
    p.k = 0.5;
    const TimeFn h = [](double t) { return 0.2 + 0.1 * t; };
    const auto e = build_catalogue_entry_dirac(p, 0.5, h);
    const auto orc = affine_oracle(1.0, 0.0, e.gen);
    // y0 = -( 0.5 (-1) - int h ) = 0.5 + 0.2 + 0.05
    CHECK(orc.y0 == doctest::Approx(0.75).epsilon(1e-9));
    auto s = brownian_setup(40000, 16, 31);
    const auto sol = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    CHECK(std::fabs(sol.y0 - 0.75) <= 0.01);
}

TEST_CASE("solver output is bitwise reproducible across thread counts") {
    auto s = brownian_setup(20000, 16, 3);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    const int saved = par::thread_count();
    par::set_thread_count(1);
    const auto a = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    par::set_thread_count(5);
    const auto b = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    par::set_thread_count(saved);
    CHECK(a.y0 == b.y0);
    CHECK(a.z == b.z);
    CHECK(a.y0_se == b.y0_se);
}

TEST_CASE("tight clip radius truncates Z and is reported") {
    auto s = brownian_setup(5000, 8, 13);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    SolverOptions opts;
    opts.z_clip_radius = 0.05; // exact Z is -1, so every path clips
    const auto sol = solve_lsmc(s.ens, s.state, kIdentity, e.gen, opts);
    CHECK(sol.total_z_clips > 0);
    for (std::size_t q = 0; q < sol.M; ++q) CHECK(std::fabs(sol.z_at(q, 4)) <= 0.05);
}

TEST_CASE("implicit sweeps are a fixed point for drivers without a Y argument") {
    auto s = brownian_setup(10000, 8, 17);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    SolverOptions one;
    SolverOptions picard;
    picard.implicit_picard = true;
    picard.picard_iters = 4;
    const auto a = solve_lsmc(s.ens, s.state, kIdentity, e.gen, one);
    const auto b = solve_lsmc(s.ens, s.state, kIdentity, e.gen, picard);
    CHECK(a.y0 == b.y0);
}

TEST_CASE("solver validates inputs and flags blowups") {
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    auto ens2 = generate(100, 4, 2, 1.0, 1, {});
    StatePath st;
    st.M = 100;
    st.N = 4;
    st.x.assign(500, 0.0);
    CHECK_THROWS_AS((void)solve_lsmc(ens2, st, kIdentity, e.gen), ParamError);

    auto s = brownian_setup(100, 4, 1);
    StatePath wrong = s.state;
    wrong.M = 50;
    CHECK_THROWS_AS((void)solve_lsmc(s.ens, wrong, kIdentity, e.gen), ParamError);

    SolverOptions bad;
    bad.basis_degree = -2;
    CHECK_THROWS_AS((void)solve_lsmc(s.ens, s.state, kIdentity, e.gen, bad), ParamError);

    const EndowmentFn inf_claim = [](double) { return kPlusInf; };
    CHECK_THROWS_AS((void)solve_lsmc(s.ens, s.state, inf_claim, e.gen), BlowupError);
}

TEST_CASE("entropic oracle evaluates the log-mean-exp closed form") {
    const std::vector<double> xi = {0.0, std::log(4.0)};
    const auto r = entropic_oracle(xi, 1.0);
    // -(1/1) ln( (e^0 + e^{-ln 4}) / 2 ) = -ln(0.625)
    CHECK(r.value == doctest::Approx(-std::log(0.625)).epsilon(1e-14));
    CHECK_THROWS_AS((void)entropic_oracle(std::vector<double>{}, 1.0), InputError);
    CHECK_THROWS_AS((void)entropic_oracle(xi, 0.0), ParamError);
    // invariance under the log-sum-exp shift: huge values do not overflow
    const std::vector<double> big = {1000.0, 1000.0 + std::log(4.0)};
    const auto rb = entropic_oracle(big, 1.0);
    CHECK(rb.value == doctest::Approx(1000.0 - std::log(0.625)).epsilon(1e-12));
}

TEST_CASE("two-stage split reproduces the direct value") {
    auto s = brownian_setup(50000, 32, 41);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    const auto ts = two_stage_solve(s.ens, s.state, kIdentity, e.gen, 16);
    CHECK(std::fabs(ts.y0_nested - ts.y0_direct) <= 0.03);
    CHECK(ts.y0_direct == solve_lsmc(s.ens, s.state, kIdentity, e.gen).y0);
}

TEST_CASE("ensemble and state slices carry consistent sub-grids") {
    auto s = brownian_setup(100, 8, 19);
    const auto sub = slice_ensemble(s.ens, 2, 6);
    CHECK(sub.N == 4);
    CHECK(sub.T == doctest::Approx(0.5).epsilon(1e-15));
    for (std::size_t p = 0; p < 100; ++p)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(sub.step(p, i)[0] == s.ens.step(p, 2 + i)[0]);
    const auto sst = slice_state(s.state, 2, 6);
    CHECK(sst.N == 4);
    for (std::size_t p = 0; p < 100; ++p)
        for (std::size_t i = 0; i <= 4; ++i)
            CHECK(sst.at(p, i) == s.state.at(p, 2 + i));
}

TEST_CASE("r2 tracks the explainable share of one-step-ahead variance") {
    // for a Brownian claim the conditional mean explains exactly
    // t_i / t_{i+1} of Var(Y_{i+1}), so r2 must sit near i/(i+1)
    auto s = brownian_setup(20000, 8, 53);
    GrowthParams p;
    const auto e = build_catalogue_entry("entropic", p);
    const auto sol = solve_lsmc(s.ens, s.state, kIdentity, e.gen);
    for (std::size_t i = 0; i < 8; ++i) {
        const double ratio = double(i) / double(i + 1);
        CHECK(std::fabs(sol.steps[i].r2 - ratio) <= 0.03);
    }
}
