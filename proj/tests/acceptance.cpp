// Desk-scale verification of the headline targets, one printed line per
// target: closed-form oracles, attainability of the dual infimum by the
// subgradient control, conjugate reproduction, the pointwise and martingale
// inequality suites, the axioms of the solved functional, the refinement
// trend, and byte-level reproducibility of the CLI outputs. Exit status is
// nonzero unless every line passes. Default scale: M = 200000, N = 64,
// d = 1, T = 1; every entry is expected to finish well inside a minute.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dcu/bsde.hpp"
#include "dcu/conjugate.hpp"
#include "dcu/duality.hpp"
#include "dcu/inequalities.hpp"
#include "dcu/model.hpp"
#include "dcu/paths.hpp"
#include "dcu/scenario.hpp"

namespace {

using namespace dcu;
namespace fs = std::filesystem;

constexpr std::size_t kM = 200000;
constexpr std::size_t kN = 64;
constexpr std::uint64_t kSeed = 101;

const EndowmentFn kTerminalState = [](double x) { return x; };

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failed = 0;

void run_target(int idx, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = fmt("exception: %s", e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2d] %s  %-24s %s  (%.1fs)\n", idx, out.pass ? "PASS" : "FAIL", name,
                out.detail.c_str(), sec);
    std::fflush(stdout);
    if (!out.pass) ++g_failed;
}

// --- shared desk-scale state -------------------------------------------------

struct Desk {
    PathEnsemble ens;
    StatePath state;
    CatalogueEntry band, dirac, entropic, piecewise;
    BsdeSolution sol_band, sol_dirac, sol_entropic, sol_piecewise;
};

Desk make_desk() {
    GrowthParams p;
    GrowthParams pd;
    pd.k = 0.5;
    Desk d{generate(kM, kN, 1, 1.0, kSeed, {}),
           {},
           build_catalogue_entry("drift_band", p),
           build_catalogue_entry_dirac(pd, 0.5, constant_fn(0.2)),
           build_catalogue_entry("entropic", p),
           build_catalogue_entry("piecewise_vii", p),
           {},
           {},
           {},
           {}};
    d.state = brownian_state(d.ens);
    return d;
}

// --- conjugate reproduction helpers ------------------------------------------

struct ConjWorst {
    double ratio = 0.0; // max |error| / allowed, allowed = 3 dq max(1, |argmax|)
    double err = 0.0;
    double at = 0.0;
    std::size_t compared = 0;
};

// The grid-restricted sup misses the true maximiser by at most one spacing,
// so the transform error is bounded by spacing times the local slope of g,
// which is exactly the winning node |q*|. Boundary-flagged nodes are kept:
// for these tags the effective domain genuinely ends inside the window, so
// a clipped argmax is the true maximiser, not a truncation artifact.
ConjWorst transform_vs_closed_form(const CatalogueEntry& e, const std::vector<double>& qgrid,
                                   const std::vector<double>& zgrid, double zlo, double zhi) {
    const auto tab = tabulate_core(e.core, qgrid);
    const auto tr = legendre_transform(tab, zgrid);
    const double dq = qgrid[1] - qgrid[0];
    ConjWorst w;
    for (std::size_t j = 1; j + 1 < zgrid.size(); ++j) {
        const double z = zgrid[j];
        if (z < zlo || z > zhi) continue;
        const double err = std::fabs(tr.fn.values[j] - e.gen(0.0, z));
        const double allowed = 3.0 * dq * std::max(1.0, std::fabs(tab.grid[tr.argmax[j]]));
        ++w.compared;
        if (err / allowed > w.ratio) {
            w.ratio = err / allowed;
            w.err = err;
            w.at = z;
        }
    }
    return w;
}

// f** against f on interior finite nodes inside [qlo, qhi]; the conjugate
// grid must cover the slopes of f on that window.
ConjWorst biconjugate_vs_source(const CatalogueEntry& e, const std::vector<double>& qgrid,
                                const std::vector<double>& zgrid, double qlo, double qhi) {
    const auto tab = tabulate_core(e.core, qgrid);
    const auto fwd = legendre_transform(tab, zgrid);
    std::vector<double> back_grid;
    std::vector<double> back_truth;
    for (std::size_t i = tab.first_finite + 1; i + 1 <= tab.last_finite; ++i) {
        if (tab.grid[i] < qlo || tab.grid[i] > qhi) continue;
        back_grid.push_back(tab.grid[i]);
        back_truth.push_back(tab.values[i]);
    }
    const auto back = legendre_transform(fwd.fn, back_grid);
    const double dq = qgrid[1] - qgrid[0];
    const double dz = zgrid[1] - zgrid[0];
    ConjWorst w;
    for (std::size_t j = 1; j + 1 < back_grid.size(); ++j) {
        if (back.extrapolated[j]) continue; // conjugate grid must cover the slope here
        const double err = std::fabs(back.fn.values[j] - back_truth[j]);
        const double zstar = std::fabs(fwd.fn.grid[back.argmax[j]]);
        const double allowed = 3.0 * (dq + dz) * std::max(1.0, zstar);
        ++w.compared;
        if (err / allowed > w.ratio) {
            w.ratio = err / allowed;
            w.err = err;
            w.at = back_grid[j];
        }
    }
    return w;
}

// --- reproducibility helpers --------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DCU_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

} // namespace

int main() {
    std::printf("desk scale: M = %zu paths, N = %zu steps, d = 1, T = 1, seed = %llu\n",
                kM, kN, static_cast<unsigned long long>(kSeed));
    Desk d = make_desk();

    run_target(1, "oracle drift_band", [&] {
        d.sol_band = solve_lsmc(d.ens, d.state, kTerminalState, d.band.gen);
        const double err = std::fabs(d.sol_band.y0 - (-1.0));
        return Outcome{err <= 0.02, fmt("|y0 + 1| = %.2e <= 0.02", err)};
    });

    run_target(2, "oracle linear_dirac", [&] {
        d.sol_dirac = solve_lsmc(d.ens, d.state, kTerminalState, d.dirac.gen);
        const double err = std::fabs(d.sol_dirac.y0 - 0.7);
        return Outcome{err <= 0.02, fmt("|y0 - 0.7| = %.2e <= 0.02", err)};
    });

    run_target(3, "oracle entropic", [&] {
        d.sol_entropic = solve_lsmc(d.ens, d.state, kTerminalState, d.entropic.gen);
        const double err = std::fabs(d.sol_entropic.y0 - (-0.5));
        std::vector<double> xT(kM);
        for (std::size_t p = 0; p < kM; ++p) xT[p] = d.state.at(p, kN);
        const auto orc = entropic_oracle(xT, 1.0);
        const double oerr = std::fabs(orc.value - (-0.5));
        const bool pass = err <= 0.03 && oerr <= 3.0 * orc.se;
        return Outcome{pass, fmt("|y0 + 0.5| = %.2e <= 0.03, oracle off closed form by %.2e (3 se = %.2e)",
                                 err, oerr, 3.0 * orc.se)};
    });

    run_target(4, "attainability + sweep", [&] {
        d.sol_piecewise = solve_lsmc(d.ens, d.state, kTerminalState, d.piecewise.gen);
        struct Case {
            const char* tag;
            const CatalogueEntry* e;
            const BsdeSolution* sol;
        };
        const Case cases[] = {{"drift_band", &d.band, &d.sol_band},
                              {"linear_dirac", &d.dirac, &d.sol_dirac},
                              {"entropic", &d.entropic, &d.sol_entropic},
                              {"piecewise_vii", &d.piecewise, &d.sol_piecewise}};
        std::string detail;
        bool pass = true;
        for (const auto& c : cases) {
            const auto rep = attainability_check(*c.sol, d.ens, d.state, kTerminalState,
                                                 c.e->core, c.e->gen);
            const auto rows = constant_control_sweep(d.ens, d.state, kTerminalState, c.e->core,
                                                     c.sol->y0, 50, 2026);
            bool lower_ok = true, exceed = false;
            std::size_t admissible = 0;
            for (const auto& r : rows) {
                if (r.est.value > c.sol->y0 + 0.05) exceed = true;
                if (r.est.admissible != TriState::Yes) continue;
                ++admissible;
                const double allow =
                    3.0 * std::sqrt(r.est.std_error * r.est.std_error +
                                    c.sol->y0_se * c.sol->y0_se);
                if (r.est.value < c.sol->y0 - allow) lower_ok = false;
            }
            const bool ok = rep.within && lower_ok && exceed && admissible > 0;
            pass = pass && ok;
            if (!detail.empty()) detail += ", ";
            detail += fmt("%s gap %.1e/%.1e%s", c.tag, rep.gap, rep.combined_ci, ok ? "" : " FAIL");
        }
        return Outcome{pass, detail};
    });

    run_target(5, "conjugate transform", [&] {
        const auto qgrid = linspace(-12.0, 12.0, 4801);
        const auto zgrid = linspace(-5.0, 5.0, 2001);
        GrowthParams p;
        GrowthParams pc;
        pc.gamma = 2.0;
        struct Spec {
            const char* tag;
            CatalogueEntry e;
            std::vector<double> zbi;
            double qlo, qhi;
        };
        Spec specs[] = {
            {"drift_band", build_catalogue_entry("drift_band", p), linspace(-14.0, 14.0, 5601),
             -12.0, 12.0},
            {"entropic", build_catalogue_entry("entropic", p), linspace(-14.0, 14.0, 5601), -5.0,
             5.0},
            {"capped_quadratic", build_catalogue_entry("capped_quadratic", pc),
             linspace(-14.0, 14.0, 5601), -12.0, 12.0},
            {"quartic", build_catalogue_entry("quartic", p), linspace(-130.0, 130.0, 26001), -5.0,
             5.0},
            {"piecewise_vii", build_catalogue_entry("piecewise_vii", p),
             linspace(-14.0, 14.0, 5601), 1.0, 5.0},
        };
        bool pass = true;
        double worst_fwd = 0.0, worst_bi = 0.0;
        std::size_t min_nodes = (std::size_t)-1;
        for (const auto& s : specs) {
            const auto fw = transform_vs_closed_form(s.e, qgrid, zgrid, -5.0, 5.0);
            const auto bw = biconjugate_vs_source(s.e, qgrid, s.zbi, s.qlo, s.qhi);
            worst_fwd = std::max(worst_fwd, fw.ratio);
            worst_bi = std::max(worst_bi, bw.ratio);
            min_nodes = std::min({min_nodes, fw.compared, bw.compared});
            if (fw.ratio > 1.0 || bw.ratio > 1.0) pass = false;
        }
        // a vanishing node count would make the sup vacuous, not clean; the
        // smallest legitimate window is drift_band's domain interior (397)
        if (min_nodes < 300) pass = false;

        // the exponential core: formula and transform agree only on |z| >= 1
        const auto expo = build_catalogue_entry("exponential", p);
        const auto tab = tabulate_core(expo.core, qgrid);
        const auto tr = legendre_transform(tab, zgrid);
        double worst_outer = 0.0, worst_inner = 0.0;
        std::size_t outer_nodes = 0, inner_nodes = 0;
        const double dq = qgrid[1] - qgrid[0];
        for (std::size_t j = 1; j + 1 < zgrid.size(); ++j) {
            const double z = zgrid[j];
            if (std::fabs(z) >= 1.0) {
                const double allowed = 3.0 * dq * std::max(1.0, std::fabs(tab.grid[tr.argmax[j]]));
                worst_outer = std::max(
                    worst_outer, std::fabs(tr.fn.values[j] - expo.gen(0.0, z)) / allowed);
                ++outer_nodes;
            } else {
                // the true conjugate is the constant -1 inside the unit interval
                worst_inner = std::max(worst_inner, std::fabs(tr.fn.values[j] + 1.0));
                ++inner_nodes;
            }
        }
        const double split = expo.gen(0.0, 0.5) - tr.fn.eval(0.5);
        const bool expo_ok = worst_outer <= 1.0 && worst_inner <= 1e-12 &&
                             outer_nodes >= 500 && inner_nodes >= 100 &&
                             std::fabs(split - 0.15342640972002733) <= 1e-12;
        pass = pass && expo_ok && !expo.gen.caveat.empty();
        return Outcome{pass, fmt("worst ratio fwd %.3f bi %.3f (>=%zu nodes/tag), exp split at "
                                 "z=0.5: %+.6f, inner sup %.1e",
                                 worst_fwd, worst_bi, min_nodes, split, worst_inner)};
    });

    run_target(6, "pointwise inequalities", [&] {
        std::mt19937_64 rng(9001);
        auto logu = [&rng](double lo, double hi) {
            return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
        };
        struct Draw {
            const char* id;
            std::function<IneqParams()> params;
        };
        const Draw draws[] = {
            {"young_exp_power",
             [&] { IneqParams p; p.mu = logu(0.3, 3.0); p.delta = logu(0.5, 3.0); return p; }},
            {"young_log_power",
             [&] { IneqParams p; p.mu = logu(0.3, 3.0); p.delta = logu(0.5, 3.0); return p; }},
            {"young_exp_entropy", [&] { IneqParams p; p.mu = logu(0.3, 3.0); return p; }},
            {"young_weighted_power",
             [&] { IneqParams p; p.mu = logu(0.3, 3.0); p.delta = logu(1.1, 3.0); return p; }},
            {"young_entropy", [] { return IneqParams{}; }},
            {"young_classic", [&] { IneqParams p; p.delta = logu(1.1, 3.0); return p; }},
            {"gauss_exp_split_explicit",
             [&] { IneqParams p; p.mu = logu(0.3, 3.0); p.q = logu(1.1, 4.0); return p; }},
            {"young_exp_power_slack",
             [&] {
                 IneqParams p;
                 p.mu = logu(0.3, 3.0);
                 p.delta = logu(0.5, 3.0);
                 p.q = logu(1.1, 4.0);
                 p.eps = logu(0.1, 10.0);
                 return p;
             }},
            // tighter box: outside it the searched additive constant leaves
            // double range and the check would hold vacuously
            {"young_log_power_slack",
             [&] {
                 IneqParams p;
                 p.mu = logu(0.3, 2.0);
                 p.delta = logu(1.5, 3.0);
                 p.q = logu(2.0, 4.0);
                 p.eps = logu(0.5, 10.0);
                 return p;
             }},
        };
        std::size_t violations = 0, checks = 0;
        bool constants_finite = true;
        for (const auto& dr : draws) {
            for (int k = 0; k < 10; ++k) {
                const auto rep = check_pointwise(dr.id, dr.params(), 100000, 501 + (std::uint64_t)k);
                violations += rep.violations;
                ++checks;
                if (rep.constant != 0.0 && !std::isfinite(rep.constant)) constants_finite = false;
            }
        }
        return Outcome{violations == 0 && constants_finite,
                       fmt("%zu violations over %zu checks x 1e5 samples, searched constants finite",
                           violations, checks)};
    });

    run_target(7, "martingale entropy bounds", [&] {
        const auto eq = entropy_bound_const(d.ens, 0.0);
        const double eq_gap = std::fabs(eq.rhs - eq.lhs);
        bool pass = eq.equality_case && eq_gap <= 1e-15;
        std::string detail = fmt("q=0 gap %.1e", eq_gap);
        for (double qv : {1.0, 2.0}) {
            const auto rep = entropy_bound_const(d.ens, qv);
            const double xerr = std::fabs(rep.lhs - rep.lhs_quadrature);
            const bool ok = rep.holds && xerr <= 3.0 * rep.lhs_se;
            pass = pass && ok;
            detail += fmt(", q=%g slack %.3f quad-err %.1e%s", qv, rep.slack, xerr,
                          ok ? "" : " FAIL");
        }
        for (double qv : {1.0, 2.0}) {
            const auto rep = entropy_power_bound_const(d.ens, qv, 4.0);
            pass = pass && rep.holds;
            detail += fmt(", power q=%g slack %.2f%s", qv, rep.slack, rep.holds ? "" : " FAIL");
        }
        return Outcome{pass, detail};
    });

    run_target(8, "axioms", [&] {
        bool pass = true;
        std::string detail;
        for (const auto* e : {&d.entropic, &d.band}) {
            const auto res = axiom_suite(d.ens, d.state, kTerminalState, e->gen);
            pass = pass && res.all_pass;
            if (!detail.empty()) detail += ", ";
            detail += fmt("%s worst margin %+.4f%s", e->gen.tag.c_str(), res.worst_margin,
                          res.all_pass ? "" : " FAIL");
        }
        return Outcome{pass, detail};
    });

    run_target(9, "refinement trend", [&] {
        struct Rung {
            std::size_t N, M;
        };
        const Rung ladder[] = {{16, 12500}, {32, 50000}};
        struct Case {
            const char* tag;
            const CatalogueEntry* e;
            double oracle;
            const BsdeSolution* desk;
        };
        const Case cases[] = {{"drift_band", &d.band, -1.0, &d.sol_band},
                              {"linear_dirac", &d.dirac, 0.7, &d.sol_dirac},
                              {"entropic", &d.entropic, -0.5, &d.sol_entropic}};
        bool pass = true;
        std::string detail;
        for (const auto& c : cases) {
            std::vector<double> errs, ses;
            for (const auto& r : ladder) {
                const auto ens = generate(r.M, r.N, 1, 1.0, kSeed, {});
                const auto st = brownian_state(ens);
                const auto sol = solve_lsmc(ens, st, kTerminalState, c.e->gen);
                errs.push_back(std::fabs(sol.y0 - c.oracle));
                ses.push_back(sol.y0_se);
            }
            errs.push_back(std::fabs(c.desk->y0 - c.oracle));
            ses.push_back(c.desk->y0_se);
            int violations = 0;
            bool within_ci = true;
            for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
                if (errs[k + 1] <= errs[k]) continue;
                ++violations;
                const double ci = 3.0 * std::sqrt(ses[k] * ses[k] + ses[k + 1] * ses[k + 1]);
                if (errs[k + 1] - errs[k] > ci) within_ci = false;
            }
            const bool ok = violations <= 1 && within_ci;
            pass = pass && ok;
            if (!detail.empty()) detail += ", ";
            detail += fmt("%s %.1e->%.1e->%.1e%s", c.tag, errs[0], errs[1], errs[2],
                          ok ? "" : " FAIL");
        }
        return Outcome{pass, detail};
    });

    run_target(10, "reproducibility", [&] {
        const fs::path base = fs::temp_directory_path() / "dcu_acceptance";
        fs::remove_all(base);
        fs::create_directories(base);
        const fs::path cfg = base / "scenario.toml";
        {
            std::ofstream out(cfg);
            out << "[scenario]\nname = \"repro\"\n"
                   "[model]\ntype = \"brownian\"\nT = 1.0\n"
                   "[endowment]\nexpr = \"x\"\n"
                   "[core]\ntag = \"entropic\"\ngamma = 1.0\n"
                   "[solver]\nseed = 7\nN = 64\nM = 200000\n"
                   "[checks]\nrun = [\"duality\"]\n"
                   "[output]\ndir = \"unused\"\n";
        }
        std::vector<std::string> solutions, gaps;
        for (int threads : {1, 4, 8}) {
            for (int rep = 0; rep < 2; ++rep) {
                const fs::path out = base / fmt("out_t%d_r%d", threads, rep);
                const int rc = run_cli(fmt("--threads %d run %s --out %s", threads,
                                           cfg.string().c_str(), out.string().c_str()));
                if (rc != 0) return Outcome{false, fmt("CLI exit %d at %d threads", rc, threads)};
                solutions.push_back(slurp(out / "solution.csv"));
                gaps.push_back(slurp(out / "duality_gaps.csv"));
            }
        }
        bool identical = !solutions[0].empty() && !gaps[0].empty();
        for (std::size_t i = 1; i < solutions.size(); ++i)
            identical = identical && solutions[i] == solutions[0] && gaps[i] == gaps[0];
        return Outcome{identical, fmt("6 runs across {1,4,8} threads, %zu-byte solution.csv %s",
                                      solutions[0].size(), identical ? "all identical" : "DIFFER")};
    });

    std::printf("%s: %d of 10 targets failed\n", g_failed == 0 ? "OK" : "FAILURE", g_failed);
    return g_failed == 0 ? 0 : 1;
}
