#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcu/model.hpp"
#include "dcu/paths.hpp"

namespace dcu {

using EndowmentFn = std::function<double(double xT)>;

// Least-squares polynomial fit y ~ poly(x) of the given degree on the
// standardized coordinate u = (x - mean)/scale. Degrades to a lower degree
// when the normal equations lose rank (constant state, degenerate draws);
// the resulting degree is recorded. All reductions are blocked, so the fit
// is bit-identical at any thread count.
struct PolyFit {
    std::vector<double> coef; // coefficients in u^0 .. u^degree
    double mean = 0.0;
    double scale = 1.0;
    int degree = 0;
    bool degraded = false;

    double eval(double x) const;
};

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

struct SolverOptions {
    int basis_degree = 4;
    double z_clip_radius = 50.0;
    // The backward step is explicit in Z and the drivers here carry no Y
    // argument, so the implicit step's Picard sweep reaches its fixed point
    // after one pass; the flag and iteration count are honored regardless.
    bool implicit_picard = false;
    int picard_iters = 3;
    // Shift applied to grid times before driver/offset evaluation; used by
    // the two-stage solve so time-dependent offsets see global time.
    double time_offset = 0.0;
};

struct StepDiagnostics {
    double t = 0.0;
    double y_mean = 0.0;        // cross-path mean of the fitted Y at this step
    double z_mean = 0.0;        // cross-path mean of the fitted Z (0 at the terminal step)
    double r2 = 1.0;            // R^2 of the conditional-mean regression
    std::size_t z_clip_count = 0;
    std::size_t y_clip_count = 0;
    int degree_used = 0;
};

struct BsdeSolution {
    double y0 = 0.0;
    double y0_se = 0.0;           // standard error of the step-0 cross-path mean
    std::vector<double> z;        // fitted Z, layout z[i*M + p], i in [0, N)
    std::vector<double> y_path;   // per-path Y at step 0 (constant when the initial state is)
    std::vector<StepDiagnostics> steps; // N+1 entries, index = grid step
    std::size_t total_z_clips = 0;
    std::size_t total_y_clips = 0;
    std::vector<std::string> warnings;

    std::size_t M = 0;
    std::size_t N = 0;
    double T = 1.0;
    double dt() const { return T / (double)N; }
    double z_at(std::size_t p, std::size_t i) const { return z[i * M + p]; }
};

// Regression Monte Carlo for the scalar terminal-value equation
//   Y_i = E[ Y_{i+1} | X_i ] - g(t_i, Z_i) dt,
//   Z_i = -(1/dt) E[ Y_{i+1} dB_i | X_i ],
//   Y_N = xi(X_N),
// conditional expectations by global polynomial regression on the state.
// Z is truncated to the clip ball (counts reported; a run that clips is not
// acceptance-grade), Y to the a-priori band [min xi - Gmax (T-t), max xi +
// Gmax (T-t)] with Gmax the driver bound over the clip ball. d = 1 only.
BsdeSolution solve_lsmc(const PathEnsemble& ens, const StatePath& state, const EndowmentFn& xi,
                        const Generator& gen, const SolverOptions& opts = {});

// Exponential-utility closed form on samples of the terminal claim:
// -(1/gamma) ln( mean exp(-gamma xi) ), evaluated by shifted log-sum-exp;
// the standard error comes from the delta method.
struct OracleEstimate {
    double value = 0.0;
    double se = 0.0;
};

OracleEstimate entropic_oracle(std::span<const double> xi_samples, double gamma);

// Exact solution for an affine terminal claim xi = a B_T + b: the value
// process is a B_t + b - int_t^T g(s, -a) ds with constant Z = -a. The time
// integral is evaluated by Simpson (exact for the constant/affine offsets in
// the catalogue).
struct AffineOracle {
    double y0 = 0.0;
    double z = 0.0;
    std::function<double(double t, double brownian)> value;
};

AffineOracle affine_oracle(double a, double b, const Generator& gen);

// Consistency probe for the dynamic-programming split: solve on [t*, T],
// regress the resulting values onto the state at t*, then solve [0, t*] with
// that fitted function as terminal data. Both the direct and nested values
// are returned; they agree up to regression error when the recursion is
// time-consistent.
struct TwoStageResult {
    double y0_direct = 0.0;
    double y0_nested = 0.0;
    BsdeSolution direct;
};

TwoStageResult two_stage_solve(const PathEnsemble& ens, const StatePath& state,
                               const EndowmentFn& xi, const Generator& gen,
                               std::size_t split_step, const SolverOptions& opts = {});

// View of steps [lo, hi) / grid points [lo, hi] as a standalone ensemble.
PathEnsemble slice_ensemble(const PathEnsemble& ens, std::size_t lo, std::size_t hi);
StatePath slice_state(const StatePath& s, std::size_t lo, std::size_t hi);

} // namespace dcu
