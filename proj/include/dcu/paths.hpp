#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcu/parallel.hpp"

namespace dcu {

// Brownian increment ensemble. Increments are pregenerated from per-path
// counter-based substreams: path p's draws depend only on (seed, p), never on
// M, N of other runs' layout or the thread count, so enlarging the ensemble
// extends it without disturbing existing paths.
struct PathEnsemble {
    std::size_t M = 0; // paths
    std::size_t N = 0; // time steps
    int d = 1;         // Brownian dimension
    double T = 1.0;
    std::uint64_t seed = 0;

    // increments[(p*N + i)*d + c], already scaled by sqrt(dt)
    std::vector<double> increments;

    double dt() const { return T / (double)N; }
    std::span<const double> step(std::size_t p, std::size_t i) const {
        return {increments.data() + (p * N + i) * (std::size_t)d, (std::size_t)d};
    }
};

struct GenerateOptions {
    std::size_t capacity_cap = (std::size_t)1 << 28; // max doubles in the buffer
};

PathEnsemble generate(std::size_t M, std::size_t N, int d, double T, std::uint64_t seed,
                      const GenerateOptions& opts = {});

// Scalar state on the same grid, step-major so a regression at step i reads
// contiguous memory.
struct StatePath {
    std::size_t M = 0;
    std::size_t N = 0;
    double T = 1.0;
    std::vector<double> x; // (N+1) * M

    double at(std::size_t p, std::size_t i) const { return x[i * M + p]; }
    std::span<const double> slice(std::size_t i) const { return {x.data() + i * M, M}; }
};

using DriftFn = std::function<double(double t, double x)>;
using VolFn = std::function<void(double t, double x, std::span<double> out)>;

// Euler-Maruyama for dX = b dt + sigma . dB, scalar X, d-dim noise.
// BlowupError (naming the first offending path) if the state leaves the
// finite range.
StatePath forward_sde_euler(const PathEnsemble& ens, double x0, const DriftFn& b,
                            const VolFn& sigma);

// Exact log-scheme for geometric Brownian motion:
// X_t = x0 exp((b - sigma^2/2) t + sigma B_t) on the grid (d = 1).
StatePath forward_gbm_exact(const PathEnsemble& ens, double x0, double b, double sigma);

// X = B itself (d = 1).
StatePath brownian_state(const PathEnsemble& ens);

// Control evaluated per (path, step); fills d components.
using ControlFn = std::function<void(std::size_t path, std::size_t step, double t,
                                     std::span<double> out)>;

ControlFn constant_control(std::vector<double> q);

// Stochastic exponential of int q dB on the grid. log L is the exact
// discrete sum  sum_i ( q_i . dB_i - |q_i|^2 dt / 2 ), held on the log scale
// so L is positive by construction and sub-interval factorization is exact
// in the stored arithmetic.
struct DensityPath {
    std::size_t M = 0;
    std::size_t N = 0;
    double T = 1.0;
    std::vector<double> logL; // (N+1) * M, step-major

    double log_at(std::size_t p, std::size_t i) const { return logL[i * M + p]; }
    double L(std::size_t p, std::size_t i) const;
};

DensityPath stochastic_exponential(const PathEnsemble& ens, const ControlFn& q);

// Martingale diagnostic: mean and standard error of L_T.
par::MeanSE density_terminal_mean(const DensityPath& dp);

// Integrability-space statistics used by the admissibility and bound checks.
//   LlnLp:       E |eta| (ln(1+|eta|))^p
//   LexpMuLnLp:  E |eta| exp( mu (ln(1+|eta|))^p )
//   ExpMuLp:     E exp( mu |eta|^p )
enum class SpaceFamily { LlnLp, LexpMuLnLp, ExpMuLp };

struct SpaceSpec {
    SpaceFamily family = SpaceFamily::LlnLp;
    double mu = 1.0;
    double p = 1.0;
};

par::MeanSE space_statistic(std::span<const double> samples, const SpaceSpec& spec);

// Debug dump of the first min(M, cap) paths, one row per grid time.
void dump_paths_csv(const StatePath& s, const std::string& file, std::size_t max_paths = 10000);

} // namespace dcu
