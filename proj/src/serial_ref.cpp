#include "dcu/serial_ref.hpp"

#include <cmath>

#include "dcu/errors.hpp"
#include "dcu/rng.hpp"

namespace dcu::serial {

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

par::MeanSE mean_se(std::span<const double> v) {
    par::MeanSE r;
    if (v.empty()) return r;
    r.mean = sum(v) / (double)v.size();
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        const double var = ss / ((double)v.size() - 1.0);
        r.se = var > 0.0 ? std::sqrt(var / (double)v.size()) : 0.0;
    }
    return r;
}

std::vector<double> legendre_bruteforce(const TabulatedConvexFunction& src,
                                        const std::vector<double>& z_grid) {
    std::vector<double> out(z_grid.size());
    for (std::size_t j = 0; j < z_grid.size(); ++j) {
        const double z = z_grid[j];
        double best = -kPlusInf;
        for (std::size_t i = src.first_finite; i <= src.last_finite; ++i) {
            const double v = z * src.grid[i] - src.values[i];
            if (v > best) best = v;
        }
        out[j] = best;
    }
    return out;
}

PathEnsemble generate(std::size_t M, std::size_t N, int d, double T, std::uint64_t seed) {
    if (M == 0 || N == 0 || d < 1 || !(T > 0.0))
        throw ParamError("serial::generate: need M >= 1, N >= 1, d >= 1, T > 0");
    PathEnsemble ens;
    ens.M = M;
    ens.N = N;
    ens.d = d;
    ens.T = T;
    ens.seed = seed;
    ens.increments.resize(M * N * (std::size_t)d);
    const double sdt = std::sqrt(T / (double)N);
    for (std::size_t p = 0; p < M; ++p) {
        rng::NormalStream stream(seed, p);
        double* row = ens.increments.data() + p * N * (std::size_t)d;
        for (std::size_t i = 0; i < N * (std::size_t)d; ++i)
            row[i] = sdt * stream.normal(i);
    }
    return ens;
}

DensityPath stochastic_exponential(const PathEnsemble& ens, const ControlFn& q) {
    DensityPath dp;
    dp.M = ens.M;
    dp.N = ens.N;
    dp.T = ens.T;
    dp.logL.resize((ens.N + 1) * ens.M);
    const double dt = ens.dt();
    const std::size_t d = (std::size_t)ens.d;
    std::vector<double> qv(d);
    for (std::size_t p = 0; p < ens.M; ++p) {
        double acc = 0.0;
        dp.logL[p] = 0.0;
        for (std::size_t i = 0; i < ens.N; ++i) {
            q(p, i, dt * (double)i, qv);
            const auto db = ens.step(p, i);
            double dot = 0.0, q2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                dot += qv[c] * db[c];
                q2 += qv[c] * qv[c];
            }
            acc += dot - 0.5 * q2 * dt;
            dp.logL[(i + 1) * ens.M + p] = acc;
        }
    }
    return dp;
}

double weighted_mean(std::span<const double> w, std::span<const double> y) {
    if (w.size() != y.size() || w.empty())
        throw InputError("serial::weighted_mean: size mismatch or empty");
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * y[i];
    return s / (double)w.size();
}

} // namespace dcu::serial
