#include "dcu/paths.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dcu/errors.hpp"
#include "dcu/rng.hpp"

namespace dcu {

PathEnsemble generate(std::size_t M, std::size_t N, int d, double T, std::uint64_t seed,
                      const GenerateOptions& opts) {
    if (M == 0 || N == 0 || d < 1 || !(T > 0.0))
        throw ParamError("generate: need M >= 1, N >= 1, d >= 1, T > 0");
    const std::size_t total = M * N * (std::size_t)d;
    if (total / M / N != (std::size_t)d || total > opts.capacity_cap)
        throw CapacityError("generate: M*N*d = " + std::to_string(M) + "*" + std::to_string(N) +
                            "*" + std::to_string(d) + " exceeds the capacity cap " +
                            std::to_string(opts.capacity_cap));
    PathEnsemble ens;
    ens.M = M;
    ens.N = N;
    ens.d = d;
    ens.T = T;
    ens.seed = seed;
    ens.increments.resize(total);
    const double sdt = std::sqrt(T / (double)N);
    par::for_each_index(M, [&](std::size_t p) {
        rng::NormalStream stream(seed, p);
        double* row = ens.increments.data() + p * N * (std::size_t)d;
        for (std::size_t i = 0; i < N * (std::size_t)d; ++i)
            row[i] = sdt * stream.normal(i);
    });
    return ens;
}

namespace {

void throw_if_blown(const std::vector<std::uint8_t>& blown, const char* where) {
    for (std::size_t p = 0; p < blown.size(); ++p)
        if (blown[p])
            throw BlowupError(std::string(where) + ": non-finite state on path " +
                              std::to_string(p));
}

} // namespace

StatePath forward_sde_euler(const PathEnsemble& ens, double x0, const DriftFn& b,
                            const VolFn& sigma) {
    StatePath s;
    s.M = ens.M;
    s.N = ens.N;
    s.T = ens.T;
    s.x.resize((ens.N + 1) * ens.M);
    const double dt = ens.dt();
    const std::size_t d = (std::size_t)ens.d;
    std::vector<std::uint8_t> blown(ens.M, 0);
    par::for_each_index(ens.M, [&](std::size_t p) {
        std::vector<double> vol(d);
        double x = x0;
        s.x[p] = x;
        for (std::size_t i = 0; i < ens.N; ++i) {
            const double t = dt * (double)i;
            double drift = b(t, x);
            sigma(t, x, vol);
            const auto db = ens.step(p, i);
            double diff = 0.0;
            for (std::size_t c = 0; c < d; ++c) diff += vol[c] * db[c];
            x += drift * dt + diff;
            if (!std::isfinite(x)) {
                blown[p] = 1;
                x = 0.0;
            }
            s.x[(i + 1) * ens.M + p] = x;
        }
    });
    throw_if_blown(blown, "forward_sde_euler");
    return s;
}

StatePath forward_gbm_exact(const PathEnsemble& ens, double x0, double b, double sigma) {
    if (ens.d != 1) throw ParamError("forward_gbm_exact: d must be 1");
    if (!(x0 > 0.0)) throw ParamError("forward_gbm_exact: x0 must be positive");
    StatePath s;
    s.M = ens.M;
    s.N = ens.N;
    s.T = ens.T;
    s.x.resize((ens.N + 1) * ens.M);
    const double dt = ens.dt();
    const double mu = b - 0.5 * sigma * sigma;
    par::for_each_index(ens.M, [&](std::size_t p) {
        double bsum = 0.0;
        s.x[p] = x0;
        for (std::size_t i = 0; i < ens.N; ++i) {
            bsum += ens.step(p, i)[0];
            s.x[(i + 1) * ens.M + p] = x0 * std::exp(mu * dt * (double)(i + 1) + sigma * bsum);
        }
    });
    return s;
}

StatePath brownian_state(const PathEnsemble& ens) {
    if (ens.d != 1) throw ParamError("brownian_state: d must be 1");
    StatePath s;
    s.M = ens.M;
    s.N = ens.N;
    s.T = ens.T;
    s.x.resize((ens.N + 1) * ens.M);
    par::for_each_index(ens.M, [&](std::size_t p) {
        double bsum = 0.0;
        s.x[p] = 0.0;
        for (std::size_t i = 0; i < ens.N; ++i) {
            bsum += ens.step(p, i)[0];
            s.x[(i + 1) * ens.M + p] = bsum;
        }
    });
    return s;
}

ControlFn constant_control(std::vector<double> q) {
    return [q = std::move(q)](std::size_t, std::size_t, double, std::span<double> out) {
        if (out.size() != q.size())
            throw ParamError("constant_control: control has " + std::to_string(q.size()) +
                             " components, ensemble wants " + std::to_string(out.size()));
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = q[c];
    };
}

double DensityPath::L(std::size_t p, std::size_t i) const {
    return std::exp(logL[i * M + p]);
}

DensityPath stochastic_exponential(const PathEnsemble& ens, const ControlFn& q) {
    DensityPath dp;
    dp.M = ens.M;
    dp.N = ens.N;
    dp.T = ens.T;
    dp.logL.resize((ens.N + 1) * ens.M);
    const double dt = ens.dt();
    const std::size_t d = (std::size_t)ens.d;
    // probe once outside the parallel region; a malformed control then throws
    // instead of terminating inside the omp loop
    {
        std::vector<double> probe(d);
        q(0, 0, 0.0, probe);
    }
    std::vector<std::uint8_t> blown(ens.M, 0);
    par::for_each_index(ens.M, [&](std::size_t p) {
        std::vector<double> qv(d);
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
            if (!std::isfinite(acc)) blown[p] = 1;
            dp.logL[(i + 1) * ens.M + p] = acc;
        }
    });
    throw_if_blown(blown, "stochastic_exponential");
    return dp;
}

par::MeanSE density_terminal_mean(const DensityPath& dp) {
    const double* last = dp.logL.data() + dp.N * dp.M;
    return par::block_mean_se(dp.M, [&](std::size_t p) { return std::exp(last[p]); });
}

par::MeanSE space_statistic(std::span<const double> samples, const SpaceSpec& spec) {
    if (samples.empty()) throw InputError("space_statistic: empty sample set");
    const double bad = par::block_max(samples.size(), [&](std::size_t i) {
        return std::isfinite(samples[i]) ? 0.0 : 1.0;
    });
    if (bad > 0.0) throw InputError("space_statistic: non-finite sample");
    auto integrand = [&](double eta) {
        const double a = std::fabs(eta);
        switch (spec.family) {
            case SpaceFamily::LlnLp: return a * std::pow(std::log1p(a), spec.p);
            case SpaceFamily::LexpMuLnLp:
                return a * std::exp(spec.mu * std::pow(std::log1p(a), spec.p));
            case SpaceFamily::ExpMuLp: return std::exp(spec.mu * std::pow(a, spec.p));
        }
        return 0.0;
    };
    return par::block_mean_se(samples.size(), [&](std::size_t i) { return integrand(samples[i]); });
}

void dump_paths_csv(const StatePath& s, const std::string& file, std::size_t max_paths) {
    std::ofstream out(file);
    if (!out) throw InputError("dump_paths_csv: cannot open '" + file + "' for writing");
    const std::size_t mp = s.M < max_paths ? s.M : max_paths;
    const double dt = s.T / (double)s.N;
    char buf[64];
    out << "step,t";
    for (std::size_t p = 0; p < mp; ++p) out << ",path" << p;
    out << '\n';
    for (std::size_t i = 0; i <= s.N; ++i) {
        out << i << ',';
        std::snprintf(buf, sizeof buf, "%.17g", dt * (double)i);
        out << buf;
        for (std::size_t p = 0; p < mp; ++p) {
            std::snprintf(buf, sizeof buf, "%.17g", s.at(p, i));
            out << ',' << buf;
        }
        out << '\n';
    }
}

} // namespace dcu
