#include "dcu/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "dcu/errors.hpp"
#include "dcu/parallel.hpp"

namespace dcu {

namespace {

// Cholesky solve of the leading nb x nb block of the symmetric matrix packed
// row-wise (full storage). Returns false if a pivot collapses.
bool cholesky_solve(std::vector<double> a, std::size_t full, std::size_t nb,
                    std::span<const double> rhs, std::span<double> out) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < nb; ++i) max_diag = std::max(max_diag, a[i * full + i]);
    if (!(max_diag > 0.0)) return false;
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = i; j < nb; ++j) {
            double s = a[i * full + j];
            for (std::size_t k = 0; k < i; ++k) s -= a[i * full + k] * a[j * full + k];
            if (i == j) {
                if (s <= 1e-12 * max_diag) return false;
                a[i * full + i] = std::sqrt(s);
            } else {
                a[j * full + i] = s / (a[i * full + i]);
            }
        }
    }
    // forward then backward substitution
    std::vector<double> w(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * full + k] * w[k];
        w[i] = s / a[i * full + i];
    }
    for (std::size_t ii = nb; ii-- > 0;) {
        double s = w[ii];
        for (std::size_t k = ii + 1; k < nb; ++k) s -= a[k * full + ii] * out[k];
        out[ii] = s / a[ii * full + ii];
    }
    return true;
}

struct Standardized {
    double mean = 0.0;
    double scale = 1.0;
    bool constant = false;
};

Standardized standardize(std::span<const double> x) {
    const auto ms = par::block_mean_se(x.size(), [&](std::size_t i) { return x[i]; });
    const double var = par::block_sum(x.size(), [&](std::size_t i) {
                           const double c = x[i] - ms.mean;
                           return c * c;
                       }) /
                       std::max<std::size_t>(1, x.size() - 1);
    Standardized st;
    st.mean = ms.mean;
    st.scale = std::sqrt(var);
    if (!(st.scale > 1e-12 * std::max(1.0, std::fabs(ms.mean)))) {
        st.scale = 1.0;
        st.constant = true;
    }
    return st;
}

// Shared regression state for one time step: Gram matrix of the monomial
// basis in the standardized coordinate plus however many right-hand sides.
struct StepRegression {
    std::size_t nb = 0;
    Standardized st;
    std::vector<double> gram; // nb x nb, symmetric, full storage
    std::vector<double> phi;  // M x nb design matrix

    void build(std::span<const double> x, int degree) {
        st = standardize(x);
        nb = st.constant ? 1 : (std::size_t)degree + 1;
        const std::size_t M = x.size();
        phi.resize(M * nb);
        par::for_each_index(M, [&](std::size_t p) {
            const double u = (x[p] - st.mean) / st.scale;
            double* row = phi.data() + p * nb;
            double v = 1.0;
            for (std::size_t k = 0; k < nb; ++k) {
                row[k] = v;
                v *= u;
            }
        });
        const std::size_t K = nb * (nb + 1) / 2;
        auto packed = par::block_reduce(M, K, [&](std::size_t p, double* acc) {
            const double* row = phi.data() + p * nb;
            std::size_t c = 0;
            for (std::size_t i = 0; i < nb; ++i)
                for (std::size_t j = i; j < nb; ++j) acc[c++] += row[i] * row[j];
        });
        gram.assign(nb * nb, 0.0);
        std::size_t c = 0;
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i; j < nb; ++j) {
                gram[i * nb + j] = packed[c];
                gram[j * nb + i] = packed[c];
                ++c;
            }
    }

    std::vector<double> rhs_for(std::span<const double> target) const {
        return par::block_reduce(target.size(), nb, [&](std::size_t p, double* acc) {
            const double* row = phi.data() + p * nb;
            for (std::size_t k = 0; k < nb; ++k) acc[k] += row[k] * target[p];
        });
    }

    // Solve with rank degradation on the leading blocks; returns the degree
    // actually used (coef resized to it + 1).
    int solve(std::span<const double> rhs, std::vector<double>& coef, bool& degraded) const {
        for (std::size_t use = nb; use >= 1; --use) {
            coef.assign(use, 0.0);
            if (cholesky_solve(gram, nb, use, rhs.subspan(0, use), coef)) {
                degraded = use != nb;
                return (int)use - 1;
            }
        }
        throw BlowupError("regression: normal equations degenerate at every degree");
    }

    void predict(std::span<const double> coef, std::span<double> out) const {
        const std::size_t M = out.size();
        par::for_each_index(M, [&](std::size_t p) {
            const double* row = phi.data() + p * nb;
            double v = 0.0;
            for (std::size_t k = 0; k < coef.size(); ++k) v += row[k] * coef[k];
            out[p] = v;
        });
    }
};

double PolyFitEval(const PolyFit& f, double x) {
    const double u = (x - f.mean) / f.scale;
    double v = 0.0, pw = 1.0;
    for (double c : f.coef) {
        v += c * pw;
        pw *= u;
    }
    return v;
}

// Largest |g(t, z)| over the clip ball, via the endpoints and a coarse
// interior scan; only used to size the a-priori Y band, so looseness is
// harmless.
double driver_sup(const Generator& gen, double t, double radius) {
    double m = 0.0;
    for (int k = -4; k <= 4; ++k) {
        const double z = radius * (double)k / 4.0;
        m = std::max(m, std::fabs(gen(t, z)));
    }
    return m;
}

} // namespace

double PolyFit::eval(double x) const { return PolyFitEval(*this, x); }

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
    if (x.size() != y.size() || x.empty())
        throw InputError("fit_polynomial: size mismatch or empty");
    if (degree < 0) throw ParamError("fit_polynomial: negative degree");
    StepRegression reg;
    reg.build(x, degree);
    const auto rhs = reg.rhs_for(y);
    PolyFit fit;
    fit.mean = reg.st.mean;
    fit.scale = reg.st.scale;
    fit.degree = reg.solve(rhs, fit.coef, fit.degraded);
    if (reg.st.constant) fit.degraded = degree > 0;
    return fit;
}

BsdeSolution solve_lsmc(const PathEnsemble& ens, const StatePath& state, const EndowmentFn& xi,
                        const Generator& gen, const SolverOptions& opts) {
    if (ens.d != 1)
        throw ParamError("solve_lsmc: the regression state is scalar, need d = 1 (got d=" +
                         std::to_string(ens.d) + ")");
    if (state.M != ens.M || state.N != ens.N)
        throw ParamError("solve_lsmc: state grid does not match the ensemble");
    if (opts.basis_degree < 0 || opts.basis_degree > 12)
        throw ParamError("solve_lsmc: basis degree out of range");
    if (!(opts.z_clip_radius > 0.0))
        throw ParamError("solve_lsmc: clip radius must be positive");

    const std::size_t M = ens.M, N = ens.N;
    const double dt = ens.dt();

    BsdeSolution sol;
    sol.M = M;
    sol.N = N;
    sol.T = ens.T;
    sol.z.assign(N * M, 0.0);
    sol.steps.assign(N + 1, {});

    // terminal values and the a-priori band
    std::vector<double> ynext(M), ycur(M), target(M), fitted(M);
    par::for_each_index(M, [&](std::size_t p) { ynext[p] = xi(state.at(p, N)); });
    for (std::size_t p = 0; p < M; ++p)
        if (!std::isfinite(ynext[p]))
            throw BlowupError("solve_lsmc: non-finite terminal value on path " + std::to_string(p));
    const double xi_max = par::block_max(M, [&](std::size_t p) { return ynext[p]; });
    const double xi_min = -par::block_max(M, [&](std::size_t p) { return -ynext[p]; });

    sol.steps[N].t = opts.time_offset + ens.T;
    sol.steps[N].y_mean = par::block_sum(M, [&](std::size_t p) { return ynext[p]; }) / (double)M;
    sol.steps[N].degree_used = -1; // no regression at the terminal step

    std::vector<double> zrow(M), acoef, zcoef;
    double step0_target_sd = 0.0;

    for (std::size_t i = N; i-- > 0;) {
        const double t = opts.time_offset + dt * (double)i;
        StepDiagnostics& diag = sol.steps[i];
        diag.t = t;

        StepRegression reg;
        reg.build(state.slice(i), opts.basis_degree);

        // conditional mean of Y_{i+1}
        const auto rhs_y = reg.rhs_for(ynext);
        bool degr_y = false;
        const int deg_y = reg.solve(rhs_y, acoef, degr_y);
        reg.predict(acoef, fitted);

        // Z from the one-step covariation with the Brownian increment. The
        // conditional-mean fit is subtracted first: any function of the step-i
        // state is orthogonal to the increment, so the projection target is
        // unchanged while its variance drops from O(E[Y^2]/dt) to O(1). The
        // raw product would amplify regression noise by 1/dt and the backward
        // sweep would compound it through the driver.
        par::for_each_index(M, [&](std::size_t p) {
            target[p] = (ynext[p] - fitted[p]) * ens.step(p, i)[0];
        });
        const auto rhs_z = reg.rhs_for(target);
        bool degr_z = false;
        reg.solve(rhs_z, zcoef, degr_z);
        reg.predict(zcoef, zrow);

        const double R = opts.z_clip_radius;
        auto clip_counts = par::block_reduce(M, 1, [&](std::size_t p, double* acc) {
            double z = -zrow[p] / dt;
            if (z > R) {
                z = R;
                acc[0] += 1.0;
            } else if (z < -R) {
                z = -R;
                acc[0] += 1.0;
            }
            zrow[p] = z;
            sol.z[i * M + p] = z;
        });
        diag.z_clip_count = (std::size_t)clip_counts[0];

        // Y update; the driver has no Y argument so extra Picard sweeps
        // reproduce the same values, see SolverOptions.
        const double gmax = driver_sup(gen, t, R);
        const double band_lo = xi_min - gmax * (ens.T - dt * (double)i);
        const double band_hi = xi_max + gmax * (ens.T - dt * (double)i);
        const int sweeps = opts.implicit_picard ? std::max(1, opts.picard_iters) : 1;
        std::size_t y_clips = 0;
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            auto yclip_counts = par::block_reduce(M, 1, [&](std::size_t p, double* acc) {
                double y = fitted[p] - gen(t, zrow[p]) * dt;
                if (y < band_lo) {
                    y = band_lo;
                    acc[0] += 1.0;
                } else if (y > band_hi) {
                    y = band_hi;
                    acc[0] += 1.0;
                }
                ycur[p] = y;
            });
            y_clips = (std::size_t)yclip_counts[0];
        }
        diag.y_clip_count = y_clips;
        diag.degree_used = deg_y;
        if (degr_y && !reg.st.constant)
            sol.warnings.push_back("step " + std::to_string(i) + ": rank degradation to degree " +
                                   std::to_string(deg_y));

        // regression quality of the conditional-mean fit
        const double ymean = par::block_sum(M, [&](std::size_t p) { return ynext[p]; }) / (double)M;
        auto ss = par::block_reduce(M, 2, [&](std::size_t p, double* acc) {
            const double r = ynext[p] - fitted[p];
            const double c = ynext[p] - ymean;
            acc[0] += r * r;
            acc[1] += c * c;
        });
        diag.r2 = ss[1] > 0.0 ? 1.0 - ss[0] / ss[1] : 1.0;

        diag.y_mean = par::block_sum(M, [&](std::size_t p) { return ycur[p]; }) / (double)M;
        diag.z_mean = par::block_sum(M, [&](std::size_t p) { return zrow[p]; }) / (double)M;

        if (i == 0) {
            // dispersion of the step-0 target, for the Y0 standard error
            const double tmean = par::block_sum(M, [&](std::size_t p) {
                                     return ynext[p] - gen(t, zrow[p]) * dt;
                                 }) /
                                 (double)M;
            const double tvar = par::block_sum(M, [&](std::size_t p) {
                                    const double v = ynext[p] - gen(t, zrow[p]) * dt - tmean;
                                    return v * v;
                                }) /
                                std::max<std::size_t>(1, M - 1);
            step0_target_sd = std::sqrt(std::max(0.0, tvar));
        }

        std::swap(ynext, ycur);
    }

    sol.y_path = ynext;
    sol.y0 = par::block_sum(M, [&](std::size_t p) { return ynext[p]; }) / (double)M;
    sol.y0_se = step0_target_sd / std::sqrt((double)M);
    for (const auto& d : sol.steps) {
        sol.total_z_clips += d.z_clip_count;
        sol.total_y_clips += d.y_clip_count;
    }
    return sol;
}

OracleEstimate entropic_oracle(std::span<const double> xi, double gamma) {
    if (xi.empty()) throw InputError("entropic_oracle: empty sample set");
    if (!(gamma > 0.0)) throw ParamError("entropic_oracle: gamma must be positive");
    const std::size_t M = xi.size();
    const double shift = par::block_max(M, [&](std::size_t i) { return -gamma * xi[i]; });
    const auto ms = par::block_mean_se(M, [&](std::size_t i) {
        return std::exp(-gamma * xi[i] - shift);
    });
    OracleEstimate est;
    est.value = -(shift + std::log(ms.mean)) / gamma;
    est.se = ms.se / (gamma * ms.mean);
    return est;
}

AffineOracle affine_oracle(double a, double b, const Generator& gen) {
    AffineOracle o;
    o.z = -a;
    const double T = gen.params.T;
    Generator gcopy = gen; // owned by the closure, the reference may not outlive us
    auto integral_to_T = [a, gcopy, T](double t) {
        // Simpson on [t, T], exact for the constant/affine offsets in the catalogue
        const int n = 128;
        const double h = (T - t) / n;
        double s = gcopy(t, -a) + gcopy(T, -a);
        for (int k = 1; k < n; ++k) s += gcopy(t + h * k, -a) * (k % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    o.y0 = b - integral_to_T(0.0);
    o.value = [a, b, integral_to_T](double t, double brownian) {
        return a * brownian + b - integral_to_T(t);
    };
    return o;
}

PathEnsemble slice_ensemble(const PathEnsemble& ens, std::size_t lo, std::size_t hi) {
    if (lo >= hi || hi > ens.N) throw ParamError("slice_ensemble: bad step range");
    PathEnsemble out;
    out.M = ens.M;
    out.N = hi - lo;
    out.d = ens.d;
    out.T = ens.dt() * (double)(hi - lo);
    out.seed = ens.seed;
    const std::size_t d = (std::size_t)ens.d;
    out.increments.resize(ens.M * out.N * d);
    par::for_each_index(ens.M, [&](std::size_t p) {
        const double* src = ens.increments.data() + (p * ens.N + lo) * d;
        double* dst = out.increments.data() + p * out.N * d;
        for (std::size_t k = 0; k < out.N * d; ++k) dst[k] = src[k];
    });
    return out;
}

StatePath slice_state(const StatePath& s, std::size_t lo, std::size_t hi) {
    if (lo >= hi || hi > s.N) throw ParamError("slice_state: bad step range");
    StatePath out;
    out.M = s.M;
    out.N = hi - lo;
    out.T = (s.T / (double)s.N) * (double)(hi - lo);
    out.x.resize((out.N + 1) * s.M);
    for (std::size_t i = lo; i <= hi; ++i)
        std::copy(s.x.begin() + (long)(i * s.M), s.x.begin() + (long)((i + 1) * s.M),
                  out.x.begin() + (long)((i - lo) * s.M));
    return out;
}

TwoStageResult two_stage_solve(const PathEnsemble& ens, const StatePath& state,
                               const EndowmentFn& xi, const Generator& gen,
                               std::size_t split_step, const SolverOptions& opts) {
    if (split_step == 0 || split_step >= ens.N)
        throw ParamError("two_stage_solve: split step must be strictly inside the grid");
    TwoStageResult res;
    res.direct = solve_lsmc(ens, state, xi, gen, opts);
    res.y0_direct = res.direct.y0;

    // stage A: [t*, T]
    const auto ens_a = slice_ensemble(ens, split_step, ens.N);
    const auto st_a = slice_state(state, split_step, ens.N);
    SolverOptions opts_a = opts;
    opts_a.time_offset = opts.time_offset + ens.dt() * (double)split_step;
    const auto sol_a = solve_lsmc(ens_a, st_a, xi, gen, opts_a);

    // fit x -> value at t* and use it as terminal data for stage B
    const auto fit = fit_polynomial(st_a.slice(0), sol_a.y_path, opts.basis_degree);
    const auto ens_b = slice_ensemble(ens, 0, split_step);
    const auto st_b = slice_state(state, 0, split_step);
    const auto sol_b = solve_lsmc(
        ens_b, st_b, [&fit](double x) { return fit.eval(x); }, gen, opts);
    res.y0_nested = sol_b.y0;
    return res;
}

} // namespace dcu
