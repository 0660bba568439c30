#pragma once
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dcu/growth.hpp"

namespace dcu {

// Extended-real sentinel. Core penalties take the value kPlusInf outside
// their effective domain; generators are finite everywhere.
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

using Point = std::vector<double>;
using PointFn = std::function<double(double t, std::span<const double>)>;

// Euclidean norm with an exact d=1 fast path (fabs avoids the sqrt(x*x)
// double rounding so closed-form equalities stay exact on grid points).
double norm(std::span<const double> v);

// Subdifferential of a scalar convex function at a 1-d point.
// slopes = [lo, hi]; is_ball marks the kink-at-zero case of radial
// functions where the set is a centered ball of radius hi.
struct SlopeInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Subdifferential {
    SlopeInterval slopes;
    bool is_ball = false;
    double minimal = 0.0; // minimal-norm element of the interval/ball
};

Subdifferential make_subdiff(double lo, double hi, bool is_ball = false);

// Convex core penalty f(t, q) with its growth-class certificate data.
struct CoreFunction {
    PointFn f;                             // extended-real valued
    TimeFn h;                              // offset process of the class lower bound and of the anchor check
    std::function<Point(double)> anchor;   // qbar(t) with |qbar| <= k and f(t, qbar(t)) <= h(t)
    CoreClass cls = CoreClass::A1;
    GrowthParams params;
    std::string tag;                       // catalogue tag when applicable, else ""

    double operator()(double t, std::span<const double> q) const { return f(t, q); }
    bool in_domain(double t, std::span<const double> q) const { return f(t, q) < kPlusInf; }
};

// BSDE driver g(t, z), conjugate to a core penalty. Always finite.
struct Generator {
    PointFn g;
    TimeFn hbar;                           // offset of the conjugate upper bound
    TimeFn h;                              // core-side offset, used in the lower bound g >= -k|z| - h
    GenClass cls = GenClass::H1;
    GrowthParams params;
    std::string tag;
    // Analytic subgradient for d = 1 (empty when not available). For the
    // exponential tag this is the subgradient of the true conjugate, which
    // matches the stored formula on |z| >= 1; pairing attainability with the
    // printed formula inside |z| < 1 would break the product identity.
    std::function<Subdifferential(double t, double z)> subgrad1d;
    // Nonempty when the stored closed form is only valid on part of the axis.
    std::string caveat;

    double operator()(double t, std::span<const double> z) const { return g(t, z); }
    double operator()(double t, double z) const { return g(t, std::span<const double>(&z, 1)); }
};

struct CatalogueEntry {
    CoreFunction core;
    Generator gen;
};

// Known catalogue tags:
//   linear_dirac     f = h at q = qbar, +inf elsewhere          g = qbar . z - h
//   drift_band       f = 0 on |q| <= gamma, +inf outside        g = gamma |z|
//   entropic         f = |q|^2 / (2 gamma)                      g = gamma |z|^2 / 2
//   capped_quadratic f = |q|^2/2 on |q| <= gamma, +inf outside  g = |z|^2/2, then gamma|z| - gamma^2/2
//   exponential      f = e^{|q|} + h                            g = |z|(ln|z| - 1) - h   (stored as printed;
//                                                               only valid for |z| >= 1, see caveat)
//   quartic          f = |q|^4/4 + h                            g = (3/4)|z|^{4/3} - h
//   piecewise_vii    d=1: f = +inf (q<1), q-1 (1<=q<=2), q^2/4 (q>2)
//                                                               g = z (z<1), z^2 (z>=1)
// Tag-pinned constants: exponential fixes (c, gamma, lambda) = (1, 2, 1),
// quartic fixes (alpha, alpha_star, gamma) = (4/3, 4, 4^{1/3}), piecewise_vii
// fixes gamma = 2; supplied values for those fields are overridden.
// Offset bookkeeping: for exponential the class offset is h+1 (the minimum of
// f is 1 + h, so the anchor bound needs the lift); for piecewise_vii it is
// max(h, 1/4) (the quadratic lower bound with gamma = 2 fails on [1,2)
// otherwise, worst at q = 1).
CatalogueEntry build_catalogue_entry(const std::string& tag, const GrowthParams& params,
                                     TimeFn h_user = constant_fn(0.0));
// linear_dirac with an explicit anchor value (d=1 scalar, placed on axis 0
// for d > 1). The default overload uses qbar = params.k.
CatalogueEntry build_catalogue_entry_dirac(const GrowthParams& params, double qbar,
                                           TimeFn h_user = constant_fn(0.0));

const std::vector<std::string>& catalogue_tags();

// Conjugate-side offset from the core-side data:
//   A1: h + k^2/(2 gamma)
//   A2: h + gamma^{-1/(alpha-1)} k^{alpha*}
//   A3: h + exp(2 gamma^{-1/lambda} k^{1/lambda}) + slack constant (numeric)
//   A4: h (valid when k <= gamma)
TimeFn compute_hbar(CoreClass cls, const GrowthParams& params, const TimeFn& h);

// Numeric slack constant of the A3 -> H3 conjugation: smallest C with
// sup_q ( s q - c exp(2 gamma^{-1/lambda} q^{1/lambda}) ) <= gamma s (ln(1+s))^lambda + C
// over a dense radial working grid, doubled to absorb off-grid slack.
double a3_conjugation_slack(const GrowthParams& params);

// Class bound evaluators (scalar radial coordinate).
double generator_upper_bound(GenClass cls, const GrowthParams& p, double hbar_t, double abs_z);
double core_lower_bound(CoreClass cls, const GrowthParams& p, double h_t, double abs_q);

// Grid certification of declared growth bounds.
struct GrowthViolation {
    double t = 0.0;
    double x = 0.0;       // scalar grid coordinate (placed on axis 0 for d > 1)
    double value = 0.0;
    double bound = 0.0;
    std::string check;    // which bound failed
};

struct GrowthReport {
    std::vector<GrowthViolation> violations;
    double worst = 0.0;   // largest bound excess seen
    bool ok() const { return violations.empty(); }
};

// Generator: |g| against the declared H-class bound, and g >= -k|z| - h.
GrowthReport check_growth(const Generator& gen, const std::vector<double>& t_grid,
                          const std::vector<double>& z_grid, double tol = 1e-9);
// Core: class lower bound on the effective domain, the A4 domain shape, and
// the anchor consistency f(t, qbar(t)) <= h(t), |qbar(t)| <= k.
GrowthReport check_growth(const CoreFunction& core, const std::vector<double>& t_grid,
                          const std::vector<double>& q_grid, double tol = 1e-9);

// Evenly spaced grid helper, endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace dcu
