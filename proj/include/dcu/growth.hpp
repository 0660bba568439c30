#pragma once
#include <functional>
#include <string>

namespace dcu {

// Deterministic time-dependent scalar, e.g. the offset process h(t).
using TimeFn = std::function<double(double)>;

inline TimeFn constant_fn(double c) {
    return [c](double) { return c; };
}

// Growth class of a core penalty f (lower bound family) and of its
// conjugate generator g (matching upper bound family).
//   A1 <-> H1 : quadratic      f >= |q|^2/(2 gamma) - h      |g| <= hbar + gamma |z|^2 / 2
//   A2 <-> H2 : power          f >= gamma^{-1/(alpha-1)} |q|^{alpha*} - h
//                              |g| <= hbar + gamma |z|^alpha
//   A3 <-> H3 : exponential    f >= c exp(2 gamma^{-1/lambda} |q|^{1/lambda}) - h
//                              |g| <= hbar + gamma |z| (ln(e+|z|))^lambda
//   A4 <-> H4 : bounded domain f >= -h, f = +inf outside |q| <= gamma
//                              |g| <= hbar + gamma |z|
enum class CoreClass { A1, A2, A3, A4 };
enum class GenClass { H1, H2, H3, H4 };

const char* to_string(CoreClass c);
const char* to_string(GenClass c);
GenClass conjugate_class(CoreClass c);

struct GrowthParams {
    double gamma = 1.0;     // scale constant of the growth class
    double lambda = 1.0;    // exponent inside the log factor (A3/H3 only)
    double alpha = 2.0;     // power exponent (A2/H2 only), 1 < alpha <= 2
    double alpha_star = 2.0;// conjugate exponent, 1/alpha + 1/alpha_star = 1
    double c = 1.0;         // multiplicative constant in the A3 lower bound
    double k = 0.0;         // bound on the anchor control |qbar_t| <= k
    int d = 1;              // Brownian dimension
    double T = 1.0;         // horizon

    // Throws ParamError if any constraint fails (positivity, exponent
    // conjugacy within 1e-12, d >= 1, T > 0).
    void validate(CoreClass cls) const;
};

// Convenience: fill alpha_star from alpha.
double conjugate_exponent(double alpha);

} // namespace dcu
