#include "dcu/model.hpp"

#include <algorithm>
#include <cmath>

#include "dcu/errors.hpp"
#include "dcu/parallel.hpp"

namespace dcu {

double norm(std::span<const double> v) {
    if (v.size() == 1) return std::fabs(v[0]);
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Subdifferential make_subdiff(double lo, double hi, bool is_ball) {
    Subdifferential sd;
    sd.slopes = {lo, hi};
    sd.is_ball = is_ball;
    if (is_ball || (lo <= 0.0 && 0.0 <= hi))
        sd.minimal = 0.0;
    else
        sd.minimal = std::fabs(lo) <= std::fabs(hi) ? lo : hi;
    return sd;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo))
        throw GridError("linspace: need at least 2 points and hi > lo");
    std::vector<double> g(n);
    const double step = (hi - lo) / (double)(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * (double)i;
    g.back() = hi;
    return g;
}

double a3_conjugation_slack(const GrowthParams& p) {
    p.validate(CoreClass::A3);
    // Transform the A3 lower-bound profile numerically and measure how far
    // it pokes above the H3 profile; no closed form exists for the gap.
    const double rate = 2.0 * std::pow(p.gamma, -1.0 / p.lambda);
    const auto r_grid = linspace(0.0, 40.0, 8001);
    const auto s_grid = linspace(0.0, 40.0, 2001);
    std::vector<double> fvals(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i)
        fvals[i] = p.c * std::exp(rate * std::pow(r_grid[i], 1.0 / p.lambda));
    const double c0 = par::block_max(s_grid.size(), [&](std::size_t j) {
        const double s = s_grid[j];
        double conj = -kPlusInf;
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            const double v = s * r_grid[i] - fvals[i];
            if (v > conj) conj = v;
        }
        return conj - p.gamma * s * std::pow(std::log1p(s), p.lambda);
    });
    return 2.0 * std::max(c0, 0.0);
}

TimeFn compute_hbar(CoreClass cls, const GrowthParams& p, const TimeFn& h) {
    p.validate(cls);
    switch (cls) {
        case CoreClass::A1: {
            const double add = p.k * p.k / (2.0 * p.gamma);
            return [h, add](double t) { return h(t) + add; };
        }
        case CoreClass::A2: {
            const double add = std::pow(p.gamma, -1.0 / (p.alpha - 1.0)) * std::pow(p.k, p.alpha_star);
            return [h, add](double t) { return h(t) + add; };
        }
        case CoreClass::A3: {
            const double add = std::exp(2.0 * std::pow(p.gamma, -1.0 / p.lambda) * std::pow(p.k, 1.0 / p.lambda)) +
                               a3_conjugation_slack(p);
            return [h, add](double t) { return h(t) + add; };
        }
        case CoreClass::A4:
            return h;
    }
    throw ClassError("compute_hbar: unreachable class");
}

double generator_upper_bound(GenClass cls, const GrowthParams& p, double hbar_t, double az) {
    switch (cls) {
        case GenClass::H1: return hbar_t + 0.5 * p.gamma * az * az;
        case GenClass::H2: return hbar_t + p.gamma * std::pow(az, p.alpha);
        case GenClass::H3: return hbar_t + p.gamma * az * std::pow(std::log(std::exp(1.0) + az), p.lambda);
        case GenClass::H4: return hbar_t + p.gamma * az;
    }
    throw ClassError("generator_upper_bound: unreachable class");
}

double core_lower_bound(CoreClass cls, const GrowthParams& p, double h_t, double aq) {
    switch (cls) {
        case CoreClass::A1: return aq * aq / (2.0 * p.gamma) - h_t;
        case CoreClass::A2: return std::pow(p.gamma, -1.0 / (p.alpha - 1.0)) * std::pow(aq, p.alpha_star) - h_t;
        case CoreClass::A3: return p.c * std::exp(2.0 * std::pow(p.gamma, -1.0 / p.lambda) * std::pow(aq, 1.0 / p.lambda)) - h_t;
        case CoreClass::A4: return -h_t;
    }
    throw ClassError("core_lower_bound: unreachable class");
}

namespace {

Point axis_point(double x, int d) {
    Point q((std::size_t)d, 0.0);
    q[0] = x;
    return q;
}

CatalogueEntry make_entry(CoreFunction core, PointFn g,
                          std::function<Subdifferential(double, double)> subgrad,
                          std::string caveat = "") {
    Generator gen;
    gen.g = std::move(g);
    gen.h = core.h;
    gen.cls = conjugate_class(core.cls);
    gen.params = core.params;
    gen.tag = core.tag;
    gen.hbar = compute_hbar(core.cls, core.params, core.h);
    gen.subgrad1d = std::move(subgrad);
    gen.caveat = std::move(caveat);
    return {std::move(core), std::move(gen)};
}

CatalogueEntry build_linear_dirac(GrowthParams p, TimeFn h, double qbar) {
    p.k = std::fabs(qbar);
    p.validate(CoreClass::A4); // enforces |qbar| <= gamma
    const double tol = 1e-9 * std::max(1.0, std::fabs(qbar));
    const int d = p.d;
    CoreFunction core;
    core.f = [h, qbar, tol, d](double t, std::span<const double> q) {
        Point ref = axis_point(qbar, d);
        double dist2 = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double dq = q[i] - ref[i];
            dist2 += dq * dq;
        }
        return std::sqrt(dist2) <= tol ? h(t) : kPlusInf;
    };
    core.h = h;
    core.anchor = [qbar, d](double) { return axis_point(qbar, d); };
    core.cls = CoreClass::A4;
    core.params = p;
    core.tag = "linear_dirac";
    PointFn g = [h, qbar](double t, std::span<const double> z) { return qbar * z[0] - h(t); };
    auto sg = [qbar](double, double) { return make_subdiff(qbar, qbar); };
    return make_entry(std::move(core), std::move(g), sg);
}

CatalogueEntry build_drift_band(GrowthParams p, TimeFn h) {
    p.k = 0.0;
    p.validate(CoreClass::A4);
    const double gamma = p.gamma;
    const int d = p.d;
    CoreFunction core;
    core.f = [gamma](double, std::span<const double> q) {
        return norm(q) <= gamma ? 0.0 : kPlusInf;
    };
    core.h = h;
    core.anchor = [d](double) { return Point((std::size_t)d, 0.0); };
    core.cls = CoreClass::A4;
    core.params = p;
    core.tag = "drift_band";
    PointFn g = [gamma](double, std::span<const double> z) { return gamma * norm(z); };
    auto sg = [gamma](double, double z) {
        if (z > 0.0) return make_subdiff(gamma, gamma);
        if (z < 0.0) return make_subdiff(-gamma, -gamma);
        return make_subdiff(-gamma, gamma, true);
    };
    return make_entry(std::move(core), std::move(g), sg);
}

CatalogueEntry build_entropic(GrowthParams p, TimeFn h) {
    p.k = 0.0;
    p.validate(CoreClass::A1);
    const double gamma = p.gamma;
    const int d = p.d;
    CoreFunction core;
    core.f = [gamma](double, std::span<const double> q) {
        const double n = norm(q);
        return n * n / (2.0 * gamma);
    };
    core.h = h;
    core.anchor = [d](double) { return Point((std::size_t)d, 0.0); };
    core.cls = CoreClass::A1;
    core.params = p;
    core.tag = "entropic";
    PointFn g = [gamma](double, std::span<const double> z) {
        const double n = norm(z);
        return 0.5 * gamma * n * n;
    };
    auto sg = [gamma](double, double z) { return make_subdiff(gamma * z, gamma * z); };
    return make_entry(std::move(core), std::move(g), sg);
}

CatalogueEntry build_capped_quadratic(GrowthParams p, TimeFn h) {
    p.k = 0.0;
    p.validate(CoreClass::A4);
    const double gamma = p.gamma;
    const int d = p.d;
    CoreFunction core;
    core.f = [gamma](double, std::span<const double> q) {
        const double n = norm(q);
        return n <= gamma ? 0.5 * n * n : kPlusInf;
    };
    core.h = h;
    core.anchor = [d](double) { return Point((std::size_t)d, 0.0); };
    core.cls = CoreClass::A4;
    core.params = p;
    core.tag = "capped_quadratic";
    PointFn g = [gamma](double, std::span<const double> z) {
        const double n = norm(z);
        return n <= gamma ? 0.5 * n * n : gamma * n - 0.5 * gamma * gamma;
    };
    auto sg = [gamma](double, double z) {
        const double az = std::fabs(z);
        if (az <= gamma) return make_subdiff(z, z);
        const double s = z > 0.0 ? gamma : -gamma;
        return make_subdiff(s, s);
    };
    return make_entry(std::move(core), std::move(g), sg);
}

CatalogueEntry build_exponential(GrowthParams p, TimeFn h_user) {
    // The closed form pins the class constants; see the header note.
    p.c = 1.0;
    p.gamma = 2.0;
    p.lambda = 1.0;
    p.k = 0.0;
    p.validate(CoreClass::A3);
    const int d = p.d;
    CoreFunction core;
    core.f = [h_user](double t, std::span<const double> q) {
        return std::exp(norm(q)) + h_user(t);
    };
    // min f = 1 + h_user at q = 0, so the anchor offset carries the lift.
    core.h = [h_user](double t) { return h_user(t) + 1.0; };
    core.anchor = [d](double) { return Point((std::size_t)d, 0.0); };
    core.cls = CoreClass::A3;
    core.params = p;
    core.tag = "exponential";
    PointFn g = [h_user](double t, std::span<const double> z) {
        const double n = norm(z);
        // value at 0 taken as the formula's continuous limit
        return (n == 0.0 ? 0.0 : n * (std::log(n) - 1.0)) - h_user(t);
    };
    auto sg = [](double, double z) {
        const double az = std::fabs(z);
        if (az <= 1.0) return make_subdiff(0.0, 0.0);
        const double s = (z > 0.0 ? 1.0 : -1.0) * std::log(az);
        return make_subdiff(s, s);
    };
    return make_entry(std::move(core), std::move(g), sg,
                      "stored conjugate |z|(ln|z|-1)-h is only valid for |z| >= 1; "
                      "the transform of e^{|q|}+h equals -1-h on |z| < 1");
}

CatalogueEntry build_quartic(GrowthParams p, TimeFn h_user) {
    p.alpha = 4.0 / 3.0;
    p.alpha_star = 4.0;
    p.gamma = std::cbrt(4.0);
    p.k = 0.0;
    p.validate(CoreClass::A2);
    const int d = p.d;
    CoreFunction core;
    core.f = [h_user](double t, std::span<const double> q) {
        const double n = norm(q);
        return 0.25 * n * n * n * n + h_user(t);
    };
    core.h = h_user;
    core.anchor = [d](double) { return Point((std::size_t)d, 0.0); };
    core.cls = CoreClass::A2;
    core.params = p;
    core.tag = "quartic";
    PointFn g = [h_user](double t, std::span<const double> z) {
        return 0.75 * std::pow(norm(z), 4.0 / 3.0) - h_user(t);
    };
    auto sg = [](double, double z) {
        const double s = (z >= 0.0 ? 1.0 : -1.0) * std::cbrt(std::fabs(z));
        return make_subdiff(s, s);
    };
    return make_entry(std::move(core), std::move(g), sg);
}

CatalogueEntry build_piecewise_vii(GrowthParams p, TimeFn h_user) {
    if (p.d != 1)
        throw ParamError("piecewise_vii: defined for d = 1 only (asymmetric domain), got d=" +
                         std::to_string(p.d));
    p.gamma = 2.0;
    p.k = 1.0;
    p.validate(CoreClass::A1);
    CoreFunction core;
    core.f = [](double, std::span<const double> q) {
        const double x = q[0];
        if (x < 1.0) return kPlusInf;
        if (x <= 2.0) return x - 1.0;
        return 0.25 * x * x;
    };
    // The quadratic lower bound with gamma = 2 needs h >= (q-2)^2/4 on [1,2],
    // worst 1/4 at q = 1, so the offset is floored there.
    core.h = [h_user](double t) { return std::max(h_user(t), 0.25); };
    core.anchor = [](double) { return Point{1.0}; };
    core.cls = CoreClass::A1;
    core.params = p;
    core.tag = "piecewise_vii";
    PointFn g = [](double, std::span<const double> z) {
        const double x = z[0];
        return x < 1.0 ? x : x * x;
    };
    auto sg = [](double, double z) {
        if (z < 1.0) return make_subdiff(1.0, 1.0);
        if (z == 1.0) return make_subdiff(1.0, 2.0);
        return make_subdiff(2.0 * z, 2.0 * z);
    };
    return make_entry(std::move(core), std::move(g), sg);
}

} // namespace

const std::vector<std::string>& catalogue_tags() {
    static const std::vector<std::string> tags = {
        "linear_dirac", "drift_band", "entropic", "capped_quadratic",
        "exponential", "quartic", "piecewise_vii"};
    return tags;
}

CatalogueEntry build_catalogue_entry(const std::string& tag, const GrowthParams& params, TimeFn h) {
    if (!h) h = constant_fn(0.0);
    if (tag == "linear_dirac") return build_linear_dirac(params, h, params.k);
    if (tag == "drift_band") return build_drift_band(params, h);
    if (tag == "entropic") return build_entropic(params, h);
    if (tag == "capped_quadratic") return build_capped_quadratic(params, h);
    if (tag == "exponential") return build_exponential(params, h);
    if (tag == "quartic") return build_quartic(params, h);
    if (tag == "piecewise_vii") return build_piecewise_vii(params, h);
    throw CatalogueError("unknown catalogue tag '" + tag + "'");
}

CatalogueEntry build_catalogue_entry_dirac(const GrowthParams& params, double qbar, TimeFn h) {
    if (!h) h = constant_fn(0.0);
    return build_linear_dirac(params, h, qbar);
}

namespace {

void record(GrowthReport& rep, double t, double x, double value, double bound, const char* check) {
    rep.violations.push_back({t, x, value, bound, check});
    rep.worst = std::max(rep.worst, value - bound);
}

} // namespace

GrowthReport check_growth(const Generator& gen, const std::vector<double>& t_grid,
                          const std::vector<double>& z_grid, double tol) {
    if (t_grid.empty() || z_grid.empty())
        throw GridError("check_growth: empty grid");
    GrowthReport rep;
    for (double t : t_grid) {
        const double hbar_t = gen.hbar(t);
        const double h_t = gen.h ? gen.h(t) : 0.0;
        auto found = par::block_collect<GrowthViolation>(z_grid.size(), [&](std::size_t j, std::vector<GrowthViolation>& out) {
            const Point z = axis_point(z_grid[j], gen.params.d);
            const double v = gen.g(t, z);
            const double az = std::fabs(z_grid[j]);
            const double up = generator_upper_bound(gen.cls, gen.params, hbar_t, az);
            if (std::fabs(v) > up + tol)
                out.push_back({t, z_grid[j], std::fabs(v), up, "conjugate_upper"});
            const double low = -gen.params.k * az - h_t;
            if (v < low - tol)
                out.push_back({t, z_grid[j], v, low, "anchor_lower"});
        });
        for (auto& viol : found) {
            rep.violations.push_back(viol);
            rep.worst = std::max(rep.worst, std::fabs(viol.value) - viol.bound);
        }
    }
    return rep;
}

GrowthReport check_growth(const CoreFunction& core, const std::vector<double>& t_grid,
                          const std::vector<double>& q_grid, double tol) {
    if (t_grid.empty() || q_grid.empty())
        throw GridError("check_growth: empty grid");
    GrowthReport rep;
    for (double t : t_grid) {
        const double h_t = core.h(t);
        auto found = par::block_collect<GrowthViolation>(q_grid.size(), [&](std::size_t j, std::vector<GrowthViolation>& out) {
            const Point q = axis_point(q_grid[j], core.params.d);
            const double v = core.f(t, q);
            const double aq = std::fabs(q_grid[j]);
            if (core.cls == CoreClass::A4 && aq > core.params.gamma + tol && v < kPlusInf) {
                out.push_back({t, q_grid[j], v, kPlusInf, "bounded_domain"});
                return;
            }
            if (v == kPlusInf) return; // outside the effective domain
            const double low = core_lower_bound(core.cls, core.params, h_t, aq);
            if (v < low - tol)
                out.push_back({t, q_grid[j], v, low, "class_lower"});
        });
        for (auto& viol : found) {
            rep.violations.push_back(viol);
            rep.worst = std::max(rep.worst, viol.bound - viol.value);
        }
        // anchor consistency at this t
        const Point qb = core.anchor(t);
        if (norm(qb) > core.params.k + tol)
            record(rep, t, norm(qb), norm(qb), core.params.k, "anchor_norm");
        const double fqb = core.f(t, qb);
        if (!(fqb <= h_t + tol))
            record(rep, t, qb[0], fqb, h_t, "anchor_value");
    }
    return rep;
}

} // namespace dcu
