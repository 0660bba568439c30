#include "dcu/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dcu/errors.hpp"
#include "dcu/parallel.hpp"

namespace dcu {

namespace {

// Indices of the lower convex hull vertices of the finite nodes, monotone
// chain over (x, y) with x already sorted ascending.
std::vector<std::size_t> lower_hull(const std::vector<double>& x, const std::vector<double>& y,
                                    std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> hull;
    for (std::size_t i = lo; i <= hi; ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull[hull.size() - 1];
            // keep b only if it lies strictly below the chord a -> i
            const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if (cross > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    return hull;
}

} // namespace

double TabulatedConvexFunction::eval(double x) const {
    if (x < grid[first_finite] || x > grid[last_finite]) return kPlusInf;
    // binary search for the segment
    const auto it = std::upper_bound(grid.begin() + (long)first_finite,
                                     grid.begin() + (long)last_finite + 1, x);
    std::size_t i = (std::size_t)(it - grid.begin());
    if (i > first_finite) --i;
    if (i >= last_finite) i = last_finite - 1;
    const double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return values[i] + w * (values[i + 1] - values[i]);
}

TabulatedConvexFunction make_tabulated(std::vector<double> grid, std::vector<double> values,
                                       bool radial, int d, double hull_tol) {
    if (grid.size() != values.size())
        throw GridError("make_tabulated: grid and value lengths differ");
    if (grid.size() < 3)
        throw GridError("make_tabulated: need at least 3 nodes");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i + 1] > grid[i]))
            throw GridError("make_tabulated: grid must be strictly increasing at index " +
                            std::to_string(i));
    if (radial && grid.front() < 0.0)
        throw GridError("make_tabulated: radial grid must be nonnegative");

    std::size_t first = grid.size(), last = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v) || v == -kPlusInf)
            throw GridError("make_tabulated: value at index " + std::to_string(i) +
                            " is not extended-real-valid");
        if (v < kPlusInf) {
            if (first == grid.size()) first = i;
            last = i;
        }
    }
    if (first == grid.size() || last - first + 1 < 3)
        throw GridError("make_tabulated: need at least 3 finite nodes");
    for (std::size_t i = first; i <= last; ++i)
        if (values[i] == kPlusInf)
            throw GridError("make_tabulated: effective domain must be contiguous, hole at index " +
                            std::to_string(i));

    TabulatedConvexFunction f;
    f.grid = std::move(grid);
    f.values = std::move(values);
    f.radial = radial;
    f.d = d;
    f.first_finite = first;
    f.last_finite = last;

    const auto hull = lower_hull(f.grid, f.values, first, last);
    std::size_t seg = 0;
    for (std::size_t i = first; i <= last; ++i) {
        while (seg + 1 < hull.size() && f.grid[hull[seg + 1]] < f.grid[i]) ++seg;
        const std::size_t a = hull[seg];
        const std::size_t b = hull[std::min(seg + 1, hull.size() - 1)];
        double hv = f.values[a];
        if (b != a) {
            const double w = (f.grid[i] - f.grid[a]) / (f.grid[b] - f.grid[a]);
            hv = f.values[a] + w * (f.values[b] - f.values[a]);
        }
        const double dev = f.values[i] - hv;
        if (dev > hull_tol * std::max(1.0, std::fabs(hv)))
            throw GridError("make_tabulated: values not convex within tolerance at grid point " +
                            std::to_string(f.grid[i]) + " (deviation " + std::to_string(dev) + ")");
        if (dev > 0.0) {
            f.values[i] = hv;
            f.repaired_nodes.push_back(i);
            f.max_repair = std::max(f.max_repair, dev);
        }
    }
    return f;
}

TabulatedConvexFunction tabulate_core(const CoreFunction& core, const std::vector<double>& q_grid,
                                      double t, double hull_tol) {
    std::vector<double> vals(q_grid.size());
    const int d = core.params.d;
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        Point q((std::size_t)d, 0.0);
        q[0] = q_grid[i];
        vals[i] = core.f(t, q);
    }
    return make_tabulated(q_grid, std::move(vals), /*radial=*/d > 1, d, hull_tol);
}

TransformResult legendre_transform(const TabulatedConvexFunction& src,
                                   const std::vector<double>& z_grid) {
    if (z_grid.size() < 3)
        throw GridError("legendre_transform: output grid needs at least 3 nodes");
    for (std::size_t i = 0; i + 1 < z_grid.size(); ++i)
        if (!(z_grid[i + 1] > z_grid[i]))
            throw GridError("legendre_transform: output grid must be strictly increasing");
    if (src.radial && z_grid.front() < 0.0)
        throw GridError("legendre_transform: radial source needs a nonnegative output grid");

    const std::size_t lo = src.first_finite, hi = src.last_finite;
    const std::size_t m = z_grid.size();
    TransformResult res;
    res.argmax.resize(m);
    res.extrapolated.assign(m, 0);
    std::vector<double> out(m);

    // The winning index is nondecreasing in z (slopes of a convex table are
    // sorted), so each block climbs its own pointer; values are identical to
    // the serial sweep because the climb always stops at the unimodal peak.
    const std::size_t nb = par::block_count(m);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < (std::int64_t)nb; ++b) {
        const std::size_t jlo = (std::size_t)b * par::kReduceBlock;
        const std::size_t jhi = std::min(jlo + par::kReduceBlock, m);
        std::size_t i = lo;
        for (std::size_t j = jlo; j < jhi; ++j) {
            const double z = z_grid[j];
            while (i < hi && z * src.grid[i + 1] - src.values[i + 1] >
                                 z * src.grid[i] - src.values[i])
                ++i;
            out[j] = z * src.grid[i] - src.values[i];
            res.argmax[j] = i;
            res.extrapolated[j] = (i == lo || i == hi) ? 1 : 0;
        }
    }

    res.fn = make_tabulated(z_grid, std::move(out), src.radial, src.d, /*hull_tol=*/1e-12);
    return res;
}

BiconjugateReport biconjugate_check(const TabulatedConvexFunction& f,
                                    const std::vector<double>& z_grid) {
    BiconjugateReport rep;
    rep.conjugate = legendre_transform(f, z_grid);
    std::vector<double> back_grid(f.grid.begin() + (long)f.first_finite,
                                  f.grid.begin() + (long)f.last_finite + 1);
    rep.biconjugate = legendre_transform(rep.conjugate.fn, back_grid);
    // interior nodes only: on the boundary the winning slope is clipped
    for (std::size_t j = 1; j + 1 < back_grid.size(); ++j) {
        const double gap = std::fabs(rep.biconjugate.fn.values[j] - f.values[f.first_finite + j]);
        if (gap > rep.max_abs_gap) {
            rep.max_abs_gap = gap;
            rep.gap_location = back_grid[j];
        }
    }
    return rep;
}

SlopeInterval tabulated_subgradient(const TabulatedConvexFunction& f, double x, double node_tol) {
    const std::size_t lo = f.first_finite, hi = f.last_finite;
    if (x < f.grid[lo] - node_tol || x > f.grid[hi] + node_tol)
        throw RangeError("tabulated_subgradient: query " + std::to_string(x) +
                         " outside the finite range [" + std::to_string(f.grid[lo]) + ", " +
                         std::to_string(f.grid[hi]) + "]");
    auto seg_slope = [&](std::size_t i) {
        return (f.values[i + 1] - f.values[i]) / (f.grid[i + 1] - f.grid[i]);
    };
    // nearest node
    const auto it = std::lower_bound(f.grid.begin() + (long)lo, f.grid.begin() + (long)hi + 1, x);
    std::size_t near = (std::size_t)(it - f.grid.begin());
    if (near > lo && (near > hi || std::fabs(f.grid[near - 1] - x) <= std::fabs(f.grid[near] - x)))
        --near;
    if (std::fabs(f.grid[near] - x) <= node_tol * std::max(1.0, std::fabs(f.grid[near]))) {
        const double left = near == lo ? -kPlusInf : seg_slope(near - 1);
        const double right = near == hi ? kPlusInf : seg_slope(near);
        return {left, right};
    }
    // strictly inside a segment
    std::size_t i = near;
    if (f.grid[i] > x) --i;
    if (i >= hi) i = hi - 1;
    const double s = seg_slope(i);
    return {s, s};
}

double fenchel_young_gap(const CoreFunction& core, const Generator& gen, double t,
                         std::span<const double> q, std::span<const double> z) {
    const double fv = core.f(t, q);
    if (fv == kPlusInf) return kPlusInf;
    double dot = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) dot += z[i] * q[i];
    return fv + gen.g(t, z) - dot;
}

TabulatedConvexFunction load_tabulated_csv(const std::string& path, bool radial, int d,
                                           double hull_tol) {
    std::ifstream in(path);
    if (!in) throw InputError("load_tabulated_csv: cannot open '" + path + "'");
    std::vector<double> grid, vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError("load_tabulated_csv: " + path + ":" + std::to_string(lineno) +
                             ": expected two comma-separated columns");
        const std::string c0 = line.substr(0, comma);
        const std::string c1 = line.substr(comma + 1);
        char* end0 = nullptr;
        const double x = std::strtod(c0.c_str(), &end0);
        if (end0 == c0.c_str() || (end0 && *end0 != '\0' && !std::isspace((unsigned char)*end0))) {
            if (lineno == 1) continue; // header line
            throw InputError("load_tabulated_csv: " + path + ":" + std::to_string(lineno) +
                             ": bad grid value '" + c0 + "'");
        }
        char* end1 = nullptr;
        const double v = std::strtod(c1.c_str(), &end1);
        if (end1 == c1.c_str())
            throw InputError("load_tabulated_csv: " + path + ":" + std::to_string(lineno) +
                             ": bad value '" + c1 + "'");
        if (std::isnan(v) || v == -kPlusInf)
            throw InputError("load_tabulated_csv: " + path + ":" + std::to_string(lineno) +
                             ": value must be finite or +inf");
        grid.push_back(x);
        vals.push_back(v);
    }
    try {
        return make_tabulated(std::move(grid), std::move(vals), radial, d, hull_tol);
    } catch (const GridError& e) {
        throw InputError("load_tabulated_csv: " + path + ": " + e.what());
    }
}

void save_tabulated_csv(const TabulatedConvexFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("save_tabulated_csv: cannot open '" + path + "' for writing");
    char buf[64];
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", f.grid[i]);
        out << buf << ',';
        if (f.values[i] == kPlusInf) {
            out << "+inf";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", f.values[i]);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace dcu
