#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "dcu/model.hpp"

namespace dcu {

// Piecewise-linear convex function on a strictly increasing grid. Values may
// be +inf outside the effective domain; the finite values must occupy a
// contiguous index range (a convex function's domain is an interval) and
// there must be at least 3 of them. Construction projects small convexity
// deviations down onto the lower convex hull and records which nodes moved;
// deviations beyond the tolerance are an error, not a silent repair.
struct TabulatedConvexFunction {
    std::vector<double> grid;
    std::vector<double> values;
    bool radial = false;   // grid is |q| for a radially symmetric function, d > 1
    int d = 1;

    std::vector<std::size_t> repaired_nodes;
    double max_repair = 0.0;

    std::size_t first_finite = 0;
    std::size_t last_finite = 0;

    // Piecewise-linear interpolant; +inf outside the finite range.
    double eval(double x) const;
};

TabulatedConvexFunction make_tabulated(std::vector<double> grid, std::vector<double> values,
                                       bool radial = false, int d = 1, double hull_tol = 1e-8);

// Tabulate a core penalty at time t on a scalar grid (axis 0 for d > 1).
TabulatedConvexFunction tabulate_core(const CoreFunction& core, const std::vector<double>& q_grid,
                                      double t = 0.0, double hull_tol = 1e-8);

// Discrete Fenchel transform  g(z) = max_i ( z * grid[i] - values[i] )  over
// the finite nodes, evaluated on an ascending output grid in linear time via
// the monotone-argmax sweep. Output nodes whose winning index sits on the
// boundary of the finite range are flagged: the true supremum may live
// beyond the tabulated window there.
struct TransformResult {
    TabulatedConvexFunction fn;           // conjugate values on z_grid (always finite)
    std::vector<std::size_t> argmax;      // winning source index per output node
    std::vector<char> extrapolated;       // 1 where argmax hit the finite-range boundary
};

TransformResult legendre_transform(const TabulatedConvexFunction& src,
                                   const std::vector<double>& z_grid);

// f** back on the source grid; max_gap measures sup |f - f**| over interior
// finite nodes (boundary nodes are excluded, their argmax is clipped).
struct BiconjugateReport {
    TransformResult conjugate;
    TransformResult biconjugate;
    double max_abs_gap = 0.0;
    double gap_location = 0.0;
};

BiconjugateReport biconjugate_check(const TabulatedConvexFunction& f,
                                    const std::vector<double>& z_grid);

// Subgradient interval [left slope, right slope] of the tabulated function at
// x inside its finite range; at the ends of the range the outward slope is
// +-inf. RangeError outside. x within node_tol of a node gets the two-sided
// node interval, otherwise both slopes equal the segment slope.
SlopeInterval tabulated_subgradient(const TabulatedConvexFunction& f, double x,
                                    double node_tol = 1e-9);

// Fenchel product gap f(t,q) + g(t,z) - z.q, nonnegative for a conjugate
// pair, zero exactly when q attains the sup at z. Returns +inf (the
// extended-real sentinel) when q is outside dom f.
double fenchel_young_gap(const CoreFunction& core, const Generator& gen, double t,
                         std::span<const double> q, std::span<const double> z);

// Two-column CSV (grid,value), one node per line, "+inf" sentinel tokens for
// out-of-domain nodes. An optional single header line is skipped.
TabulatedConvexFunction load_tabulated_csv(const std::string& path, bool radial = false,
                                           int d = 1, double hull_tol = 1e-8);
void save_tabulated_csv(const TabulatedConvexFunction& f, const std::string& path);

} // namespace dcu
