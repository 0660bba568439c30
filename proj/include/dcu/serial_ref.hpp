#pragma once
#include <span>
#include <vector>

#include "dcu/conjugate.hpp"
#include "dcu/parallel.hpp"
#include "dcu/paths.hpp"

// Plain-loop reference implementations of the OpenMP kernels. Tests compare
// the fast paths against these (bitwise where the arithmetic is elementwise,
// within summation-order tolerance where it is a reduction), and the
// benchmark target times the two side by side. Keep them boring: textbook
// loops, no blocking, no pragmas.
namespace dcu::serial {

double sum(std::span<const double> v);
par::MeanSE mean_se(std::span<const double> v);

// Direct O(n*m) transform: literal max over every finite node per output z.
std::vector<double> legendre_bruteforce(const TabulatedConvexFunction& src,
                                        const std::vector<double>& z_grid);

PathEnsemble generate(std::size_t M, std::size_t N, int d, double T, std::uint64_t seed);

DensityPath stochastic_exponential(const PathEnsemble& ens, const ControlFn& q);

// Mean of w[i] * y[i] over paths, naive accumulation.
double weighted_mean(std::span<const double> w, std::span<const double> y);

} // namespace dcu::serial
