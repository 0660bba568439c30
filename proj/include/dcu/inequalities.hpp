#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dcu/paths.hpp"

namespace dcu {

// Parameters for the pointwise product-splitting inequalities. Only the
// fields an inequality uses are read; the rest are ignored. Constraints
// (q > 1, delta > 1 where required) are validated per id.
struct IneqParams {
  double mu = 1.0;
  double delta = 2.0;
  double q = 2.0;
  double eps = 1.0;
};

// Smallest x-threshold beyond which the damped exponential term dominates
// the linear one, plus the additive constant covering the region below it.
struct SearchedConstant {
  double threshold = 0.0;
  double constant = 0.0;
  std::size_t grid_points = 0;
  bool validated = false;
};

struct PointwiseReport {
  std::string id;
  IneqParams params;
  std::size_t samples = 0;
  std::size_t violations = 0;
  // max over samples of lhs - rhs; negative when the inequality holds with slack
  double worst_margin = 0.0;
  // additive constant in force (searched or closed form), 0 when none
  double constant = 0.0;
  double threshold = 0.0;
  std::vector<std::array<double, 3>> violating_points;  // x, y, excess
};

// Stable registry of the pointwise checks, in fixed order.
const std::vector<std::string>& pointwise_ids();

// Samples (x, y) log-uniformly over the inequality's domain (with exact
// zeros sprinkled in where the domain allows them) and counts violations
// beyond a relative slack of 1e-12. Deterministic for fixed seed.
PointwiseReport check_pointwise(const std::string& id, const IneqParams& p,
                                std::size_t samples, std::uint64_t seed);

// Additive constant for the eps-damped exponential splitting: covers
// x exp(x^d/mu^d) <= eps exp(q x^d/mu^d) + C. Binary-searched threshold,
// grid-searched supremum, revalidated on a shifted grid.
SearchedConstant search_exp_power_slack(const IneqParams& p);

// Same for the log-power variant; requires delta > 1.
SearchedConstant search_log_power_slack(const IneqParams& p);

// Closed-form constant for the Gaussian-vs-exponential split.
double gauss_exp_split_constant(double mu, double q);

// E[phi(S)] for S ~ N(0,1) by composite Simpson on [-15, 15].
double normal_expectation(const std::function<double(double)>& phi,
                          int intervals = 6000);

// Constants entering the exp-weighted entropy bound.
struct ExpBoundConstants {
  double ktilde = 0.0;   // shift in the test function, found on a doubling ladder
  double kbar = 0.0;     // additive slack in the iterated-log comparison
  double growth = 1.0;   // Gronwall factor
  double multiplier = 0.0;
  double additive = 0.0;
};

ExpBoundConstants exp_bound_constants(double mu, double gamma, double lambda,
                                      double T);

// One martingale-entropy bound evaluated on a simulated density family.
struct EnsembleBoundReport {
  std::string id;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double combined_se = 0.0;
  double slack = 0.0;        // rhs - lhs
  bool holds = false;        // lhs <= rhs + 3 * combined_se
  bool equality_case = false;
  // quadrature value of the lhs for constant scalar controls, NaN otherwise
  double lhs_quadrature = 0.0;
  ExpBoundConstants constants;
};

// E[L ln(1+L)] <= 1/2 E[sum L |q|^2 dt] + ln 2. The declared bound caps
// |q| over all sampled path-steps; exceeding it raises RejectedControl.
EnsembleBoundReport entropy_bound(const PathEnsemble& ens, const ControlFn& q,
                                  double bound);

// E[L (ln(1+L))^{a/2}] <= ((a/4) E[sum L |q|^a dt] + e) exp(a(a-2)T/8),
// a = alpha_star >= 2.
EnsembleBoundReport entropy_power_bound(const PathEnsemble& ens,
                                        const ControlFn& q, double bound,
                                        double alpha_star);

// E[L exp(mu (ln(1+L))^{1/(1+2 lambda)})] bounded by the Gronwall form with
// integrand L |q|^2 exp(gamma^{-1/lambda} |q|^{1/lambda}).
EnsembleBoundReport entropy_exp_bound(const PathEnsemble& ens,
                                      const ControlFn& q, double bound,
                                      double mu, double gamma, double lambda);

// Constant scalar control conveniences; fill lhs_quadrature when d == 1.
EnsembleBoundReport entropy_bound_const(const PathEnsemble& ens, double qval);
EnsembleBoundReport entropy_power_bound_const(const PathEnsemble& ens,
                                              double qval, double alpha_star);
EnsembleBoundReport entropy_exp_bound_const(const PathEnsemble& ens,
                                            double qval, double mu,
                                            double gamma, double lambda);

}  // namespace dcu
