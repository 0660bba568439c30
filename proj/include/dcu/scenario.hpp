#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dcu/growth.hpp"

namespace dcu {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Resolved scenario config. Parsing is strict: unknown keys, missing seed,
// or an unknown catalogue tag are validation errors, and no simulation
// starts until the whole file validates.
struct Scenario {
  std::string name;

  std::string model_type = "brownian";  // brownian | gbm | general_sde
  double T = 1.0;
  double x0 = 0.0;
  double gbm_drift = 0.0;
  double gbm_vol = 1.0;
  std::string drift_expr;
  std::string vol_expr;

  std::string endowment_expr = "x";

  std::string core_tag = "entropic";  // catalogue tag or "table"
  std::string table_path;
  GrowthParams params;
  double qbar = 0.0;
  bool has_qbar = false;
  double h = 0.0;

  std::size_t N = 64;
  std::size_t M = 200000;
  std::uint64_t seed = 0;
  int basis_degree = 4;
  double clip_radius = 50.0;
  int refine_levels = 1;

  std::vector<std::string> checks;  // subset of duality, axioms, inequalities, admissibility
  std::size_t sweep_count = 8;
  std::size_t pointwise_samples = 10000;

  std::string out_dir = "out";
  bool plot = false;

  std::string source_path;
};

Scenario parse_scenario_file(const std::string& path);

struct RunResult {
  double y0 = 0.0;
  double y0_se = 0.0;
  double attain_gap = std::numeric_limits<double>::quiet_NaN();
  double worst_axiom_margin = std::numeric_limits<double>::quiet_NaN();
  std::string admissibility;
  std::size_t total_z_clips = 0;
  std::vector<std::string> files;
  std::string out_dir;
};

RunResult run_scenario(const Scenario& sc);

// Structured manifest diff: config keys and headline results, with value
// deltas for the numeric headline fields. Version mismatches warn but do
// not fail.
struct CompareResult {
  std::vector<std::string> lines;
  bool identical = true;
  bool version_warning = false;
};

CompareResult compare_manifests(const std::string& path_a, const std::string& path_b);

}  // namespace dcu
