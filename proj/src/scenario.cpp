#include "dcu/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dcu/bsde.hpp"
#include "dcu/conjugate.hpp"
#include "dcu/csvio.hpp"
#include "dcu/duality.hpp"
#include "dcu/errors.hpp"
#include "dcu/expr.hpp"
#include "dcu/inequalities.hpp"
#include "dcu/model.hpp"
#include "dcu/paths.hpp"

namespace dcu {

namespace {

// ---- config file parsing (TOML-style key/value subset) ----

struct KeyVal {
  std::string raw;
  int line = 0;
  bool quoted = false;
};

struct ConfigDoc {
  std::string path;
  std::map<std::string, KeyVal> scalars;
  std::map<std::string, std::vector<std::string>> arrays;
  std::map<std::string, int> array_lines;
  mutable std::set<std::string> consumed;

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw InputError(path + ":" + std::to_string(line) + ": " + what);
  }

  bool has(const std::string& key) const {
    return scalars.count(key) != 0 || arrays.count(key) != 0;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return fallback;
    consumed.insert(key);
    return it->second.raw;
  }

  double num(const std::string& key, double fallback) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return fallback;
    consumed.insert(key);
    if (it->second.quoted) fail(it->second.line, "expected a number for " + key);
    const char* s = it->second.raw.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') fail(it->second.line, "bad number for " + key);
    return v;
  }

  std::uint64_t unsigned_num(const std::string& key, int* line_out = nullptr) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) fail(0, "missing required key " + key);
    consumed.insert(key);
    if (line_out) *line_out = it->second.line;
    const char* s = it->second.raw.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0' || it->second.raw[0] == '-') {
      fail(it->second.line, "bad integer for " + key);
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) return fallback;
    consumed.insert(key);
    if (it->second.raw == "true") return true;
    if (it->second.raw == "false") return false;
    fail(it->second.line, "expected true/false for " + key);
  }

  std::vector<std::string> list(const std::string& key) const {
    auto it = arrays.find(key);
    if (it == arrays.end()) return {};
    consumed.insert(key);
    return it->second;
  }

  void check_all_consumed() const {
    for (const auto& [k, v] : scalars) {
      if (!consumed.count(k)) fail(v.line, "unknown key '" + k + "'");
    }
    for (const auto& [k, v] : arrays) {
      if (!consumed.count(k)) fail(array_lines.at(k), "unknown key '" + k + "'");
    }
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// strips an unquoted # comment
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

// a bare value or a "quoted" one; quotes are removed and flagged
KeyVal parse_value(const std::string& raw, int line, const ConfigDoc& doc) {
  const std::string v = trim(raw);
  if (v.empty()) doc.fail(line, "empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') doc.fail(line, "unterminated string");
    return {v.substr(1, v.size() - 2), line, true};
  }
  return {v, line, false};
}

ConfigDoc parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path);
  ConfigDoc doc;
  doc.path = path;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') doc.fail(lineno, "bad section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) doc.fail(lineno, "empty section name");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) doc.fail(lineno, "expected key = value");
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (doc.scalars.count(key) || doc.arrays.count(key)) {
      doc.fail(lineno, "duplicate key '" + key + "'");
    }
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') doc.fail(lineno, "unterminated array");
      std::vector<std::string> items;
      std::string inner = value.substr(1, value.size() - 2);
      std::stringstream ss(inner);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        items.push_back(parse_value(t, lineno, doc).raw);
      }
      doc.arrays[key] = std::move(items);
      doc.array_lines[key] = lineno;
    } else {
      doc.scalars[key] = parse_value(value, lineno, doc);
    }
  }
  return doc;
}

}  // namespace

Scenario parse_scenario_file(const std::string& path) {
  const ConfigDoc doc = parse_config(path);
  Scenario sc;
  sc.source_path = path;
  sc.name = doc.str("scenario.name",
                    std::filesystem::path(path).stem().string());

  sc.model_type = doc.str("model.type", "brownian");
  if (sc.model_type != "brownian" && sc.model_type != "gbm" &&
      sc.model_type != "general_sde") {
    throw InputError(path + ": unknown model type '" + sc.model_type + "'");
  }
  sc.T = doc.num("model.T", 1.0);
  if (!(sc.T > 0.0)) throw InputError(path + ": model.T must be positive");
  sc.x0 = doc.num("model.x0", sc.model_type == "gbm" ? 1.0 : 0.0);
  if (sc.model_type == "gbm") {
    sc.gbm_drift = doc.num("model.drift", 0.0);
    sc.gbm_vol = doc.num("model.vol", 1.0);
    if (!(sc.x0 > 0.0)) throw InputError(path + ": gbm needs x0 > 0");
  } else if (sc.model_type == "general_sde") {
    sc.drift_expr = doc.str("model.drift", "");
    sc.vol_expr = doc.str("model.vol", "");
    if (sc.drift_expr.empty() || sc.vol_expr.empty()) {
      throw InputError(path + ": general_sde needs model.drift and model.vol");
    }
    parse_expression(sc.drift_expr);
    parse_expression(sc.vol_expr);
  }

  sc.endowment_expr = doc.str("endowment.expr", "x");
  parse_expression(sc.endowment_expr);

  sc.core_tag = doc.str("core.tag", "entropic");
  const auto& tags = catalogue_tags();
  if (sc.core_tag != "table" &&
      std::find(tags.begin(), tags.end(), sc.core_tag) == tags.end()) {
    throw CatalogueError("unknown catalogue tag: " + sc.core_tag);
  }
  if (sc.core_tag == "table") {
    sc.table_path = doc.str("core.table", "");
    if (sc.table_path.empty()) {
      throw InputError(path + ": core.tag = table needs core.table");
    }
    std::ifstream probe(sc.table_path);
    if (!probe) throw InputError(path + ": core.table file not found: " + sc.table_path);
  }
  sc.params.gamma = doc.num("core.gamma", 1.0);
  sc.params.lambda = doc.num("core.lambda", 1.0);
  sc.params.alpha = doc.num("core.alpha", 2.0);
  sc.params.alpha_star = doc.has("core.alpha_star")
                             ? doc.num("core.alpha_star", 2.0)
                             : conjugate_exponent(sc.params.alpha);
  sc.params.c = doc.num("core.c", 1.0);
  sc.params.k = doc.num("core.k", 0.0);
  sc.params.d = 1;
  sc.params.T = sc.T;
  sc.has_qbar = doc.has("core.qbar");
  sc.qbar = doc.num("core.qbar", 0.0);
  sc.h = doc.num("core.h", 0.0);

  {
    int seed_line = 0;
    if (!doc.has("solver.seed")) {
      throw InputError(path + ": solver.seed is required (no entropy-source defaults)");
    }
    sc.seed = doc.unsigned_num("solver.seed", &seed_line);
  }
  sc.N = static_cast<std::size_t>(doc.num("solver.N", 64));
  sc.M = static_cast<std::size_t>(doc.num("solver.M", 200000));
  if (sc.N < 1 || sc.M < 1) throw InputError(path + ": solver.N and solver.M must be >= 1");
  sc.basis_degree = static_cast<int>(doc.num("solver.basis_degree", 4));
  sc.clip_radius = doc.num("solver.clip_radius", 50.0);
  sc.refine_levels = static_cast<int>(doc.num("solver.refine_levels", 1));
  if (sc.refine_levels < 1 || sc.refine_levels > 8) {
    throw InputError(path + ": solver.refine_levels must be in [1, 8]");
  }

  sc.checks = doc.list("checks.run");
  for (const auto& c : sc.checks) {
    if (c != "duality" && c != "axioms" && c != "inequalities" &&
        c != "admissibility") {
      throw InputError(path + ": unknown check '" + c + "'");
    }
  }
  sc.sweep_count = static_cast<std::size_t>(doc.num("checks.sweep_count", 8));
  sc.pointwise_samples =
      static_cast<std::size_t>(doc.num("checks.pointwise_samples", 10000));

  sc.out_dir = doc.str("output.dir", "out");
  sc.plot = doc.boolean("output.plot", false);

  doc.check_all_consumed();
  return sc;
}

namespace {

// ---- pipeline ----

struct BuiltLevel {
  PathEnsemble ens;
  StatePath state;
};

BuiltLevel build_paths(const Scenario& sc, std::size_t N, std::size_t M) {
  BuiltLevel b;
  b.ens = generate(M, N, 1, sc.T, sc.seed);
  if (sc.model_type == "brownian") {
    b.state = brownian_state(b.ens);
  } else if (sc.model_type == "gbm") {
    b.state = forward_gbm_exact(b.ens, sc.x0, sc.gbm_drift, sc.gbm_vol);
  } else {
    const Expr dex = parse_expression(sc.drift_expr);
    const Expr vex = parse_expression(sc.vol_expr);
    b.state = forward_sde_euler(
        b.ens, sc.x0, [dex](double t, double x) { return dex.eval(x, t); },
        [vex](double t, double x, std::span<double> out) {
          out[0] = vex.eval(x, t);
        });
  }
  return b;
}

// Conjugate of a tabulated core, exact on the kink grid of the transform and
// extended linearly beyond the source slope range.
CatalogueEntry build_table_entry(const Scenario& sc) {
  auto tab = load_tabulated_csv(sc.table_path);

  std::vector<double> kinks;
  for (std::size_t j = tab.first_finite; j + 1 <= tab.last_finite; ++j) {
    const double dz = tab.grid[j + 1] - tab.grid[j];
    kinks.push_back((tab.values[j + 1] - tab.values[j]) / dz);
  }
  std::vector<double> zg;
  const double lo = kinks.empty() ? -1.0 : kinks.front() - 1.0;
  const double hi = kinks.empty() ? 1.0 : kinks.back() + 1.0;
  zg.push_back(lo);
  for (double s : kinks) {
    if (zg.empty() || s > zg.back() + 1e-12) zg.push_back(s);
  }
  if (hi > zg.back() + 1e-12) zg.push_back(hi);
  while (zg.size() < 3) zg.push_back(zg.back() + 1.0);

  auto tr = legendre_transform(tab, zg);

  const double q_lo = tab.grid[tab.first_finite];
  const double q_hi = tab.grid[tab.last_finite];
  const double v_lo = tab.values[tab.first_finite];
  const double v_hi = tab.values[tab.last_finite];
  const auto conj = tr.fn;

  CatalogueEntry e;
  e.core.tag = "table";
  e.core.f = [tab](double, std::span<const double> q) { return tab.eval(q[0]); };
  std::size_t amin = tab.first_finite;
  for (std::size_t j = tab.first_finite; j <= tab.last_finite; ++j) {
    if (tab.values[j] < tab.values[amin]) amin = j;
  }
  const double q_anchor = tab.grid[amin];
  const double f_anchor = tab.values[amin];
  e.core.anchor = [q_anchor](double) { return Point{q_anchor}; };
  e.core.h = constant_fn(std::max(f_anchor, 0.0));
  e.core.params.k = std::fabs(q_anchor);
  e.core.params.T = sc.T;

  e.gen.tag = "table";
  e.gen.g = [conj, q_lo, q_hi, v_lo, v_hi](double, std::span<const double> z) {
    const double zz = z[0];
    if (zz <= conj.grid.front()) return zz * q_lo - v_lo;
    if (zz >= conj.grid.back()) return zz * q_hi - v_hi;
    return conj.eval(zz);
  };
  e.gen.h = e.core.h;
  e.gen.hbar = constant_fn(0.0);
  e.gen.subgrad1d = [conj, q_lo, q_hi](double, double z) {
    if (z <= conj.grid.front()) return make_subdiff(q_lo, q_lo);
    if (z >= conj.grid.back()) return make_subdiff(q_hi, q_hi);
    const SlopeInterval s = tabulated_subgradient(conj, z);
    return make_subdiff(s.lo, s.hi);
  };
  return e;
}

CatalogueEntry build_entry(const Scenario& sc) {
  if (sc.core_tag == "table") return build_table_entry(sc);
  if (sc.core_tag == "linear_dirac" && sc.has_qbar) {
    return build_catalogue_entry_dirac(sc.params, sc.qbar, constant_fn(sc.h));
  }
  return build_catalogue_entry(sc.core_tag, sc.params, constant_fn(sc.h));
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty() || dir == ".") return file;
  return dir + "/" + file;
}

void write_refinement_svg(const std::string& path,
                          const std::vector<std::array<double, 2>>& pts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 20, mb = 50;
  double ymin = pts[0][1], ymax = pts[0][1];
  for (const auto& p : pts) {
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  double pad = std::max(1e-12, (ymax - ymin) * 0.1 + std::fabs(ymax) * 1e-9);
  ymin -= pad;
  ymax += pad;
  const auto xmap = [&](double i) {
    const double n = static_cast<double>(pts.size());
    return ml + (n > 1 ? i / (n - 1.0) : 0.5) * (W - ml - mr);
  };
  const auto ymap = [&](double v) {
    return H - mb - (v - ymin) / (ymax - ymin) * (H - mb - mt);
  };
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  out << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.10g\" y1=\"%.10g\" x2=\"%.10g\" y2=\"%.10g\" "
                "stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.10g\" y1=\"%.10g\" x2=\"%.10g\" y2=\"%.10g\" "
                "stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  out << buf;
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.10g,%.10g", i ? " " : "",
                  xmap(static_cast<double>(i)), ymap(pts[i][1]));
    out << buf;
  }
  out << "\"/>\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.10g\" cy=\"%.10g\" r=\"3\" fill=\"steelblue\"/>\n",
                  xmap(static_cast<double>(i)), ymap(pts[i][1]));
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.10g\" y=\"%.10g\" font-size=\"12\">refinement level</text>\n",
                (ml + W - mr) / 2 - 50, H - 12);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"8\" y=\"%.10g\" font-size=\"12\">%.10g</text>\n",
                ymap(ymax) + 4, ymax);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"8\" y=\"%.10g\" font-size=\"12\">%.10g</text>\n",
                ymap(ymin) + 4, ymin);
  out << buf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.10g\" y=\"%.10g\" font-size=\"12\">%zu</text>\n",
                  xmap(static_cast<double>(i)) - 3, H - mb + 16, i);
    out << buf;
  }
  out << "</svg>\n";
}

std::string params_string(const IneqParams& p) {
  return "mu=" + csv::num(p.mu) + ";delta=" + csv::num(p.delta) + ";q=" +
         csv::num(p.q) + ";eps=" + csv::num(p.eps);
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  RunResult rr;
  rr.out_dir = sc.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(sc.out_dir, ec);
  if (ec) throw InputError("cannot create output dir " + sc.out_dir + ": " + ec.message());

  const CatalogueEntry entry = build_entry(sc);
  const Expr endow = parse_expression(sc.endowment_expr);
  const double T = sc.T;
  const EndowmentFn xi = [endow, T](double xT) { return endow.eval(xT, T); };

  SolverOptions opts;
  opts.basis_degree = sc.basis_degree;
  opts.z_clip_radius = sc.clip_radius;

  // coarse-to-fine ladder; the finest level is the reported solution
  std::vector<std::array<double, 2>> ladder_pts;
  std::vector<std::vector<std::string>> refinement_rows;
  BuiltLevel built;
  BsdeSolution sol;
  for (int l = 0; l < sc.refine_levels; ++l) {
    const int k = sc.refine_levels - 1 - l;
    const std::size_t Nl = std::max<std::size_t>(2, sc.N >> k);
    const std::size_t Ml = std::max<std::size_t>(64, sc.M >> (2 * k));
    built = build_paths(sc, Nl, Ml);
    sol = solve_lsmc(built.ens, built.state, xi, entry.gen, opts);
    ladder_pts.push_back({static_cast<double>(l), sol.y0});
    refinement_rows.push_back({std::to_string(l), std::to_string(Nl),
                               std::to_string(Ml), csv::num(sol.y0),
                               csv::num(sol.y0_se)});
  }
  rr.y0 = sol.y0;
  rr.y0_se = sol.y0_se;
  rr.total_z_clips = sol.total_z_clips;

  std::vector<std::pair<std::string, std::string>> man;
  const auto put = [&man](const std::string& k, const std::string& v) {
    man.emplace_back(k, v);
  };
  put("library_version", kLibraryVersion);
  put("scenario.name", sc.name);
  put("model.type", sc.model_type);
  put("model.T", csv::num(sc.T));
  put("model.x0", csv::num(sc.x0));
  if (sc.model_type == "gbm") {
    put("model.drift", csv::num(sc.gbm_drift));
    put("model.vol", csv::num(sc.gbm_vol));
  } else if (sc.model_type == "general_sde") {
    put("model.drift", sc.drift_expr);
    put("model.vol", sc.vol_expr);
  }
  put("endowment.expr", sc.endowment_expr);
  put("core.tag", sc.core_tag);
  if (sc.core_tag == "table") put("core.table", sc.table_path);
  put("core.gamma", csv::num(sc.params.gamma));
  put("core.lambda", csv::num(sc.params.lambda));
  put("core.alpha", csv::num(sc.params.alpha));
  put("core.alpha_star", csv::num(sc.params.alpha_star));
  put("core.c", csv::num(sc.params.c));
  put("core.k", csv::num(sc.params.k));
  if (sc.has_qbar) put("core.qbar", csv::num(sc.qbar));
  put("core.h", csv::num(sc.h));
  put("solver.N", std::to_string(sc.N));
  put("solver.M", std::to_string(sc.M));
  put("solver.seed", std::to_string(sc.seed));
  put("solver.basis_degree", std::to_string(sc.basis_degree));
  put("solver.clip_radius", csv::num(sc.clip_radius));
  put("solver.refine_levels", std::to_string(sc.refine_levels));
  {
    std::string joined;
    for (const auto& c : sc.checks) joined += (joined.empty() ? "" : ",") + c;
    put("checks.run", joined);
  }
  put("checks.sweep_count", std::to_string(sc.sweep_count));
  put("checks.pointwise_samples", std::to_string(sc.pointwise_samples));
  put("output.dir", sc.out_dir);
  put("output.plot", sc.plot ? "true" : "false");

  put("results.y0", csv::num(sol.y0));
  put("results.y0_se", csv::num(sol.y0_se));
  put("results.z_clip_count", std::to_string(sol.total_z_clips));
  put("results.y_clip_count", std::to_string(sol.total_y_clips));

  // solution.csv, one row per grid step
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sol.steps.size(); ++i) {
      const auto& st = sol.steps[i];
      rows.push_back({std::to_string(i), csv::num(st.t), csv::num(st.y_mean),
                      csv::num(st.z_mean), csv::num(st.r2),
                      std::to_string(st.z_clip_count)});
    }
    const std::string f = join_path(sc.out_dir, "solution.csv");
    csv::write_file(f, {"step", "t", "Y0_regression_value", "Z0", "R2", "clip_count"},
                    rows);
    rr.files.push_back(f);
  }

  const auto requested = [&sc](const char* name) {
    return std::find(sc.checks.begin(), sc.checks.end(), name) != sc.checks.end();
  };

  if (requested("duality")) {
    const AttainabilityReport ar =
        attainability_check(sol, built.ens, built.state, xi, entry.core, entry.gen);
    rr.attain_gap = ar.gap;
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"subgradient", csv::num(ar.estimate.value),
                    csv::num(ar.estimate.std_error),
                    csv::num(ar.estimate.value - sol.y0), csv::num(ar.estimate.ess),
                    to_string(ar.estimate.admissible)});
    const auto sweep = constant_control_sweep(built.ens, built.state, xi,
                                              entry.core, sol.y0,
                                              sc.sweep_count, sc.seed);
    double min_adm_gap = kPlusInf;
    for (const auto& row : sweep) {
      rows.push_back({row.control_id, csv::num(row.est.value),
                      csv::num(row.est.std_error), csv::num(row.gap_vs_y0),
                      csv::num(row.est.ess), to_string(row.est.admissible)});
      if (row.est.admissible == TriState::Yes) {
        min_adm_gap = std::min(min_adm_gap, row.gap_vs_y0);
      }
    }
    const std::string f = join_path(sc.out_dir, "duality_gaps.csv");
    csv::write_file(f, {"control_id", "value", "std_error", "gap_vs_Y0", "ess", "admissible"},
                    rows);
    rr.files.push_back(f);
    put("results.attain_value", csv::num(ar.estimate.value));
    put("results.attain_gap", csv::num(ar.gap));
    put("results.attain_ci", csv::num(ar.combined_ci));
    put("results.attain_within", ar.within ? "1" : "0");
    put("results.product_residual_mean", csv::num(ar.mean_product_residual));
    put("results.product_residual_max", csv::num(ar.max_product_residual));
    put("results.sweep_min_admissible_gap", csv::num(min_adm_gap));
  }

  if (requested("admissibility")) {
    const ControlFn qstar = optimal_control_from_solution(sol, entry.gen);
    const AdmissibilityReport rep = admissibility_check(built.ens, entry.core, qstar);
    rr.admissibility = to_string(rep.verdict);
    put("results.admissibility", to_string(rep.verdict));
    put("results.weight_mean", csv::num(rep.weight_mean));
    put("results.weight_ess", csv::num(rep.ess));
  }

  if (requested("axioms")) {
    const AxiomSuiteResult ax =
        axiom_suite(built.ens, built.state, xi, entry.gen, opts);
    rr.worst_axiom_margin = ax.worst_margin;
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : ax.cases) {
      rows.push_back({c.axiom, c.label, csv::num(c.observed),
                      csv::num(c.tolerance), c.pass ? "1" : "0"});
    }
    const std::string f = join_path(sc.out_dir, "axioms.csv");
    csv::write_file(f, {"axiom", "label", "observed", "tolerance", "pass"}, rows);
    rr.files.push_back(f);
    put("results.axioms_pass", ax.all_pass ? "1" : "0");
    put("results.worst_axiom_margin", csv::num(ax.worst_margin));
  }

  if (requested("inequalities")) {
    std::vector<std::vector<std::string>> rows;
    std::size_t total_viol = 0;
    for (const auto& id : pointwise_ids()) {
      const PointwiseReport rep =
          check_pointwise(id, IneqParams{}, sc.pointwise_samples, sc.seed);
      total_viol += rep.violations;
      rows.push_back({rep.id, params_string(rep.params),
                      std::to_string(rep.samples), std::to_string(rep.violations),
                      csv::num(rep.worst_margin)});
    }
    bool bounds_hold = true;
    const auto add_bound = [&rows, &bounds_hold](const EnsembleBoundReport& rep,
                                                 const std::string& params,
                                                 std::size_t M) {
      bounds_hold = bounds_hold && rep.holds;
      rows.push_back({rep.id, params, std::to_string(M),
                      rep.holds ? "0" : "1", csv::num(rep.lhs - rep.rhs)});
    };
    add_bound(entropy_bound_const(built.ens, 1.0), "q_const=1", built.ens.M);
    add_bound(entropy_power_bound_const(built.ens, 1.0, 4.0),
              "q_const=1;alpha_star=4", built.ens.M);
    add_bound(entropy_exp_bound_const(built.ens, 1.0, 1.0, 1.0, 1.0),
              "q_const=1;mu=1;gamma=1;lambda=1", built.ens.M);
    const std::string f = join_path(sc.out_dir, "inequalities.csv");
    csv::write_file(f, {"inequality_id", "params", "samples", "violations", "worst_margin"},
                    rows);
    rr.files.push_back(f);
    put("results.pointwise_violations", std::to_string(total_viol));
    put("results.bounds_hold", bounds_hold ? "1" : "0");
  }

  if (sc.refine_levels > 1) {
    const std::string f = join_path(sc.out_dir, "refinement.csv");
    csv::write_file(f, {"level", "steps", "paths", "y0", "y0_se"}, refinement_rows);
    rr.files.push_back(f);
  }
  if (sc.plot) {
    const std::string f = join_path(sc.out_dir, "plot.svg");
    write_refinement_svg(f, ladder_pts);
    rr.files.push_back(f);
  }

  {
    std::sort(man.begin(), man.end());
    const std::string f = join_path(sc.out_dir, "manifest");
    std::ofstream out(f, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + f);
    for (const auto& [k, v] : man) out << k << " = " << v << "\n";
    if (!out) throw InputError("write failed: " + f);
    rr.files.push_back(f);
  }
  return rr;
}

namespace {

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t sep = line.find(" = ");
    if (sep == std::string::npos) continue;
    kv[line.substr(0, sep)] = line.substr(sep + 3);
  }
  return kv;
}

}  // namespace

CompareResult compare_manifests(const std::string& path_a, const std::string& path_b) {
  const auto a = read_manifest(path_a);
  const auto b = read_manifest(path_b);
  CompareResult cr;

  const auto va = a.find("library_version"), vb = b.find("library_version");
  if (va != a.end() && vb != b.end() && va->second != vb->second) {
    cr.version_warning = true;
    cr.lines.push_back("warning: library_version differs ('" + va->second +
                       "' vs '" + vb->second + "')");
  }

  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (const auto& k : keys) {
    if (k == "library_version") continue;
    const auto ia = a.find(k), ib = b.find(k);
    if (ia == a.end()) {
      cr.lines.push_back("added: " + k + " = " + ib->second);
      cr.identical = false;
    } else if (ib == b.end()) {
      cr.lines.push_back("removed: " + k + " = " + ia->second);
      cr.identical = false;
    } else if (ia->second != ib->second) {
      cr.lines.push_back("changed: " + k + ": " + ia->second + " -> " + ib->second);
      cr.identical = false;
      if (k == "results.y0") {
        const double d = csv::parse_num(ib->second) - csv::parse_num(ia->second);
        cr.lines.push_back("results.y0 delta = " + csv::num(d));
      }
    }
  }
  return cr;
}

}  // namespace dcu
