#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "dcu/csvio.hpp"
#include "dcu/errors.hpp"
#include "dcu/parallel.hpp"
#include "dcu/scenario.hpp"

namespace {

int run_command(const std::string& config, const std::string& out_override) {
  dcu::Scenario sc = dcu::parse_scenario_file(config);
  if (!out_override.empty()) sc.out_dir = out_override;
  const dcu::RunResult rr = dcu::run_scenario(sc);
  std::printf("scenario %s: y0 = %s (se %s)\n", sc.name.c_str(),
              dcu::csv::num(rr.y0).c_str(), dcu::csv::num(rr.y0_se).c_str());
  if (!std::isnan(rr.attain_gap)) {
    std::printf("attainability gap = %s\n", dcu::csv::num(rr.attain_gap).c_str());
  }
  if (!std::isnan(rr.worst_axiom_margin)) {
    std::printf("worst axiom margin = %s\n",
                dcu::csv::num(rr.worst_axiom_margin).c_str());
  }
  if (!rr.admissibility.empty()) {
    std::printf("admissibility = %s\n", rr.admissibility.c_str());
  }
  for (const auto& f : rr.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int compare_command(const std::string& a, const std::string& b) {
  const dcu::CompareResult cr = dcu::compare_manifests(a, b);
  if (cr.identical && !cr.version_warning) {
    std::printf("manifests identical\n");
  } else {
    for (const auto& line : cr.lines) std::printf("%s\n", line.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual representation toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (0 = library default)");

  std::string config, out_dir;
  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory override");

  std::string man_a, man_b;
  CLI::App* cmp = app.add_subcommand("compare", "diff two run manifests");
  cmp->add_option("manifest_a", man_a, "first manifest")->required();
  cmp->add_option("manifest_b", man_b, "second manifest")->required();

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) dcu::par::set_thread_count(threads);

  try {
    if (run->parsed()) return run_command(config, out_dir);
    return compare_command(man_a, man_b);
  } catch (const dcu::BlowupError& e) {
    std::fprintf(stderr, "blowup: %s\n", e.what());
    return 3;
  } catch (const dcu::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::ParamError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::CatalogueError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::ClassError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::GridError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dcu::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
