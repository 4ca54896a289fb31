// Copyright The msfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "msfrac/scenario.hpp"

namespace {

int exit_code(msfrac::ErrorKind k) {
  using msfrac::ErrorKind;
  switch (k) {
    case ErrorKind::ConfigInvalid:
      return 2;
    case ErrorKind::PolylineOffGrid:
    case ErrorKind::NonAdjacentSegment:
    case ErrorKind::OverlappingFracture:
    case ErrorKind::NodeNotFound:
      return 3;
    case ErrorKind::SolverFailure:
    case ErrorKind::SingularLocalSystem:
      return 4;
    default:
      return 1;
  }
}

std::vector<int> parse_schedule(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      msfrac::fail(msfrac::ErrorKind::ConfigInvalid, "--basis-schedule: bad entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) msfrac::fail(msfrac::ErrorKind::ConfigInvalid, "--basis-schedule: empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale flow in fractured porous media"};
  std::string config, scenario, basis, schedule, out;
  int threads = -1;
  std::uint64_t seed = 0;
  bool verify = false;
  app.add_option("--config", config, "YAML configuration");
  app.add_option("--scenario", scenario, "single | dual | dual_rve | shale");
  app.add_option("--basis", basis,
                 "gmsfem_uncoupled | gmsfem_coupled | simplified | simplified_cellwise | lambda_select");
  app.add_option("--basis-schedule", schedule, "comma-separated basis counts, e.g. 1,2,4,8");
  app.add_option("--threads", threads, "worker cap (0: default)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory (default $MSFRAC_OUT or .)");
  app.add_flag("--verify", verify, "evaluate the projection bounds");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    msfrac::Overrides o;
    if (!scenario.empty()) o.scenario = scenario;
    if (!basis.empty()) o.basis = basis;
    if (!schedule.empty()) o.schedule = parse_schedule(schedule);
    if (*seed_opt) o.seed = seed;
    if (threads >= 0) o.threads = threads;
    if (!out.empty()) {
      o.out = out;
    } else if (const char* env = std::getenv("MSFRAC_OUT"); env && *env) {
      o.out = std::string(env);
    }
    o.verify = verify;

    msfrac::ScenarioConfig cfg = config.empty() ? msfrac::preset(scenario.empty() ? "single" : scenario)
                                                : msfrac::load_config(config);
    cfg = msfrac::apply_overrides(std::move(cfg), o, !config.empty());
    const auto summary = msfrac::run(cfg);
    for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const auto& r : summary.rows) {
      std::printf("%s M=%s dof=%d", r.mode.c_str(), r.m.c_str(), r.dof);
      for (std::size_t s = 0; s < r.norms.l2.size(); ++s) {
        std::printf(" l2_c%zu=%.4e", s + 1, r.norms.l2[s]);
        if (s < r.norms.h1.size()) std::printf(" h1_c%zu=%.4e", s + 1, r.norms.h1[s]);
      }
      std::printf("\n");
    }
    if (summary.shale_l2) std::printf("shale relative L2 (both continua) = %.4e\n", *summary.shale_l2);
    return 0;
  } catch (const msfrac::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(msfrac::to_string(e.kind())).c_str(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
