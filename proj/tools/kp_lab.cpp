#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "kp/runner.hpp"

namespace {

std::vector<kp::Index> default_sizes(kp::Index base) {
  // base, 1.5 base, 2 base with the parity of base kept (odd-N compact grids stay odd)
  std::vector<kp::Index> out;
  for (const double f : {1.0, 1.5, 2.0}) {
    auto n = static_cast<kp::Index>(std::lround(f * static_cast<double>(base)));
    if ((n - base) % 2 != 0) ++n;
    out.push_back(n);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized KP solver lab"};
  app.footer(kp::config_reference());
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "override a key, section.key=value (repeatable)");
  run->add_flag("-q,--quiet", quiet, "no progress output");

  auto* list = app.add_subcommand("list-experiments", "print the registered experiments");

  std::string refine;
  std::vector<kp::Index> sizes;
  auto* conv = app.add_subcommand("convergence", "grid refinement sweep against the exact Zaitsev wave");
  conv->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  conv->add_option("--refine", refine, "axis to refine")->required()->check(CLI::IsMember({"x", "y"}));
  conv->add_option("--sizes", sizes, "grid sizes along the axis (default n, 1.5n, 2n)")->delimiter(',');
  conv->add_option("--set", overrides, "override a key, section.key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kp::kExitOk : kp::kExitConfig;
  }

  if (*list) {
    for (const auto& e : kp::experiment_registry())
      std::cout << std::left << std::setw(24) << e.name << std::setw(38) << e.config << e.description << '\n';
    return kp::kExitOk;
  }

  kp::ExperimentConfig cfg;
  try {
    cfg = kp::parse_config(config, overrides);
  } catch (const kp::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kp::kExitConfig;
  }

  try {
    if (*run) {
      const kp::RunSummary s = kp::run_experiment(cfg, quiet ? nullptr : &std::cerr);
      std::cout << cfg.experiment << ": " << s.steps_taken << " steps to t=" << s.final_time;
      if (!s.terminal_event.empty()) std::cout << ", terminal event: " << s.terminal_event;
      std::cout << '\n';
      return s.exit_code;
    }
    const auto axis = refine == "x" ? kp::RefineAxis::X : kp::RefineAxis::Y;
    if (sizes.empty()) sizes = default_sizes(axis == kp::RefineAxis::X ? cfg.grid.nx : cfg.grid.ny);
    const kp::ConvergenceResult r = kp::convergence_sweep(cfg, axis, sizes, &std::cerr);
    std::cout << "n,h,l2_error\n";
    for (std::size_t i = 0; i < r.sizes.size(); ++i)
      std::cout << r.sizes[i] << ',' << std::setprecision(10) << r.samples[i].first << ',' << r.samples[i].second
                << '\n';
    std::cout << "measured order along " << refine << ": " << std::setprecision(4) << r.order << '\n';
    return kp::kExitOk;
  } catch (const kp::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kp::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kp::kExitInternal;
  }
}
