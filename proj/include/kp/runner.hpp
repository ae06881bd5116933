#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kp/analytic.hpp"
#include "kp/diagnostics.hpp"
#include "kp/stepper.hpp"

namespace kp {

// exit statuses of the CLI and run_experiment
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitTerminalEvent = 3 };

struct InitialSpec {
  std::string state;
  ParamMap params;
};

struct OutputSpec {
  std::filesystem::path out_dir = "out";
  long diag_every = 1;
  long snapshot_every = 100;
};

struct GuardPolicy {
  std::optional<double> linf_ceiling;  // absolute; overrides the factor
  double ceiling_factor = 1e4;         // times the initial linf
  // Relative L2 drift from the initial state that ends the run. The scheme keeps L2
  // while the solution is resolved, so drift marks collapse to the grid scale.
  std::optional<double> l2_drift_tol;
};

struct ExperimentConfig {
  std::string experiment;
  Grid2D grid;
  ModelParams model;
  SchemeConfig scheme;
  TimeParams time;
  InitialSpec initial;
  OutputSpec outputs;
  GuardPolicy guard;
  // every key as resolved after defaults and overrides, "section.key" -> text
  std::map<std::string, std::string> resolved;
};

// Sectioned "key = value" text, '#' starts a comment. The top-level key
// `experiment` precedes sections [grid] [model] [scheme] [time] [initial] [outputs] [guard].
// Overrides are "section.key=value" strings applied after the file. Throws
// ParseError (with line) on syntax, ValidationError (with key) on content.
ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
// Key reference with defaults, for --help.
std::string config_reference();

// KPS1 snapshot: "KPS1", u32 version, u32 nx, u32 ny, f64 lx, f64 ly, f64 time,
// then ny*nx f64 values with x fastest; all little-endian.
inline constexpr std::uint32_t kSnapshotVersion = 1;
void write_snapshot(const Field& f, double t, const std::filesystem::path& path);
// The y boundary is not stored; the returned grid is periodic in y.
std::pair<Field, double> read_snapshot(const std::filesystem::path& path);

struct GuardLimits {
  double linf_ceiling = std::numeric_limits<double>::infinity();
  double l2_reference = 0;
  std::optional<double> l2_drift_tol;
};
GuardLimits resolve_guard(const GuardPolicy& policy, const DiagnosticsRow& initial);

struct GuardDecision {
  bool halt = false;
  std::string reason;  // "nonfinite" or "blow-up"
  std::string detail;
};
GuardDecision blowup_guard(const DiagnosticsRow& row, const GuardLimits& limits);

struct RunSummary {
  int exit_code = kExitOk;
  long steps_taken = 0;
  double final_time = 0;
  std::string terminal_event;  // empty on a clean finish
  DiagnosticsRow initial, last;
};

// Runs one experiment, writing diagnostics.csv, snapshot_<step>.kps and metadata.json
// into cfg.outputs.out_dir. Progress lines go to `log` when given.
RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct ExperimentInfo {
  std::string name;
  std::string config;  // path relative to the repository root
  std::string description;
};
const std::vector<ExperimentInfo>& experiment_registry();
bool is_registered(const std::string& name);

enum class RefineAxis { X, Y };

struct ConvergenceResult {
  std::vector<Index> sizes;
  std::vector<std::pair<double, double>> samples;  // (h, L2 error at t_end)
  double order = 0;
};

// Re-runs cfg at each size along one axis and measures the L2 error against the
// exact Zaitsev wave at t_end. Needs a zaitsev initial state.
ConvergenceResult convergence_sweep(const ExperimentConfig& cfg, RefineAxis axis, const std::vector<Index>& sizes,
                                    std::ostream* log = nullptr);

}  // namespace kp
