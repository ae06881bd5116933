#include "kp/runner.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kp {
namespace {

// ------------------------------------------------------------ config text

struct Entry {
  std::string value;
  int line = 0;  // 0 for overrides
};
using Entries = std::map<std::string, Entry>;

const std::set<std::string> kSections = {"grid", "model", "scheme", "time", "initial", "outputs", "guard"};

// key -> default ("" when required or optional without default)
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"experiment", ""},
    {"grid.lx", ""},
    {"grid.ly", ""},
    {"grid.nx", ""},
    {"grid.ny", ""},
    {"grid.bc_y", "periodic"},
    {"model.p", "1"},
    {"model.lambda", "-1"},
    {"scheme.kind", "compact"},
    {"scheme.order", "4"},
    {"scheme.preconditioner", "diagonal"},
    {"scheme.dealias", "false"},
    {"scheme.picard_tol", "1e-12"},
    {"scheme.picard_max_iter", "50"},
    {"scheme.gmres_tol", "1e-10"},
    {"scheme.gmres_max_iter", "500"},
    {"scheme.gmres_restart", "60"},
    {"time.dt", ""},
    {"time.t_end", ""},
    {"time.n_steps", ""},
    {"initial.state", ""},
    {"outputs.out_dir", "out"},
    {"outputs.diag_every", "1"},
    {"outputs.snapshot_every", "100"},
    {"guard.linf_ceiling", ""},
    {"guard.ceiling_factor", "1e4"},
    {"guard.l2_drift_tol", ""},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_key_name(const std::string& k) {
  if (k.empty()) return false;
  for (const char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

Entries parse_entries(const std::string& text) {
  Entries out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section)) throw ParseError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!is_key_name(key)) throw ParseError(line, "bad key '" + key + "' (lowercase snake_case)");
    if (value.empty()) throw ParseError(line, "empty value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (section.empty() && key != "experiment") throw ParseError(line, "'" + key + "' outside a section");
    if (!out.emplace(full, Entry{value, line}).second) throw ParseError(line, "duplicate key '" + full + "'");
  }
  return out;
}

void apply_overrides(Entries& entries, const std::vector<std::string>& overrides) {
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError(o, "override must be section.key=value");
    const std::string key = trim(o.substr(0, eq));
    const std::string value = trim(o.substr(eq + 1));
    if (value.empty()) throw ValidationError(key, "empty override value");
    entries[key] = Entry{value, 0};
  }
}

class Reader {
 public:
  explicit Reader(Entries e) : entries_(std::move(e)) {}

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second.value;
    for (const auto& [k, d] : kKeys)
      if (k == key && !d.empty()) return d;
    return std::nullopt;
  }

  std::string require_text(const std::string& key) {
    auto v = text(key);
    if (!v) throw ValidationError(key, "missing");
    return *v;
  }

  static double to_number(const std::string& key, const std::string& s) {
    double v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ValidationError(key, "'" + s + "' is not a number");
    if (!std::isfinite(v)) throw ValidationError(key, "must be finite");
    return v;
  }

  static long to_integer(const std::string& key, const std::string& s) {
    const double v = to_number(key, s);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw ValidationError(key, "'" + s + "' is not an integer");
    return static_cast<long>(v);
  }

  std::optional<double> number(const std::string& key) {
    const auto t = text(key);
    return t ? std::optional(to_number(key, *t)) : std::nullopt;
  }
  double require_number(const std::string& key) { return to_number(key, require_text(key)); }
  std::optional<long> integer(const std::string& key) {
    const auto t = text(key);
    return t ? std::optional(to_integer(key, *t)) : std::nullopt;
  }
  long require_integer(const std::string& key) { return to_integer(key, require_text(key)); }

  bool boolean(const std::string& key) {
    const std::string t = require_text(key);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ValidationError(key, "expected true or false");
  }

  const Entries& entries() const { return entries_; }

  // Keys present but never read.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

 private:
  Entries entries_;
  std::set<std::string> used_;
};

BcKind parse_bc(const std::string& s) {
  if (s == "periodic") return BcKind::Periodic;
  if (s == "dirichlet0") return BcKind::Dirichlet0;
  if (s == "neumann0") return BcKind::Neumann0;
  throw ValidationError("grid.bc_y", "expected periodic, dirichlet0 or neumann0");
}

SchemeKind parse_kind(const std::string& s) {
  if (s == "compact") return SchemeKind::CompactFull;
  if (s == "spectral") return SchemeKind::SpectralFull;
  if (s == "mixed") return SchemeKind::MixedSpectralCompact;
  throw ValidationError("scheme.kind", "expected compact, spectral or mixed");
}

PreconditionerKind parse_preconditioner(const std::string& s) {
  if (s == "diagonal") return PreconditionerKind::Diagonal;
  if (s == "modal") return PreconditionerKind::Modal;
  throw ValidationError("scheme.preconditioner", "expected diagonal or modal");
}

// %.17g round-trips for the CSV; messages use fewer digits
std::string format_number(double v, const char* spec = "%.17g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string short_number(double v) { return format_number(v, "%.6g"); }

// ------------------------------------------------------------- snapshots

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xff));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = bytes - 1; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

std::string snapshot_name(long step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%08ld.kps", step);
  return buf;
}

// --------------------------------------------------------------- running

constexpr const char* kCsvHeader = "step,time,mass,l2,linf,energy,max_xline_mass,picard_iters,gmres_iters";

void write_row(std::ostream& out, const DiagnosticsRow& r) {
  out << r.step << ',' << format_number(r.time) << ',' << format_number(r.mass) << ',' << format_number(r.l2) << ','
      << format_number(r.linf) << ',' << format_number(r.energy) << ',' << format_number(r.max_xline_mass) << ','
      << r.picard_iters << ',' << r.gmres_iters << '\n';
}

nlohmann::ordered_json metadata(const ExperimentConfig& cfg, const RunSummary& s, const GuardLimits& limits,
                                long planned) {
  nlohmann::ordered_json m;
  m["experiment"] = cfg.experiment;
  m["solver"] = {{"name", "kp-lab"}, {"version", "1.0"}, {"scheme", to_string(cfg.scheme.kind)},
                 {"scheme_order", cfg.scheme.order}, {"preconditioner", to_string(cfg.scheme.preconditioner)},
                 {"snapshot_format", "KPS1 v" + std::to_string(kSnapshotVersion)}};
  nlohmann::ordered_json resolved;
  for (const auto& [k, v] : cfg.resolved) resolved[k] = v;
  m["config"] = resolved;
  const auto& st = cfg.initial.state;
  if ((st == "zaitsev" || st == "perturbed-zaitsev") && cfg.initial.params.count("alpha") &&
      cfg.initial.params.count("delta")) {
    const ZaitsevParams z = zaitsev_params(cfg.initial.params.at("alpha"), cfg.initial.params.at("delta"));
    nlohmann::ordered_json d = {{"alpha", z.alpha}, {"delta", z.delta}, {"beta", z.beta},
                                {"omega", z.omega}, {"c", z.c}};
    if (const auto it = cfg.initial.params.find("beta"); it != cfg.initial.params.end()) {
      d["beta_override"] = it->second;
    }
    m["zaitsev"] = d;
  }
  m["guard"] = {{"linf_ceiling", std::isfinite(limits.linf_ceiling) ? nlohmann::ordered_json(limits.linf_ceiling)
                                                                    : nlohmann::ordered_json(nullptr)}};
  if (limits.l2_drift_tol) m["guard"]["l2_drift_tol"] = *limits.l2_drift_tol;
  m["run"] = {{"planned_steps", planned},
              {"steps_taken", s.steps_taken},
              {"final_time", s.final_time},
              {"terminal_event", s.terminal_event},
              {"exit_code", s.exit_code}};
  return m;
}

}  // namespace

// ------------------------------------------------------------ parse_config

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  Entries entries = parse_entries(text);
  apply_overrides(entries, overrides);
  Reader r(std::move(entries));
  ExperimentConfig cfg;

  cfg.experiment = r.require_text("experiment");
  if (!is_registered(cfg.experiment)) throw ValidationError("experiment", "unknown experiment '" + cfg.experiment + "'");

  cfg.grid.lx = r.require_number("grid.lx");
  cfg.grid.ly = r.require_number("grid.ly");
  cfg.grid.nx = r.require_integer("grid.nx");
  cfg.grid.ny = r.require_integer("grid.ny");
  cfg.grid.bc_y = parse_bc(r.require_text("grid.bc_y"));

  cfg.model.p = static_cast<int>(r.require_integer("model.p"));
  cfg.model.lambda = r.require_number("model.lambda");

  cfg.scheme.kind = parse_kind(r.require_text("scheme.kind"));
  cfg.scheme.order = static_cast<int>(r.require_integer("scheme.order"));
  cfg.scheme.preconditioner = parse_preconditioner(r.require_text("scheme.preconditioner"));
  cfg.scheme.dealias = r.boolean("scheme.dealias");
  cfg.scheme.picard.tol = r.require_number("scheme.picard_tol");
  cfg.scheme.picard.max_iter = static_cast<int>(r.require_integer("scheme.picard_max_iter"));
  cfg.scheme.gmres.rel_tol = r.require_number("scheme.gmres_tol");
  cfg.scheme.gmres.max_iter = static_cast<int>(r.require_integer("scheme.gmres_max_iter"));
  cfg.scheme.gmres.restart = static_cast<int>(r.require_integer("scheme.gmres_restart"));

  cfg.time.dt = r.require_number("time.dt");
  cfg.time.t_end = r.number("time.t_end");
  cfg.time.n_steps = r.integer("time.n_steps");

  cfg.initial.state = r.require_text("initial.state");
  for (const auto& [k, e] : r.entries())
    if (k.rfind("initial.", 0) == 0 && k != "initial.state") {
      cfg.initial.params[k.substr(8)] = Reader::to_number(k, e.value);
      r.text(k);
    }

  cfg.outputs.out_dir = r.require_text("outputs.out_dir");
  cfg.outputs.diag_every = r.require_integer("outputs.diag_every");
  cfg.outputs.snapshot_every = r.require_integer("outputs.snapshot_every");

  cfg.guard.linf_ceiling = r.number("guard.linf_ceiling");
  cfg.guard.ceiling_factor = r.require_number("guard.ceiling_factor");
  cfg.guard.l2_drift_tol = r.number("guard.l2_drift_tol");

  if (const auto extra = r.unused(); !extra.empty()) throw ValidationError(extra.front(), "unknown key");

  // invariants, checked before anything is allocated
  auto wrap = [](const std::string& key, auto&& check) {
    try {
      check();
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      throw ValidationError(key, e.what());
    }
  };
  wrap("grid", [&] { cfg.grid.validate(); });
  wrap("model", [&] { cfg.model.validate(); });
  wrap("scheme", [&] { cfg.scheme.validate(cfg.grid); });
  if (!(cfg.time.dt > 0)) throw ValidationError("time.dt", "must be positive");
  if (!cfg.time.t_end && !cfg.time.n_steps) throw ValidationError("time.t_end", "need time.t_end or time.n_steps");
  if (cfg.time.t_end && !(*cfg.time.t_end >= 0)) throw ValidationError("time.t_end", "must be non-negative");
  if (cfg.time.n_steps && *cfg.time.n_steps < 0) throw ValidationError("time.n_steps", "must be non-negative");
  wrap("initial.state", [&] { validate_initial_state(cfg.initial.state, cfg.initial.params); });
  if (cfg.outputs.diag_every < 1) throw ValidationError("outputs.diag_every", "must be >= 1");
  if (cfg.outputs.snapshot_every < 0) throw ValidationError("outputs.snapshot_every", "must be >= 0 (0 disables)");
  if (cfg.guard.linf_ceiling && !(*cfg.guard.linf_ceiling > 0))
    throw ValidationError("guard.linf_ceiling", "must be positive");
  if (!(cfg.guard.ceiling_factor > 1)) throw ValidationError("guard.ceiling_factor", "must exceed 1");
  if (cfg.guard.l2_drift_tol && !(*cfg.guard.l2_drift_tol > 0))
    throw ValidationError("guard.l2_drift_tol", "must be positive");

  for (const auto& [k, d] : kKeys)
    if (const auto t = r.text(k)) cfg.resolved[k] = *t;
  for (const auto& [k, e] : r.entries())
    if (k.rfind("initial.", 0) == 0) cfg.resolved[k] = e.value;
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string config_reference() {
  std::ostringstream out;
  out << "Config keys (default in brackets, * = required):\n";
  for (const auto& [k, d] : kKeys) {
    out << "  " << std::left << std::setw(24) << k;
    if (!d.empty())
      out << "[" << d << "]";
    else if (k == "time.t_end")
      out << "(t_end or n_steps)";
    else if (k == "time.n_steps")
      out << "(wins over t_end)";
    else if (k == "guard.linf_ceiling")
      out << "(absolute; default factor * initial linf)";
    else if (k == "guard.l2_drift_tol")
      out << "(off; relative L2 drift that ends the run)";
    else
      out << "*";
    out << '\n';
  }
  out << "  initial.<param>         numeric parameters of the initial state\n";
  out << "Initial states:";
  for (const auto& n : initial_state_names()) out << ' ' << n;
  out << "\nExit codes: 0 ok, 1 internal error, 2 config error, 3 divergence or blow-up\n";
  return out.str();
}

// --------------------------------------------------------------- snapshots

void write_snapshot(const Field& f, double t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.write("KPS1", 4);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(f.grid.nx));
  put_u32(out, static_cast<std::uint32_t>(f.grid.ny));
  put_f64(out, f.grid.lx);
  put_f64(out, f.grid.ly);
  put_f64(out, t);
  for (Index j = 0; j < f.grid.ny; ++j)
    for (Index i = 0; i < f.grid.nx; ++i) put_f64(out, f.values(j, i));
  if (!out) throw InvalidArgument("short write to " + path.string());
}

std::pair<Field, double> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 3 * 4 + 3 * 8;
  if (bytes.size() < 4) throw TruncatedFile(path.string() + ": shorter than the magic");
  if (std::string(bytes.begin(), bytes.begin() + 4) != "KPS1") throw BadMagic(path.string() + ": not a KPS1 snapshot");
  if (bytes.size() < kHeader) throw TruncatedFile(path.string() + ": header cut short");
  const auto version = static_cast<std::uint32_t>(get_le(&bytes[4], 4));
  if (version != kSnapshotVersion) throw BadMagic(path.string() + ": unsupported version " + std::to_string(version));
  const auto nx = static_cast<Index>(get_le(&bytes[8], 4));
  const auto ny = static_cast<Index>(get_le(&bytes[12], 4));
  const double lx = std::bit_cast<double>(get_le(&bytes[16], 8));
  const double ly = std::bit_cast<double>(get_le(&bytes[24], 8));
  const double t = std::bit_cast<double>(get_le(&bytes[32], 8));
  const std::size_t payload = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * 8;
  if (bytes.size() - kHeader != payload)
    throw TruncatedFile(path.string() + ": payload is " + std::to_string(bytes.size() - kHeader) + " bytes, header says " +
                        std::to_string(payload));
  Field f(Grid2D{lx, ly, nx, ny});
  const unsigned char* p = bytes.data() + kHeader;
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i, p += 8) f.values(j, i) = std::bit_cast<double>(get_le(p, 8));
  return {std::move(f), t};
}

// ------------------------------------------------------------------- guard

GuardLimits resolve_guard(const GuardPolicy& policy, const DiagnosticsRow& initial) {
  GuardLimits g;
  if (policy.linf_ceiling)
    g.linf_ceiling = *policy.linf_ceiling;
  else if (initial.linf > 0)
    g.linf_ceiling = policy.ceiling_factor * initial.linf;
  g.l2_reference = initial.l2;
  if (initial.l2 > 0) g.l2_drift_tol = policy.l2_drift_tol;
  return g;
}

GuardDecision blowup_guard(const DiagnosticsRow& row, const GuardLimits& limits) {
  if (!std::isfinite(row.linf) || !std::isfinite(row.l2) || !std::isfinite(row.mass))
    return {true, "nonfinite", "non-finite diagnostics"};
  if (row.linf > limits.linf_ceiling) return {true, "blow-up", "linf " + short_number(row.linf) + " above ceiling"};
  if (limits.l2_drift_tol) {
    const double drift = std::abs(row.l2 - limits.l2_reference) / limits.l2_reference;
    if (drift > *limits.l2_drift_tol) return {true, "blow-up", "relative L2 drift " + short_number(drift)};
  }
  return {};
}

// --------------------------------------------------------------------- run

RunSummary run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.outputs.out_dir;
  fs::create_directories(dir);

  const auto stepper = make_stepper(cfg.grid, cfg.model, cfg.scheme, cfg.time.dt);
  Field u = initial_state(cfg.initial.state, cfg.grid, cfg.initial.params);
  const long planned = cfg.time.steps();
  const double dt = cfg.time.dt;

  RunSummary s;
  s.initial = diagnostics_row(0, 0.0, u, *stepper, StepReport{});
  s.last = s.initial;
  const GuardLimits limits = resolve_guard(cfg.guard, s.initial);

  std::ofstream csv(dir / "diagnostics.csv", std::ios::trunc);
  csv << kCsvHeader << '\n';
  write_row(csv, s.initial);
  const bool snapshots = cfg.outputs.snapshot_every > 0;
  if (snapshots) write_snapshot(u, 0.0, dir / snapshot_name(0));

  long last_snapshot = 0, last_row = 0;
  auto finish_outputs = [&](const Field& f, long step, const DiagnosticsRow& row) {
    if (last_row != step) write_row(csv, row);
    if (snapshots && last_snapshot != step) write_snapshot(f, row.time, dir / snapshot_name(step));
  };

  for (long n = 1; n <= planned; ++n) {
    const double t = static_cast<double>(n) * dt;
    StepReport report;
    try {
      report = stepper->step(u);
    } catch (const PicardDiverged& e) {
      s.terminal_event = "divergence at t=" + short_number(t) + ": " + e.what();
      s.exit_code = kExitTerminalEvent;
      s.last = diagnostics_row(s.steps_taken, s.final_time, u, *stepper, StepReport{});
      finish_outputs(u, s.steps_taken, s.last);
      break;
    }
    s.steps_taken = n;
    s.final_time = t;
    const bool diag_due = n % cfg.outputs.diag_every == 0 || n == planned;
    // The guard needs linf every step; the full row only when it is written.
    DiagnosticsRow row;
    row.step = n;
    row.time = t;
    row.linf = linf_norm(u);
    row.l2 = l2_norm(u);
    row.mass = mass(u);
    const GuardDecision g = blowup_guard(row, limits);
    if (diag_due || g.halt) row = diagnostics_row(n, t, u, *stepper, report);
    s.last = row;
    if (g.halt) {
      s.terminal_event = g.reason + " at t=" + short_number(t) + " (" + g.detail + ")";
      s.exit_code = kExitTerminalEvent;
      finish_outputs(u, n, row);
      break;
    }
    if (diag_due) {
      write_row(csv, row);
      last_row = n;
    }
    if (snapshots && (n % cfg.outputs.snapshot_every == 0 || n == planned)) {
      write_snapshot(u, t, dir / snapshot_name(n));
      last_snapshot = n;
    }
    if (log && (n % 100 == 0 || n == planned))
      *log << cfg.experiment << ": step " << n << "/" << planned << " t=" << t << " linf=" << row.linf << '\n';
  }
  csv.flush();

  std::ofstream meta(dir / "metadata.json", std::ios::trunc);
  meta << metadata(cfg, s, limits, planned).dump(2) << '\n';
  if (log && !s.terminal_event.empty()) *log << cfg.experiment << ": " << s.terminal_event << '\n';
  return s;
}

// ---------------------------------------------------------------- registry

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = {
      {"zaitsev-accuracy", "configs/zaitsev-accuracy.cfg", "Zaitsev travelling wave against its exact form (KP-I)"},
      {"gaussian-conservation", "configs/gaussian-conservation.cfg", "mass and L2 norm of a Gaussian packet"},
      {"zaitsev-perturbation", "configs/zaitsev-perturbation.cfg", "Zaitsev wave with an odd localized perturbation"},
      {"line-instability", "configs/line-instability.cfg", "transverse instability of a perturbed line soliton"},
      {"blowup", "configs/blowup.cfg", "focusing blow-up for p = 2 in KP-I"},
  };
  return registry;
}

bool is_registered(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return true;
  return false;
}

// ------------------------------------------------------------- convergence

ConvergenceResult convergence_sweep(const ExperimentConfig& cfg, RefineAxis axis, const std::vector<Index>& sizes,
                                    std::ostream* log) {
  if (cfg.initial.state != "zaitsev" || cfg.initial.params.count("beta"))
    throw ValidationError("initial.state", "convergence needs the exact zaitsev state");
  const ZaitsevParams z = zaitsev_params(cfg.initial.params.at("alpha"), cfg.initial.params.at("delta"));
  const long steps = cfg.time.steps();
  const double t_end = static_cast<double>(steps) * cfg.time.dt;
  ConvergenceResult out;
  for (const Index n : sizes) {
    Grid2D g = cfg.grid;
    (axis == RefineAxis::X ? g.nx : g.ny) = n;
    const auto stepper = make_stepper(g, cfg.model, cfg.scheme, cfg.time.dt);
    Field u = initial_state("zaitsev", g, cfg.initial.params);
    for (long k = 0; k < steps; ++k) stepper->step(u);
    const double err = l2_error(u, [&](double x, double y, double t) { return zaitsev(z, x, y, t); }, t_end);
    const double h = axis == RefineAxis::X ? g.hx() : g.hy();
    out.sizes.push_back(n);
    out.samples.emplace_back(h, err);
    if (log) *log << "n=" << n << " h=" << h << " error=" << err << '\n';
  }
  out.order = convergence_order(out.samples);
  return out;
}

}  // namespace kp
