// qcbench: command line front end over the simulation core. Subcommands:
//   spectrum       print eigenvalues, gaps, and the coupling band profile
//   simulate       run an experiment config: trajectory files + check reports
//   synthesize     design a transfer pulse or ladder schedule
//   galerkin-order truncation order by formula or empirical doubling
//   diagnose       run inequality checks on a control without persisting states
//   sweep          concurrent parameter sweeps (amplitude scaling, truncation)
//
// Exit codes: 0 all checks pass, 1 check failure, 2 validation/config error.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcbench/diagnostics.hpp"
#include "qcbench/galerkin.hpp"
#include "qcbench/io.hpp"
#include "qcbench/propagator.hpp"
#include "qcbench/spectral.hpp"
#include "qcbench/synth.hpp"

namespace {

using nlohmann::json;
using namespace qcbench;

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input files that fail to open are configuration problems (exit 2), unlike
// runtime failures mid-computation (exit 1).
std::string read_input_file(const std::string& path) {
  try {
    return io::read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw config_error(e.what());
  }
}

// ---------------------------------------------------------------------------
// strict JSON helpers: every object is checked for unknown keys so a typo in
// a config cannot silently change an experiment.

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw config_error("unknown key \"" + key + "\" in " + where);
    }
  }
}

json parse_config_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw config_error(std::string("malformed JSON in ") + what);
  }
  if (!j.is_object()) {
    throw config_error(std::string(what) + " must be a JSON object");
  }
  return j;
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw config_error(std::string("missing numeric \"") + key + "\" in " + where);
  }
  return obj[key].get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw config_error(std::string("missing integer \"") + key + "\" in " + where);
  }
  return obj[key].get<int>();
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw config_error(std::string("missing string \"") + key + "\" in " + where);
  }
  return obj[key].get<std::string>();
}

// ---------------------------------------------------------------------------
// shared pieces of experiment configs

spectral::SystemPtr system_from_spec(const json& spec) {
  if (spec.is_string()) {
    return spectral::make_system_by_name(spec.get<std::string>());
  }
  if (spec.is_object()) {
    reject_unknown_keys(spec, {"data_file"}, "system");
    return io::system_from_json(
        read_input_file(require_string(spec, "data_file", "system")));
  }
  throw config_error("system must be a name or {\"data_file\": path}");
}

synth::PulseShape shape_from_name(const std::string& name) {
  if (name == "cosine") return synth::PulseShape::cosine;
  if (name == "square") return synth::PulseShape::square;
  if (name == "tabulated") return synth::PulseShape::tabulated;
  throw config_error("unknown pulse shape \"" + name + "\"");
}

synth::DesignOptions design_options_from(const json& obj, const std::string& where) {
  synth::DesignOptions opt;
  if (obj.contains("steps_per_period")) {
    opt.steps_per_period = require_int(obj, "steps_per_period", where);
  }
  if (obj.contains("phase")) opt.phase = require_number(obj, "phase", where);
  if (obj.contains("collision_scan")) {
    opt.collision_scan = require_int(obj, "collision_scan", where);
  }
  if (obj.contains("table")) {
    if (!obj["table"].is_array()) throw config_error("table must be an array");
    for (const auto& v : obj["table"]) opt.table.push_back(v.get<double>());
  }
  return opt;
}

prop::PiecewiseConstantControl load_control_file(const std::string& path) {
  std::string text = read_input_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return io::control_from_csv(text);
  }
  return io::control_from_json(text);
}

prop::PiecewiseConstantControl control_from_spec(const json& spec,
                                                 const spectral::SystemPtr& sys) {
  if (!spec.is_object()) throw config_error("control must be an object");
  if (spec.contains("file")) {
    reject_unknown_keys(spec, {"file"}, "control");
    return load_control_file(require_string(spec, "file", "control"));
  }
  if (spec.contains("breakpoints") || spec.contains("values")) {
    reject_unknown_keys(spec, {"breakpoints", "values"}, "control");
    return io::control_from_json(
        json{{"schema_version", 1},
             {"kind", "control"},
             {"breakpoints", spec.value("breakpoints", json::array())},
             {"values", spec.value("values", json::array())}}
            .dump());
  }
  if (spec.contains("constant")) {
    reject_unknown_keys(spec, {"constant"}, "control");
    const json& c = spec["constant"];
    reject_unknown_keys(c, {"value", "duration"}, "control.constant");
    return prop::PiecewiseConstantControl::constant(
        require_number(c, "value", "control.constant"),
        require_number(c, "duration", "control.constant"));
  }
  if (spec.contains("design")) {
    reject_unknown_keys(spec, {"design"}, "control");
    const json& d = spec["design"];
    reject_unknown_keys(d,
                        {"from", "to", "amplitude", "shape", "steps_per_period",
                         "phase", "collision_scan", "table"},
                        "control.design");
    auto design = synth::design_transfer(
        sys, require_int(d, "from", "control.design"),
        require_int(d, "to", "control.design"),
        require_number(d, "amplitude", "control.design"),
        shape_from_name(require_string(d, "shape", "control.design")),
        design_options_from(d, "control.design"));
    return design.control;
  }
  if (spec.contains("schedule")) {
    reject_unknown_keys(spec, {"schedule"}, "control");
    const json& s = spec["schedule"];
    reject_unknown_keys(s,
                        {"target", "amplitude", "shape", "steps_per_period",
                         "phase", "collision_scan", "table"},
                        "control.schedule");
    auto schedule = synth::ladder_schedule(
        sys, require_int(s, "target", "control.schedule"),
        require_number(s, "amplitude", "control.schedule"),
        shape_from_name(require_string(s, "shape", "control.schedule")),
        design_options_from(s, "control.schedule"));
    return schedule.control;
  }
  throw config_error(
      "control must provide file, breakpoints/values, constant, design, or schedule");
}

galerkin::StateSpec state_from_spec(const json& spec) {
  if (spec.is_number_integer()) {
    return galerkin::StateSpec::level(spec.get<int>());
  }
  if (spec.is_array()) {
    Eigen::VectorXcd c(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const json& pair = spec[i];
      if (!pair.is_array() || pair.size() != 2) {
        throw config_error("initial_state coefficients must be [re, im] pairs");
      }
      c(Eigen::Index(i)) =
          spectral::cplx(pair[0].get<double>(), pair[1].get<double>());
    }
    return galerkin::StateSpec::coefficients(std::move(c));
  }
  throw config_error("initial_state must be a level index or coefficient list");
}

struct CheckSettings {
  std::vector<std::string> checks{"norm-growth", "l1-lower-bound",
                                  "energy-variation"};
  int norm_exponent{1};
  double guard_edge_pop{1e-6};
  double tol_norm_growth{1e-9};
  double tol_l1{1e-6};
  double tol_energy{1e-8};
};

std::vector<diag::DiagnosticReport> run_checks(
    const galerkin::Compression& comp, const prop::PiecewiseConstantControl& u,
    const prop::Trajectory& traj, const CheckSettings& s) {
  std::vector<diag::DiagnosticReport> reports;
  for (const std::string& name : s.checks) {
    if (name == "norm-growth") {
      reports.push_back(diag::check_norm_growth(comp, traj, s.norm_exponent,
                                                s.guard_edge_pop,
                                                s.tol_norm_growth));
    } else if (name == "l1-lower-bound") {
      reports.push_back(diag::check_l1_lower_bound(comp, traj, s.tol_l1));
    } else if (name == "energy-variation") {
      reports.push_back(
          diag::check_energy_variation(comp, u, traj, s.guard_edge_pop, s.tol_energy));
    } else {
      throw config_error("unknown check \"" + name + "\"");
    }
  }
  return reports;
}

int summarize_reports(const std::vector<diag::DiagnosticReport>& reports) {
  int rc = kOk;
  for (const auto& r : reports) {
    std::printf("%-18s %-8s", r.check.c_str(), diag::to_string(r.verdict));
    if (r.verdict == diag::Verdict::skipped) {
      std::printf(" (%s)\n", r.reason.c_str());
      continue;
    }
    std::printf(" measured=%.6e bound=%.6e tol=%.2e\n", r.measured, r.bound,
                r.tolerance);
    if (r.verdict == diag::Verdict::fail) rc = kCheckFailure;
  }
  return rc;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const std::string& system_name, const std::string& data_file,
                 int n) {
  spectral::SystemPtr sys = data_file.empty()
                                ? spectral::make_system_by_name(system_name)
                                : io::system_from_json(read_input_file(data_file));
  spectral::validate_system(*sys, n, 1e-12);
  auto comp = galerkin::compress(sys, n);

  std::printf("system: %s (order %d)\n", sys->name.c_str(), n);
  std::printf("%4s %22s %22s\n", "k", "lambda_k", "gap_to_next");
  for (int k = 1; k <= n; ++k) {
    if (k < n) {
      std::printf("%4d %22.12g %22.12g\n", k, comp.lambda(k - 1),
                  comp.lambda(k - 1) - comp.lambda(k));
    } else {
      std::printf("%4d %22.12g %22s\n", k, comp.lambda(k - 1), "-");
    }
  }
  std::printf("coupling band profile (max |b_jk| per offset):\n");
  for (int d = 0; d <= comp.bandwidth; ++d) {
    double peak = 0.0;
    for (int j = 1; j + d <= n; ++j) {
      peak = std::max(peak, std::abs(comp.coupling(j - 1, j + d - 1)));
    }
    if (peak > 0.0) std::printf("  offset %d: %.12g\n", d, peak);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate / diagnose

struct ExperimentRun {
  spectral::SystemPtr sys;
  galerkin::Compression comp;
  prop::PiecewiseConstantControl control;
  Eigen::VectorXcd psi0;
  double sample_dt{prop::kBreakpointsOnly};
  CheckSettings checks;
  std::string output;
  std::vector<galerkin::TruncationRow> order_table;  // auto-order runs only
};

void apply_tolerances(const json& tol, CheckSettings& s) {
  reject_unknown_keys(tol, {"norm_growth", "l1", "energy"}, "tolerances");
  if (tol.contains("norm_growth")) {
    s.tol_norm_growth = require_number(tol, "norm_growth", "tolerances");
  }
  if (tol.contains("l1")) s.tol_l1 = require_number(tol, "l1", "tolerances");
  if (tol.contains("energy")) s.tol_energy = require_number(tol, "energy", "tolerances");
}

ExperimentRun build_experiment(const json& cfg) {
  reject_unknown_keys(cfg,
                      {"schema_version", "system", "order", "order_cap", "eps",
                       "control", "initial_state", "sample_dt", "checks",
                       "norm_exponent", "guard_edge_pop", "tolerances", "output"},
                      "experiment config");
  if (cfg.value("schema_version", 0) != 1) {
    throw config_error("experiment config must declare schema_version 1");
  }
  if (!cfg.contains("system") || !cfg.contains("order") ||
      !cfg.contains("control") || !cfg.contains("initial_state")) {
    throw config_error(
        "experiment config requires system, order, control, initial_state");
  }

  ExperimentRun run;
  run.sys = system_from_spec(cfg["system"]);
  run.control = control_from_spec(cfg["control"], run.sys);
  galerkin::StateSpec state = state_from_spec(cfg["initial_state"]);

  if (!run.control.within(run.sys->control_set, 1e-12)) {
    throw config_error("control values lie outside the system's admissible set");
  }

  int order = 0;
  if (cfg["order"].is_string()) {
    if (cfg["order"].get<std::string>() != "auto") {
      throw config_error("order must be an integer or \"auto\"");
    }
    bool anharmonic = run.sys->name.rfind("anharmonic", 0) == 0;
    if (anharmonic && !cfg.contains("order_cap")) {
      throw config_error(
          "auto truncation for the anharmonic system requires order_cap (the "
          "doubling search is expected to outgrow any default)");
    }
    int cap = cfg.contains("order_cap")
                  ? require_int(cfg, "order_cap", "experiment config")
                  : 1024;
    double eps = cfg.contains("eps") ? require_number(cfg, "eps", "experiment config")
                                     : 1e-6;
    auto found = galerkin::empirical_truncation_order(run.sys, run.control, state,
                                                      eps, cap);
    run.order_table = found.table;
    if (!found.order) {
      throw std::runtime_error(
          "auto truncation failed: error still above eps at the order cap");
    }
    order = *found.order;
  } else if (cfg["order"].is_number_integer()) {
    order = cfg["order"].get<int>();
    if (cfg.contains("order_cap")) {
      throw config_error("order_cap only applies when order is \"auto\"");
    }
  } else {
    throw config_error("order must be an integer or \"auto\"");
  }

  run.comp = galerkin::compress(run.sys, order);
  run.psi0 = state.embed(order);

  if (cfg.contains("sample_dt")) {
    run.sample_dt = require_number(cfg, "sample_dt", "experiment config");
  }
  if (cfg.contains("checks")) {
    if (!cfg["checks"].is_array()) throw config_error("checks must be an array");
    run.checks.checks.clear();
    for (const auto& c : cfg["checks"]) {
      if (!c.is_string()) throw config_error("checks must be strings");
      run.checks.checks.push_back(c.get<std::string>());
    }
  }
  if (cfg.contains("norm_exponent")) {
    run.checks.norm_exponent = require_int(cfg, "norm_exponent", "experiment config");
  }
  if (cfg.contains("guard_edge_pop")) {
    run.checks.guard_edge_pop =
        require_number(cfg, "guard_edge_pop", "experiment config");
  }
  if (cfg.contains("tolerances")) apply_tolerances(cfg["tolerances"], run.checks);
  run.output = cfg.value("output", "");
  return run;
}

struct CliOverrides {
  std::string out;
  std::optional<double> guard_edge_pop, tol_norm_growth, tol_l1, tol_energy;

  void apply(ExperimentRun& run) const {
    if (!out.empty()) run.output = out;
    if (guard_edge_pop) run.checks.guard_edge_pop = *guard_edge_pop;
    if (tol_norm_growth) run.checks.tol_norm_growth = *tol_norm_growth;
    if (tol_l1) run.checks.tol_l1 = *tol_l1;
    if (tol_energy) run.checks.tol_energy = *tol_energy;
  }
};

json summary_json(const ExperimentRun& run, const prop::Trajectory& traj,
                  const std::vector<diag::DiagnosticReport>& reports) {
  const Eigen::VectorXcd& xT = traj.states.back();
  json populations = json::array();
  for (int k = 1; k <= run.comp.order; ++k) {
    populations.push_back(std::norm(xT(k - 1)));
  }
  json checks = json::array();
  for (const auto& r : reports) {
    checks.push_back(json::parse(io::report_to_json(r)));
  }
  json j{{"schema_version", 1},
         {"kind", "run-summary"},
         {"system", run.sys->name},
         {"order", run.comp.order},
         {"control_l1", run.control.l1_norm()},
         {"duration", run.control.duration()},
         {"terminal_populations", std::move(populations)},
         {"terminal_norm", xT.norm()},
         {"checks", std::move(checks)}};
  if (!run.order_table.empty()) {
    json table = json::array();
    for (const auto& row : run.order_table) {
      table.push_back(json{{"order", row.order}, {"error", row.error}});
    }
    j["order_table"] = std::move(table);
  }
  return j;
}

int cmd_simulate(const std::string& config_path, const CliOverrides& over) {
  json cfg = parse_config_text(read_input_file(config_path), "experiment config");
  ExperimentRun run = build_experiment(cfg);
  over.apply(run);

  prop::Trajectory traj = prop::propagate(run.comp, run.control, run.psi0,
                                          run.sample_dt);
  auto reports = run_checks(run.comp, run.control, traj, run.checks);

  if (!run.output.empty()) {
    std::filesystem::create_directories(run.output);
    std::filesystem::path dir(run.output);
    io::write_text_file((dir / "control.json").string(),
                        io::control_to_json(run.control));
    io::write_text_file((dir / "control.csv").string(),
                        io::control_to_csv(run.control));
    io::write_text_file((dir / "trajectory.json").string(),
                        io::trajectory_to_json(traj));
    std::ostringstream csv;
    io::write_trajectory_csv(csv, traj);
    io::write_text_file((dir / "trajectory.csv").string(), csv.str());
    std::string lines;
    for (const auto& r : reports) lines += io::report_to_json(r) + "\n";
    io::write_text_file((dir / "reports.jsonl").string(), lines);
    io::write_text_file((dir / "summary.json").string(),
                        summary_json(run, traj, reports).dump(2) + "\n");
  }

  std::printf("system %s, order %d, %zu segments, L1=%.6g, duration=%.6g\n",
              run.sys->name.c_str(), run.comp.order, run.control.segments(),
              run.control.l1_norm(), run.control.duration());
  const Eigen::VectorXcd& xT = traj.states.back();
  std::vector<int> levels(std::size_t(run.comp.order));
  for (int k = 0; k < run.comp.order; ++k) levels[std::size_t(k)] = k + 1;
  std::sort(levels.begin(), levels.end(), [&](int a, int b) {
    return std::norm(xT(a - 1)) > std::norm(xT(b - 1));
  });
  for (int i = 0; i < std::min(5, run.comp.order); ++i) {
    std::printf("terminal population level %d = %.9f\n", levels[std::size_t(i)],
                std::norm(xT(levels[std::size_t(i)] - 1)));
  }
  return summarize_reports(reports);
}

int cmd_diagnose(const std::string& system_name, const std::string& data_file,
                 int n, const std::string& control_path, int initial_level,
                 double sample_dt, const std::vector<std::string>& checks,
                 int norm_exponent, const CliOverrides& over) {
  spectral::SystemPtr sys = data_file.empty()
                                ? spectral::make_system_by_name(system_name)
                                : io::system_from_json(read_input_file(data_file));
  auto comp = galerkin::compress(sys, n);
  auto u = load_control_file(control_path);
  if (!u.within(sys->control_set, 1e-12)) {
    throw config_error("control values lie outside the system's admissible set");
  }
  Eigen::VectorXcd psi0 = galerkin::StateSpec::level(initial_level).embed(n);

  CheckSettings settings;
  if (!checks.empty()) settings.checks = checks;
  settings.norm_exponent = norm_exponent;
  ExperimentRun run;  // reuse the override plumbing
  run.checks = settings;
  over.apply(run);
  settings = run.checks;

  auto traj = prop::propagate(comp, u, psi0,
                              sample_dt > 0 ? sample_dt : prop::kBreakpointsOnly);
  auto reports = run_checks(comp, u, traj, settings);
  for (const auto& r : reports) std::printf("%s\n", io::report_to_json(r).c_str());
  if (!run.output.empty()) {
    std::filesystem::create_directories(run.output);
    std::string lines;
    for (const auto& r : reports) lines += io::report_to_json(r) + "\n";
    io::write_text_file(
        (std::filesystem::path(run.output) / "reports.jsonl").string(), lines);
  }
  return summarize_reports(reports);
}

// ---------------------------------------------------------------------------
// synthesize

json design_json(const synth::TransferDesign& d) {
  json collisions = json::array();
  for (const auto& c : d.collision_warnings) {
    collisions.push_back(json{
        {"l", c.l}, {"m", c.m}, {"harmonic", c.harmonic}, {"gap", c.gap}});
  }
  return json{{"from", d.from},
              {"to", d.to},
              {"amplitude", d.amplitude},
              {"period", d.period},
              {"rendered_efficiency", d.rendered_efficiency},
              {"t_pi", d.t_pi},
              {"repetitions", d.repetitions},
              {"predicted_fidelity", d.predicted_fidelity},
              {"l1", d.l1},
              {"collisions", std::move(collisions)}};
}

int cmd_synthesize(const std::string& system_name, const std::string& data_file,
                   int from, int to, int ladder_to, double amplitude,
                   const std::string& shape_name, int steps_per_period,
                   double phase, int collision_scan, const std::string& out) {
  spectral::SystemPtr sys = data_file.empty()
                                ? spectral::make_system_by_name(system_name)
                                : io::system_from_json(read_input_file(data_file));
  synth::DesignOptions opt;
  opt.steps_per_period = steps_per_period;
  opt.phase = phase;
  opt.collision_scan = collision_scan;
  synth::PulseShape shape = shape_from_name(shape_name);

  prop::PiecewiseConstantControl control;
  json summary;
  if (ladder_to > 0) {
    auto schedule = synth::ladder_schedule(sys, ladder_to, amplitude, shape, opt);
    control = schedule.control;
    json legs = json::array();
    for (const auto& leg : schedule.legs) legs.push_back(design_json(leg));
    summary = json{{"schema_version", 1},
                   {"kind", "ladder-schedule"},
                   {"system", sys->name},
                   {"target", schedule.target},
                   {"total_l1", schedule.total_l1},
                   {"l1_budget", schedule.l1_budget},
                   {"legs", std::move(legs)}};
    std::printf("ladder to level %d: %zu legs, L1=%.6g (budget %.6g)\n",
                ladder_to, schedule.legs.size(), schedule.total_l1,
                schedule.l1_budget);
  } else {
    auto design = synth::design_transfer(sys, from, to, amplitude, shape, opt);
    control = design.control;
    summary = design_json(design);
    summary["schema_version"] = 1;
    summary["kind"] = "transfer-design";
    summary["system"] = sys->name;
    std::printf(
        "transfer (%d,%d): period=%.6g reps=%d L1=%.6g predicted fidelity=%.6f\n",
        from, to, design.period, design.repetitions, design.l1,
        design.predicted_fidelity);
    for (const auto& c : design.collision_warnings) {
      std::printf("warning: (%d,%d) gap %.6g sits on harmonic %d\n", c.l, c.m,
                  c.gap, c.harmonic);
    }
  }

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::filesystem::path dir(out);
    io::write_text_file((dir / "control.json").string(),
                        io::control_to_json(control));
    io::write_text_file((dir / "control.csv").string(), io::control_to_csv(control));
    io::write_text_file((dir / "design.json").string(), summary.dump(2) + "\n");
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// galerkin-order

int cmd_galerkin_order(const std::string& formula, const std::string& empirical,
                       double K, double eps, const std::string& control_path,
                       int initial_level, int cap, int start) {
  if (formula.empty() == empirical.empty()) {
    throw config_error("exactly one of --formula or --empirical is required");
  }
  if (!formula.empty()) {
    if (formula != "harmonic") {
      throw config_error("only the harmonic ladder has a closed-form order");
    }
    auto order = galerkin::harmonic_truncation_order(K, eps);
    if (!order) {
      std::printf("no order below the search cap\n");
      return kCheckFailure;
    }
    std::printf("order %d\n", *order);
    return kOk;
  }

  auto sys = spectral::make_system_by_name(empirical);
  if (control_path.empty()) {
    throw config_error("--empirical requires --control FILE");
  }
  auto u = load_control_file(control_path);
  auto result = galerkin::empirical_truncation_order(
      sys, u, galerkin::StateSpec::level(initial_level), eps, cap, start);
  std::printf("%8s %14s\n", "N", "error");
  for (const auto& row : result.table) {
    std::printf("%8d %14.6e\n", row.order, row.error);
  }
  if (!result.order) {
    std::printf("no converged order within cap %d\n", cap);
    return kCheckFailure;
  }
  std::printf("order %d\n", *result.order);
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

// Runs cells on a small worker pool; exceptions propagate after the barrier.
void run_cells(std::size_t count, int jobs,
               const std::function<void(std::size_t)>& cell) {
  if (jobs < 1) throw config_error("--jobs must be >= 1");
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        cell(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  std::size_t n_threads = std::min<std::size_t>(std::size_t(jobs), count);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out) {
  json cfg = parse_config_text(read_input_file(config_path), "sweep config");
  if (cfg.value("schema_version", 0) != 1) {
    throw config_error("sweep config must declare schema_version 1");
  }
  std::string kind = require_string(cfg, "kind", "sweep config");
  std::string csv;
  std::string cell_prefix = out.empty() ? "" : out + "/cell-";
  if (!out.empty()) std::filesystem::create_directories(out);

  if (kind == "amplitude-scaling") {
    reject_unknown_keys(cfg,
                        {"schema_version", "kind", "system", "from", "to",
                         "amplitude", "shape", "order", "scales",
                         "steps_per_period", "phase"},
                        "sweep config");
    auto sys = system_from_spec(cfg["system"]);
    int from = require_int(cfg, "from", "sweep config");
    int to = require_int(cfg, "to", "sweep config");
    double amplitude = require_number(cfg, "amplitude", "sweep config");
    auto shape = shape_from_name(require_string(cfg, "shape", "sweep config"));
    int order = require_int(cfg, "order", "sweep config");
    if (!cfg.contains("scales") || !cfg["scales"].is_array()) {
      throw config_error("missing scales array in sweep config");
    }
    std::vector<int> scales;
    for (const auto& s : cfg["scales"]) scales.push_back(s.get<int>());
    synth::DesignOptions opt = design_options_from(cfg, "sweep config");

    csv = "n,horizon,fidelity\n";
    if (!scales.empty()) {
      // The shared plan is cheap (closed-form design); the propagations are
      // the cells.
      int n_max = *std::max_element(scales.begin(), scales.end());
      auto plan = synth::amplitude_scaling_plan(sys, from, to, amplitude, shape,
                                                n_max, opt);
      std::vector<synth::ScalingRow> rows(scales.size());
      run_cells(scales.size(), jobs, [&](std::size_t i) {
        rows[i] = synth::scaling_row(plan, scales[i], order);
        if (!cell_prefix.empty()) {
          json c{{"n", rows[i].n},
                 {"horizon", rows[i].horizon},
                 {"fidelity", rows[i].fidelity}};
          io::write_text_file(cell_prefix + std::to_string(scales[i]) + ".json",
                              c.dump() + "\n");
        }
      });
      char buf[128];
      for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.n, row.horizon,
                      row.fidelity);
        csv += buf;
      }
    }
  } else if (kind == "truncation") {
    reject_unknown_keys(cfg,
                        {"schema_version", "kind", "system", "control",
                         "initial_state", "orders"},
                        "sweep config");
    auto sys = system_from_spec(cfg["system"]);
    auto u = control_from_spec(cfg["control"], sys);
    auto state = state_from_spec(cfg["initial_state"]);
    if (!cfg.contains("orders") || !cfg["orders"].is_array()) {
      throw config_error("missing orders array in sweep config");
    }
    std::vector<int> orders;
    for (const auto& o : cfg["orders"]) orders.push_back(o.get<int>());

    std::vector<double> errors(orders.size());
    run_cells(orders.size(), jobs, [&](std::size_t i) {
      int n = orders[i];
      auto xa = prop::propagate_final(galerkin::compress(sys, n), u, state.embed(n));
      auto xb = prop::propagate_final(galerkin::compress(sys, 2 * n), u,
                                      state.embed(2 * n));
      Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(2 * n);
      padded.head(n) = xa;
      errors[i] = (padded - xb).norm();
      if (!cell_prefix.empty()) {
        json c{{"order", n}, {"error", errors[i]}};
        io::write_text_file(cell_prefix + std::to_string(n) + ".json",
                            c.dump() + "\n");
      }
    });
    csv = "order,error\n";
    char buf[64];
    for (std::size_t i = 0; i < orders.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%.17g\n", orders[i], errors[i]);
      csv += buf;
    }
  } else {
    throw config_error("unknown sweep kind \"" + kind + "\"");
  }

  std::printf("%s", csv.c_str());
  if (!out.empty()) {
    io::write_text_file(out + "/sweep.csv", csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral Galerkin simulation and pulse synthesis toolkit"};
  app.require_subcommand(1);

  std::string system_name, data_file, config_path, control_path, out_dir;
  std::string shape_name = "cosine", formula, empirical;
  int n = 10, from = 0, to = 0, ladder_to = 0, initial_level = 1;
  int steps_per_period = 64, collision_scan = 24, norm_exponent = 1;
  int jobs = 1, cap = 1024, start = 0;
  double amplitude = 0.1, phase = 0.0, K = 0.0, eps = 1e-6, sample_dt = 0.0;
  std::vector<std::string> checks;
  CliOverrides over;
  double guard = 0, tol_ng = 0, tol_l1 = 0, tol_en = 0;

  auto* spectrum = app.add_subcommand("spectrum", "print spectral data");
  spectrum->add_option("system", system_name, "system name");
  spectrum->add_option("--data", data_file, "spectral data file");
  spectrum->add_option("--n", n, "number of levels")->required();

  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  simulate->add_option("--config", config_path, "experiment config JSON")
      ->required();
  simulate->add_option("--out", over.out, "output directory override");
  auto add_tol_flags = [&](CLI::App* cmd) {
    cmd->add_option("--guard-edge-pop", guard, "edge population guard");
    cmd->add_option("--tol-norm-growth", tol_ng, "norm growth tolerance");
    cmd->add_option("--tol-l1", tol_l1, "L1 lower bound tolerance");
    cmd->add_option("--tol-energy", tol_en, "energy variation tolerance");
  };
  add_tol_flags(simulate);

  auto* synthesize = app.add_subcommand("synthesize", "design transfer pulses");
  synthesize->add_option("--system", system_name, "system name");
  synthesize->add_option("--data", data_file, "spectral data file");
  synthesize->add_option("--from", from, "source level");
  synthesize->add_option("--to", to, "target level");
  synthesize->add_option("--ladder-to", ladder_to, "chain transfers up to level");
  synthesize->add_option("--amplitude", amplitude, "pulse amplitude")->required();
  synthesize->add_option("--shape", shape_name, "cosine|square");
  synthesize->add_option("--steps-per-period", steps_per_period,
                         "rendering resolution");
  synthesize->add_option("--phase", phase, "carrier phase");
  synthesize->add_option("--collision-scan", collision_scan,
                         "resonance collision scan depth");
  synthesize->add_option("--out", out_dir, "output directory");

  auto* gorder = app.add_subcommand("galerkin-order", "truncation order selection");
  gorder->add_option("--formula", formula, "closed-form ladder (harmonic)");
  gorder->add_option("--empirical", empirical, "system name for doubling search");
  gorder->add_option("-K,--state-bound", K, "initial state energy bound");
  gorder->add_option("--eps", eps, "target accuracy");
  gorder->add_option("--control", control_path, "control file (empirical mode)");
  gorder->add_option("--initial-state", initial_level, "starting level");
  gorder->add_option("--cap", cap, "largest order to try");
  gorder->add_option("--start", start, "initial order for the doubling search");

  auto* diagnose = app.add_subcommand("diagnose", "run inequality checks");
  diagnose->add_option("--system", system_name, "system name");
  diagnose->add_option("--data", data_file, "spectral data file");
  diagnose->add_option("--n", n, "truncation order")->required();
  diagnose->add_option("--control", control_path, "control file")->required();
  diagnose->add_option("--initial-state", initial_level, "starting level");
  diagnose->add_option("--sample-dt", sample_dt, "intra-segment sampling step");
  diagnose->add_option("--checks", checks, "subset of checks to run");
  diagnose->add_option("--norm-exponent", norm_exponent, "weighted norm index");
  diagnose->add_option("--out", over.out, "output directory");
  add_tol_flags(diagnose);

  auto* sweep = app.add_subcommand("sweep", "concurrent parameter sweeps");
  sweep->add_option("--config", config_path, "sweep config JSON")->required();
  sweep->add_option("--jobs", jobs, "max concurrent cells");
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (simulate->parsed() || diagnose->parsed()) {
    CLI::App* cmd = simulate->parsed() ? simulate : diagnose;
    if (cmd->count("--guard-edge-pop")) over.guard_edge_pop = guard;
    if (cmd->count("--tol-norm-growth")) over.tol_norm_growth = tol_ng;
    if (cmd->count("--tol-l1")) over.tol_l1 = tol_l1;
    if (cmd->count("--tol-energy")) over.tol_energy = tol_en;
  }

  try {
    if (spectrum->parsed()) {
      if (system_name.empty() && data_file.empty()) {
        throw config_error("spectrum requires a system name or --data FILE");
      }
      return cmd_spectrum(system_name, data_file, n);
    }
    if (simulate->parsed()) return cmd_simulate(config_path, over);
    if (synthesize->parsed()) {
      if ((ladder_to > 0) == (from > 0 || to > 0)) {
        throw config_error("synthesize requires --from/--to or --ladder-to");
      }
      return cmd_synthesize(system_name, data_file, from, to, ladder_to,
                            amplitude, shape_name, steps_per_period, phase,
                            collision_scan, out_dir);
    }
    if (gorder->parsed()) {
      return cmd_galerkin_order(formula, empirical, K, eps, control_path,
                                initial_level, cap, start);
    }
    if (diagnose->parsed()) {
      return cmd_diagnose(system_name, data_file, n, control_path, initial_level,
                          sample_dt, checks, norm_exponent, over);
    }
    if (sweep->parsed()) return cmd_sweep(config_path, jobs, out_dir);
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailure;
  }
  return kOk;
}
