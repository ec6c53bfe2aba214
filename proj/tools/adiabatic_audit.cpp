// adiabatic-audit: command-line front end for the adiabatic condition library.
//
// Units: hbar = 1; every frequency is an angular frequency (rad per unit time).
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adiabatic/adiabatic.hpp"

namespace {

using namespace adiabatic;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct ModelFlags {
  std::optional<double> omega0;
  std::optional<double> omega;
  std::optional<double> theta;
  std::string model_file;
};

struct GridFlags {
  std::optional<double> tau;
  std::optional<std::size_t> steps;
};

struct OutputFlags {
  std::string out = "-";
  std::string format = "json";
  bool series = false;
};

struct ThresholdFlags {
  Thresholds thresholds;
};

void add_spin_half_flags(CLI::App* cmd, ModelFlags& m, bool required) {
  auto* a = cmd->add_option("--omega0", m.omega0, "level splitting w0 > 0 (rad/time)");
  auto* b = cmd->add_option("--omega", m.omega, "field rotation rate w > 0 (rad/time)");
  auto* c = cmd->add_option("--theta", m.theta, "field tilt angle in (0, pi) (rad)");
  if (required) {
    a->required();
    b->required();
    c->required();
  }
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--tau", g.tau, "total evolution time (default: max(2pi/w, 4pi/wbar))");
  cmd->add_option("--steps", g.steps, "number of time steps (default: step rule)")
      ->check(CLI::PositiveNumber);
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_option("--out", o.out, "output path, '-' for standard output");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_threshold_flags(CLI::App* cmd, ThresholdFlags& t) {
  cmd->add_option("--condition-threshold", t.thresholds.condition,
                  "condition satisfied when max ratio <= this (default 0.1)");
  cmd->add_option("--fidelity-threshold", t.thresholds.fidelity,
                  "approximation valid needs min fidelity >= this (default 0.99)");
  cmd->add_option("--rate-tolerance", t.thresholds.rate_tolerance,
                  "relative Bloch-rate agreement for two-level systems (default 0.1)");
}

void validate(const Thresholds& t) {
  detail::require(t.condition > 0.0, ErrorCode::DomainError, "condition threshold must be positive");
  detail::require(t.fidelity > 0.0 && t.fidelity <= 1.0, ErrorCode::DomainError,
                  "fidelity threshold must lie in (0, 1]");
  detail::require(t.rate_tolerance >= 0.0, ErrorCode::DomainError,
                  "rate tolerance must be non-negative");
}

SpinHalfParams spin_half(const ModelFlags& m) {
  SpinHalfParams p{*m.omega0, *m.omega, *m.theta};
  p.validate();
  return p;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path);
  detail::require(file.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  write(file);
}

void emit_json(const std::string& path, const Json& doc) {
  emit(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

PhaseConvention parse_convention(const std::string& name) {
  return name == "dynamical" ? PhaseConvention::DynamicalOnly : PhaseConvention::FullAlpha;
}

std::size_t zero_based_level(int level) {
  detail::require(level >= 1, ErrorCode::DomainError, "--level is one-based");
  return static_cast<std::size_t>(level - 1);
}

// -- evolve -----------------------------------------------------------------

int run_evolve(const ModelFlags& m, const GridFlags& g, const OutputFlags& o,
               const ThresholdFlags& t, int level, const std::string& convention,
               const std::string& trajectory_out) {
  const SpinHalfParams p = spin_half(m);
  validate(t.thresholds);
  const TimeGrid grid = spin_half_grid(p, g.tau, g.steps);
  EvolveOptions options;
  options.level = zero_based_level(level);
  options.convention = parse_convention(convention);
  options.thresholds = t.thresholds;
  const Evolution run = evolve(HamiltonianModel(p), grid, options);

  if (!trajectory_out.empty())
    emit(trajectory_out, [&](std::ostream& os) { write_trajectory_csv(os, run.trajectory); });

  if (o.format == "csv") {
    emit(o.out, [&](std::ostream& os) { write_report_csv(os, run.report); });
    return 0;
  }
  Json doc;
  doc["model"] = {{"omega0", json_number(p.omega0)},
                  {"omega", json_number(p.omega)},
                  {"theta", json_number(p.theta)},
                  {"omega_bar", json_number(p.omega_bar())}};
  doc["grid"] = {{"tau", json_number(grid.span())}, {"steps", grid.steps()}};
  doc["report"] = to_json(run.report, o.series);
  const double window = 2.0 * std::numbers::pi / p.omega_bar();
  if (run.report.approximation_valid && window <= grid.span())
    doc["necessity"] = to_json(necessity_residual(run.report, window));
  emit_json(o.out, doc);
  return 0;
}

// -- condition ----------------------------------------------------------------

int run_condition(const ModelFlags& m, const GridFlags& g, const OutputFlags& o) {
  ConditionReport report;
  if (!m.model_file.empty()) {
    const HamiltonianModel model(load_sampled_model(m.model_file));
    const auto& sampled = *model.get_if<SampledGeneric>();
    const double t0 = sampled.times().front();
    double t1 = sampled.times().back();
    if (g.tau) t1 = t0 + *g.tau;
    detail::require(t1 > t0, ErrorCode::DomainError,
                    "a single-sample model needs --tau for its grid");
    const TimeGrid grid(t0, t1, g.steps.value_or(1000));
    report = coupling_ratios(track_frames(model, grid));
  } else {
    detail::require(m.omega0 && m.omega && m.theta, ErrorCode::DomainError,
                    "give --omega0, --omega and --theta, or --model FILE");
    const SpinHalfParams p = spin_half(m);
    const double tau = g.tau.value_or(2.0 * std::numbers::pi / p.omega);
    const TimeGrid grid(0.0, tau, g.steps.value_or(default_step_count(p, tau)));
    report = coupling_ratios(track_frames(HamiltonianModel(p), grid));
  }
  if (o.format == "csv") {
    emit(o.out, [&](std::ostream& os) {
      os << "t";
      for (const auto& pair : report.pairs) os << ",g_" << pair.n + 1 << '_' << pair.m + 1;
      os << '\n';
      std::vector<double> row;
      for (std::size_t k = 0; k < report.grid.nodes(); ++k) {
        row.assign(1, report.grid.time(k));
        for (const auto& pair : report.pairs) row.push_back(pair.ratio[k]);
        write_csv_row(os, row);
      }
    });
    return 0;
  }
  emit_json(o.out, to_json(report, o.series));
  return 0;
}

// -- sweep-f ------------------------------------------------------------------

int run_sweep_f(double theta, double r_min, double r_max, long long points, const OutputFlags& o,
                const std::string& summary_out) {
  detail::require(points >= 2, ErrorCode::DomainError, "--points must be at least 2");
  const FSweep sweep = f_sweep(theta, r_min, r_max, static_cast<std::size_t>(points));
  if (o.format == "csv") {
    emit(o.out, [&](std::ostream& os) { write_sweep_csv(os, sweep); });
    if (!summary_out.empty()) emit_json(summary_out, to_json(sweep));
    return 0;
  }
  emit_json(o.out, to_json(sweep, true));
  if (!summary_out.empty()) emit_json(summary_out, to_json(sweep));
  return 0;
}

// -- counterexample -----------------------------------------------------------

int run_counterexample(const ModelFlags& m, const GridFlags& g, const OutputFlags& o,
                       const ThresholdFlags& t, int level) {
  const SpinHalfParams p = spin_half(m);
  validate(t.thresholds);
  const double tau = g.tau.value_or(2.0 * std::numbers::pi / p.omega);
  const TimeGrid grid(0.0, tau, g.steps.value_or(default_step_count(p, tau)));
  DualPair pair = build_dual(HamiltonianModel(p), grid);
  pair = evaluate_pair(std::move(pair), zero_based_level(level), t.thresholds);
  emit_json(o.out, to_json(*pair.evaluation));
  return 0;
}

// -- bloch --------------------------------------------------------------------

int run_bloch(const ModelFlags& m, const GridFlags& g, const OutputFlags& o, int level) {
  const SpinHalfParams p = spin_half(m);
  const TimeGrid grid = spin_half_grid(p, g.tau, g.steps);
  EvolveOptions options;
  options.level = zero_based_level(level);
  const Evolution run = evolve(HamiltonianModel(p), grid, options);
  const BlochSeries exact = bloch_series(grid, run.trajectory.states);
  const BlochSeries reference = bloch_series(grid, run.reference.states);
  if (o.format == "csv") {
    emit(o.out, [&](std::ostream& os) { write_bloch_csv(os, grid, exact, reference); });
    return 0;
  }
  const RateComparison rates{exact.rate, reference.rate, false};
  Json doc;
  doc["exact_rate"] = json_number(exact.rate);
  doc["reference_rate"] = json_number(reference.rate);
  doc["rate_ratio"] = json_number(rates.ratio());
  doc["field_rate"] = json_number(p.omega);
  doc["min_fidelity"] = json_number(run.report.min_fidelity);
  emit_json(o.out, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Audit the quantitative adiabatic condition on finite-dimensional quantum systems.\n"
      "Units: hbar = 1, all frequencies are angular (rad per unit time)."};
  app.require_subcommand(1);

  ModelFlags model;
  GridFlags grid;
  OutputFlags output;
  ThresholdFlags thresholds;
  int level = 1;
  std::string convention = "full";
  std::string trajectory_out;
  double theta = 0.0, r_min = 0.0, r_max = 0.0;
  long long points = 0;
  std::string summary_out;

  auto* evolve_cmd = app.add_subcommand("evolve", "integrate a spin-half run and report validity");
  add_spin_half_flags(evolve_cmd, model, true);
  add_grid_flags(evolve_cmd, grid);
  add_output_flags(evolve_cmd, output);
  add_threshold_flags(evolve_cmd, thresholds);
  evolve_cmd->add_option("--level", level, "initial eigenstate, one-based (default 1)");
  evolve_cmd->add_option("--phase-convention", convention, "full or dynamical")
      ->check(CLI::IsMember({"full", "dynamical"}));
  evolve_cmd->add_option("--trajectory-out", trajectory_out, "also write the trajectory CSV");
  evolve_cmd->add_flag("--series", output.series, "include time series in the JSON report");

  auto* condition_cmd =
      app.add_subcommand("condition", "coupling ratios only, without integrating the dynamics");
  add_spin_half_flags(condition_cmd, model, false);
  condition_cmd->add_option("--model", model.model_file, "sampled model JSON file");
  add_grid_flags(condition_cmd, grid);
  add_output_flags(condition_cmd, output);
  condition_cmd->add_flag("--series", output.series, "include per-pair ratio series");

  auto* sweep_cmd = app.add_subcommand("sweep-f", "tabulate f(w0/w) and check its shape");
  sweep_cmd->add_option("--theta", theta, "field tilt angle in (0, pi)")->required();
  sweep_cmd->add_option("--r-min", r_min, "smallest w0/w")->required();
  sweep_cmd->add_option("--r-max", r_max, "largest w0/w")->required();
  sweep_cmd->add_option("--points", points, "number of samples (>= 2)")->required();
  add_output_flags(sweep_cmd, output);
  sweep_cmd->add_option("--summary-out", summary_out, "also write the JSON summary here");

  auto* pair_cmd =
      app.add_subcommand("counterexample", "build the dual system and compare both runs");
  add_spin_half_flags(pair_cmd, model, true);
  add_grid_flags(pair_cmd, grid);
  pair_cmd->add_option("--out", output.out, "output path, '-' for standard output");
  add_threshold_flags(pair_cmd, thresholds);
  pair_cmd->add_option("--level", level, "initial eigenstate of system a, one-based (default 1)");

  auto* bloch_cmd = app.add_subcommand("bloch", "Bloch vectors of the exact and reference states");
  add_spin_half_flags(bloch_cmd, model, true);
  add_grid_flags(bloch_cmd, grid);
  add_output_flags(bloch_cmd, output);
  bloch_cmd->add_option("--level", level, "initial eigenstate, one-based (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << " (usage: " << argv[0]
              << " <evolve|condition|sweep-f|counterexample|bloch> [flags], see --help)\n";
    return kExitInvalid;
  }

  try {
    if (*evolve_cmd)
      return run_evolve(model, grid, output, thresholds, level, convention, trajectory_out);
    if (*condition_cmd) return run_condition(model, grid, output);
    if (*sweep_cmd) return run_sweep_f(theta, r_min, r_max, points, output, summary_out);
    if (*pair_cmd) return run_counterexample(model, grid, output, thresholds, level);
    if (*bloch_cmd) return run_bloch(model, grid, output, level);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? kExitNumerical : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}
