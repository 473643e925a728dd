#include "gasphs/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"
#include "gasphs/output.hpp"
#include "gasphs/scenario_io.hpp"
#include "gasphs/sim.hpp"

namespace gasphs {

namespace {

struct RunOptions {
  std::string scenario;
  std::string out_dir = ".";
  std::string model;
  std::string method;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> sample_dt;
  std::optional<std::uint64_t> seed;
  bool pointwise = false;
};

struct BenchOptions {
  std::string out_dir = ".";
  std::string method;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> sample_dt;
  std::optional<double> length_km;
  std::optional<double> t_end_h;
};

void add_common(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--scenario", o.scenario, "scenario file (JSON)");
  cmd.add_option("--out", o.out_dir, "output directory");
  cmd.add_option("--model", o.model, "model variant")->check(CLI::IsMember({"phs", "live_pm"}));
  cmd.add_option("--method", o.method, "integrator")->check(CLI::IsMember({"rk45", "trapezoidal"}));
  cmd.add_option("--rtol", o.rtol, "relative tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--atol", o.atol, "absolute tolerance")->check(CLI::PositiveNumber);
  cmd.add_option("--sample-dt", o.sample_dt, "output sample spacing [s]")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "generate a random test scenario when no --scenario is given");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << content;
  if (content.empty() || content.back() != '\n') f << '\n';
}

struct Loaded {
  Scenario scenario;
  ManifestInfo info;
};

Loaded load(const RunOptions& o, const std::string& command) {
  Loaded l;
  l.info.command = command;
  if (!o.scenario.empty()) {
    std::ifstream in(o.scenario, std::ios::binary);
    if (!in) throw InvalidInput("cannot open scenario file '" + o.scenario + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    l.scenario = parse_scenario_text(text, o.scenario);
    l.info.input_file = o.scenario;
    l.info.input_digest = sha256_hex(text);
  } else if (o.seed) {
    l.scenario = random_scenario(*o.seed);
    l.info.input_file = "random:" + std::to_string(*o.seed);
    l.info.input_digest = sha256_hex(scenario_to_json(l.scenario));
  } else {
    throw InvalidInput("give --scenario <file> or --seed <n>");
  }
  Scenario& s = l.scenario;
  if (!o.model.empty()) s.sim.variant = o.model == "phs" ? ModelVariant::kPhs : ModelVariant::kLivePm;
  if (!o.method.empty()) {
    s.sim.solver.method = o.method == "rk45" ? OdeMethod::kDormandPrince45 : OdeMethod::kImplicitTrapezoidal;
  }
  if (o.rtol) s.sim.solver.rtol = *o.rtol;
  if (o.atol) s.sim.solver.atol = *o.atol;
  if (o.sample_dt) s.sim.sample_dt = *o.sample_dt;
  s.validate();
  std::filesystem::create_directories(o.out_dir);
  return l;
}

int cmd_simulate(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const Loaded l = load(o, "simulate");
  const std::filesystem::path dir = o.out_dir;
  const PreparedRun run = prepare(l.scenario);
  const Trajectory traj = integrate(run.phs, l.scenario, run.initial);
  const EnergyReport energy = energy_balance(traj, run.phs);
  {
    std::ofstream csv(dir / "trajectory.csv", std::ios::binary);
    if (!csv) throw InvalidInput("cannot write trajectory.csv");
    write_trajectory_csv(csv, run.phs, traj);
  }
  write_file(dir / "energy.json", energy_report_json(energy, traj));
  write_file(dir / "manifest.json", run_manifest_json(l.scenario, run, l.info, &traj.stats));
  if (!traj.ok()) {
    err << "simulation failed at t = " << traj.failure->time << " s: " << traj.failure->message << '\n';
    return 1;
  }
  out << "simulated " << traj.size() << " samples, " << traj.stats.accepted_steps << " steps, energy residual "
      << energy.normalized_residual << '\n';
  if (traj.velocity_violations > 0) {
    err << "warning: " << traj.velocity_violations << " samples exceed " << kSlowFlowVelocityLimit << " m/s\n";
  }
  return 0;
}

int cmd_steady(const RunOptions& o, std::ostream& out) {
  const Loaded l = load(o, "steady");
  const PreparedRun run = prepare(l.scenario);
  const Eigen::VectorXd inj = demand_injections(run.phs, l.scenario, l.scenario.sim.t_start);
  const SteadyState ss = steady_state(run.phs, inj, l.scenario.sim.variant, {}, run.initial);
  write_file(std::filesystem::path(o.out_dir) / "steady.json", steady_state_json(run.phs, ss));
  write_file(std::filesystem::path(o.out_dir) / "manifest.json", run_manifest_json(l.scenario, run, l.info));
  out << "steady state residual " << ss.residual << '\n';
  return 0;
}

int cmd_stability(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const Loaded l = load(o, "check-stability");
  const std::filesystem::path file = std::filesystem::path(o.out_dir) / "stability.json";
  std::optional<PreparedRun> run;
  std::string equilibrium_error;
  try {
    run = prepare(l.scenario);
  } catch (const ConvergenceError& e) {
    equilibrium_error = e.what();
  } catch (const ModelValidityError& e) {
    equilibrium_error = e.what();
  }

  bool all_ok = true;
  auto print = [&](const std::string& id, const StabilityCondition& c) {
    all_ok = all_ok && c.ok;
    out << id << ": " << (c.ok ? "ok" : "NOT ok") << ", margin " << c.margin << " m\n";
  };
  if (!run) {
    // conditions depend on the pipe data only
    const FrozenModel model = frozen_model(l.scenario);
    err << "warning: no initial equilibrium (" << equilibrium_error << "), eigenvalues skipped\n";
    write_file(file, stability_conditions_json(model.phs, equilibrium_error));
    for (std::size_t j = 0; j < model.phs.edge_count(); ++j) {
      print(model.phs.topology().edges()[j].id, check_stability_condition(model.phs.edge_params(j)));
    }
    return 1;
  }

  const auto reports = stability_reports(run->phs, run->initial);
  std::vector<PointwiseStability> pointwise;
  if (o.pointwise) {
    const Trajectory traj = integrate(run->phs, l.scenario, run->initial, ModelVariant::kLivePm);
    if (!traj.ok()) throw ModelValidityError(traj.failure->message, traj.failure->where);
    pointwise = pointwise_stability(run->phs, traj);
  }
  write_file(file, stability_json(reports, pointwise));
  for (const auto& r : reports) print(r.pipe_id, r.condition);
  return all_ok ? 0 : 1;
}

int cmd_benchmark(const BenchOptions& o, std::ostream& out) {
  BenchmarkOptions b;
  if (o.length_km) b.pipe_length = *o.length_km * units::kMetersPerKm;
  if (o.t_end_h) b.t_end = *o.t_end_h * units::kSecondsPerHour;
  if (o.sample_dt) b.sample_dt = *o.sample_dt;
  if (o.rtol) b.solver.rtol = *o.rtol;
  if (o.atol) b.solver.atol = *o.atol;
  if (!o.method.empty()) {
    b.solver.method = o.method == "rk45" ? OdeMethod::kDormandPrince45 : OdeMethod::kImplicitTrapezoidal;
  }
  std::filesystem::create_directories(o.out_dir);
  const auto cases = run_benchmark({-1000.0, -500.0, 0.0, 500.0, 1000.0}, b);
  {
    std::ofstream csv(std::filesystem::path(o.out_dir) / "benchmark.csv", std::ios::binary);
    if (!csv) throw InvalidInput("cannot write benchmark.csv");
    write_benchmark_csv(csv, cases);
  }
  write_file(std::filesystem::path(o.out_dir) / "benchmark.json", benchmark_json(cases));
  bool all_ok = true;
  out << "   h1 [m]   max dp [%]   max dq [%]\n";
  for (const auto& c : cases) {
    all_ok = all_ok && c.ok;
    out << std::setw(9) << c.h1 << std::setw(13) << std::setprecision(4) << 100.0 * c.max_pressure_deviation
        << std::setw(13) << 100.0 * c.max_flow_deviation << (c.ok ? "" : "  FAILED: " + c.message) << '\n';
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Port-Hamiltonian gas network simulator", "gasphs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions sim_opts, steady_opts, stab_opts;
  BenchOptions bench_opts;
  auto* sim = app.add_subcommand("simulate", "integrate a scenario; writes trajectory.csv, energy.json, manifest.json");
  add_common(*sim, sim_opts);
  auto* steady = app.add_subcommand("steady", "equilibrium for the initial loads; writes steady.json");
  add_common(*steady, steady_opts);
  auto* stab = app.add_subcommand("check-stability", "per-pipe stability report; writes stability.json");
  add_common(*stab, stab_opts);
  stab->add_flag("--pointwise", stab_opts.pointwise, "also evaluate eigenvalues along a simulated trajectory");
  auto* bench = app.add_subcommand("benchmark", "three-node elevation study; writes benchmark.csv/json");
  bench->add_option("--out", bench_opts.out_dir, "output directory");
  bench->add_option("--method", bench_opts.method, "integrator")->check(CLI::IsMember({"rk45", "trapezoidal"}));
  bench->add_option("--rtol", bench_opts.rtol, "relative tolerance")->check(CLI::PositiveNumber);
  bench->add_option("--atol", bench_opts.atol, "absolute tolerance")->check(CLI::PositiveNumber);
  bench->add_option("--sample-dt", bench_opts.sample_dt, "output sample spacing [s]")->check(CLI::PositiveNumber);
  bench->add_option("--length-km", bench_opts.length_km, "length of every pipe [km]")->check(CLI::PositiveNumber);
  bench->add_option("--t-end-h", bench_opts.t_end_h, "simulated time [h]")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts, out, err);
    if (steady->parsed()) return cmd_steady(steady_opts, out);
    if (stab->parsed()) return cmd_stability(stab_opts, out, err);
    return cmd_benchmark(bench_opts, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gasphs
