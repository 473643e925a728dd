#include <algorithm>
#include <cmath>
#include <future>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"
#include "gasphs/sim.hpp"

namespace gasphs {

namespace {

constexpr double kSupplyPressure = 50.0 * units::kPaPerBar;

// Withdrawal knots on a 12 h day, (hour, m^3/s). Synthetic, not taken from measurements.
const std::vector<std::pair<double, double>> kLoad2 = {{0.0, 40.0}, {2.0, 40.0}, {2.5, 90.0},
                                                       {6.0, 90.0}, {6.5, 50.0}, {12.0, 50.0}};
const std::vector<std::pair<double, double>> kLoad3 = {{0.0, 30.0}, {4.0, 30.0}, {4.5, 80.0},
                                                       {8.0, 80.0}, {8.5, 40.0}, {12.0, 40.0}};

LoadProfile scaled_profile(const std::vector<std::pair<double, double>>& knots, double t_end) {
  std::vector<double> t, v;
  for (const auto& [hour, value] : knots) {
    t.push_back(hour / 12.0 * t_end);
    v.push_back(value);
  }
  return {std::move(t), std::move(v)};
}

}  // namespace

Scenario three_node_scenario(double h1, const BenchmarkOptions& options) {
  Scenario s;
  s.name = "three_node";
  s.gas = GasProperties::natural_gas();

  NodeSpec n1;
  n1.id = "1";
  n1.elevation = h1;
  n1.kind = NodeKind::kSupply;
  n1.fixed_pressure = kSupplyPressure;
  NodeSpec n2;
  n2.id = "2";
  n2.load = scaled_profile(kLoad2, options.t_end);
  NodeSpec n3;
  n3.id = "3";
  n3.load = scaled_profile(kLoad3, options.t_end);
  s.nodes = {n1, n2, n3};

  auto pipe = [&](std::string id, std::string from, std::string to) {
    PipeSpec p;
    p.id = std::move(id);
    p.from = std::move(from);
    p.to = std::move(to);
    p.length = options.pipe_length;
    p.diameter = 0.6;
    p.roughness = 0.012 * units::kMetersPerMm;
    p.efficiency = 0.98;
    return p;
  };
  s.pipes = {pipe("12", "1", "2"), pipe("13", "1", "3"), pipe("23", "2", "3")};

  s.sim.t_end = options.t_end;
  s.sim.sample_dt = options.sample_dt;
  s.sim.solver = options.solver;
  s.defaults_used = {"pipe_length", "load_profile"};
  return s;
}

BenchmarkCase run_benchmark_case(double h1, const BenchmarkOptions& options) {
  BenchmarkCase out;
  out.h1 = h1;
  try {
    const Scenario scenario = three_node_scenario(h1, options);
    const PreparedRun run = prepare(scenario);
    out.frozen_mean_pressures = run.phs.frozen_mean_pressures();
    out.phs = integrate(run.phs, scenario, run.initial, ModelVariant::kPhs);
    out.live_pm = integrate(run.phs, scenario, run.initial, ModelVariant::kLivePm);
    if (!out.phs.ok() || !out.live_pm.ok()) {
      out.ok = false;
      out.message = !out.phs.ok() ? out.phs.failure->message : out.live_pm.failure->message;
      return out;
    }
    const VariantDeviation dev = variant_deviation(out.phs, out.live_pm, kSupplyPressure);
    out.max_pressure_deviation = dev.pressure;
    out.max_flow_deviation = dev.flow;
    for (const auto& p : out.live_pm.node_pressures) {
      for (std::size_t j = 0; j < run.phs.edge_count(); ++j) {
        const auto& e = run.phs.topology().edges()[j];
        const double pm = mean_pressure(p(static_cast<Eigen::Index>(e.from)), p(static_cast<Eigen::Index>(e.to)));
        out.max_abs_frozen_gap = std::max(out.max_abs_frozen_gap, std::abs(pm - run.phs.frozen_mean_pressure(j)));
      }
    }
    out.energy = energy_balance(out.phs, run.phs);
    out.mass_balance_error = mass_balance_error(run.phs, out.phs);
    out.stability = stability_reports(run.phs, run.initial);
    out.pointwise = pointwise_stability(run.phs, out.live_pm);
  } catch (const Error& err) {
    out.ok = false;
    out.message = err.what();
  }
  return out;
}

std::vector<BenchmarkCase> run_benchmark(const std::vector<double>& heights, const BenchmarkOptions& options) {
  std::vector<std::future<BenchmarkCase>> jobs;
  jobs.reserve(heights.size());
  for (const double h : heights) {
    jobs.push_back(std::async(std::launch::async, [h, &options] { return run_benchmark_case(h, options); }));
  }
  std::vector<BenchmarkCase> out;
  out.reserve(heights.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

}  // namespace gasphs
