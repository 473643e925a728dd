#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gasphs/analysis.hpp"
#include "gasphs/friction.hpp"
#include "gasphs/gas.hpp"
#include "gasphs/network.hpp"
#include "gasphs/ode.hpp"
#include "gasphs/trajectory.hpp"

namespace gasphs {

/// Piecewise-linear function of time, held constant outside its knots.
class LoadProfile {
public:
  LoadProfile() = default;
  /// Knot times must be strictly increasing.
  LoadProfile(std::vector<double> times, std::vector<double> values);
  static LoadProfile constant(double value);

  double operator()(double t) const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  bool empty() const { return times_.empty(); }

private:
  std::vector<double> times_;
  std::vector<double> values_;
};

struct NodeSpec {
  std::string id;
  double elevation = 0.0;  ///< [m]
  NodeKind kind = NodeKind::kDemand;
  double fixed_pressure = 0.0;  ///< [Pa], supply only
  std::optional<double> initial_pressure;
  /// Standard volumetric withdrawal [m^3/s]; the injection into the node is its negative.
  LoadProfile load;
};

struct PipeSpec {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;      ///< [m]
  double diameter = 0.0;    ///< [m]
  double roughness = 0.0;   ///< [m]
  double efficiency = 1.0;  ///< [-]
  std::optional<double> inclination_sin;  ///< optional cross-check against the elevations
  int segments = 1;
};

struct SimSettings {
  double t_start = 0.0;
  double t_end = 0.0;       ///< [s]
  double sample_dt = 0.0;   ///< [s]
  OdeOptions solver{};
  ModelVariant variant = ModelVariant::kPhs;
  std::optional<double> z_reference_pressure;  ///< [Pa]; default: largest supply pressure
  FrictionModel friction{};
  CompressibilityModel compressibility = CompressibilityModel::kPapay;

  std::vector<double> sample_times() const;
};

struct Scenario {
  std::string name;
  GasProperties gas;
  std::vector<NodeSpec> nodes;
  std::vector<PipeSpec> pipes;
  SimSettings sim;
  /// Names of settings that were filled with defaults rather than read.
  std::vector<std::string> defaults_used;

  /// Builds and validates the graph.
  NetworkTopology topology() const;
  /// Checks gas, solver settings, load coverage and the topology.
  void validate() const;
};

/// Injections (negated loads) at the demand nodes of `phs` at time t. Nodes without a
/// profile, such as pipe-chaining nodes, draw nothing.
Eigen::VectorXd demand_injections(const NetworkPhs& phs, const Scenario& scenario, double t);

struct SteadyStateOptions {
  double tolerance = 1e-10;  ///< infinity norm of the scaled residual
  int max_iterations = 100;
};

struct SteadyState {
  Eigen::VectorXd costate;
  double residual = 0.0;
  int iterations = 0;
};

/// Equilibrium of the network for constant injections. The residual is scaled to bar for
/// momentum rows and m^3/s for node rows. Networks without a supply node keep the linepack
/// of `initial_guess` (which is then required).
SteadyState steady_state(const NetworkPhs& phs, const Eigen::VectorXd& injections,
                         ModelVariant variant = ModelVariant::kPhs, const SteadyStateOptions& options = {},
                         std::optional<Eigen::VectorXd> initial_guess = std::nullopt);

/// A scenario turned into a model ready for integration.
struct PreparedRun {
  NetworkPhs phs;
  Eigen::VectorXd initial;        ///< co-state at t_start
  double z_reference_pressure = 0.0;
  bool z_reference_defaulted = false;
  int steady_iterations = 0;
};

/// Network with the gas closure frozen at the Z reference pressure and supply nodes applied;
/// the gravity mean pressures are still the reference pressure.
struct FrozenModel {
  NetworkPhs phs;
  double z_reference_pressure = 0.0;
  bool z_reference_defaulted = false;
};

FrozenModel frozen_model(const Scenario& scenario);

/// Freezes the gas state, assembles the network, applies supply nodes and computes the
/// initial equilibrium with live mean pressures. The frozen gravity pressures are taken
/// from that equilibrium, so it is an equilibrium of both model variants.
PreparedRun prepare(const Scenario& scenario);

/// Integrates the network from `initial` over the scenario time span.
Trajectory integrate(const NetworkPhs& phs, const Scenario& scenario, const Eigen::VectorXd& initial,
                     std::optional<ModelVariant> variant = std::nullopt);

struct SimulationResult {
  PreparedRun prepared;
  Trajectory trajectory;
  EnergyReport energy;
};

SimulationResult simulate(const Scenario& scenario);

/// Largest |linepack change - integrated net injection| over the run, relative to the
/// gross volume moved through the network ports.
double mass_balance_error(const NetworkPhs& phs, const Trajectory& trajectory);

// Three-node benchmark.

struct BenchmarkOptions {
  double pipe_length = 80'000.0;  ///< [m], artifact default
  double t_end = 12.0 * 3600.0;
  double sample_dt = 60.0;
  OdeOptions solver{};
};

/// Supply node "1" at 50 bar and elevation h1, demand nodes "2" and "3" at zero elevation,
/// pipes 12, 13 and 23, reference gas and pipe data, synthetic loads.
Scenario three_node_scenario(double h1, const BenchmarkOptions& options = {});

struct BenchmarkCase {
  double h1 = 0.0;
  Trajectory phs;
  Trajectory live_pm;
  /// max over samples and nodes of |p_phs - p_live| / nominal (50 bar)
  double max_pressure_deviation = 0.0;
  /// max over samples and pipes of |q_phs - q_live| / max |q_live| of that pipe
  double max_flow_deviation = 0.0;
  double max_abs_frozen_gap = 0.0;  ///< max |pM_live - pM_frozen| [Pa]
  EnergyReport energy;
  double mass_balance_error = 0.0;
  std::vector<StabilityReport> stability;
  std::vector<PointwiseStability> pointwise;
  std::vector<double> frozen_mean_pressures;
  bool ok = true;
  std::string message;
};

BenchmarkCase run_benchmark_case(double h1, const BenchmarkOptions& options = {});

/// Runs the cases concurrently, results in input order.
std::vector<BenchmarkCase> run_benchmark(const std::vector<double>& heights = {-1000.0, -500.0, 0.0, 500.0, 1000.0},
                                         const BenchmarkOptions& options = {});

/// Deviation of the two variants of the same scenario (see BenchmarkCase).
struct VariantDeviation {
  double pressure = 0.0;
  double flow = 0.0;
};
VariantDeviation variant_deviation(const Trajectory& phs, const Trajectory& live_pm, double nominal_pressure);

}  // namespace gasphs
