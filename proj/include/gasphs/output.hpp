#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gasphs/analysis.hpp"
#include "gasphs/sim.hpp"
#include "gasphs/trajectory.hpp"

namespace gasphs {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Columns: t [s], p_<node> [bar] for every node, qnm_<edge> [m^3/s] for every edge,
/// qn_supply_<node> [m^3/s] for every supply node.
void write_trajectory_csv(std::ostream& out, const NetworkPhs& phs, const Trajectory& trajectory);

std::string energy_report_json(const EnergyReport& report, const Trajectory& trajectory);
std::string steady_state_json(const NetworkPhs& phs, const SteadyState& state);
std::string stability_json(const std::vector<StabilityReport>& reports,
                           const std::vector<PointwiseStability>& pointwise = {});

/// Conditions only, for networks whose initial equilibrium could not be computed.
std::string stability_conditions_json(const NetworkPhs& phs, const std::string& equilibrium_error);
/// One row per elevation case.
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkCase>& cases);
std::string benchmark_json(const std::vector<BenchmarkCase>& cases);

}  // namespace gasphs
