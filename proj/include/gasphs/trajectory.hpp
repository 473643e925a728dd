#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gasphs/network.hpp"
#include "gasphs/ode.hpp"

namespace gasphs {

struct TrajectoryFailure {
  double time = 0.0;
  std::string where;  ///< node or pipe id, empty if unknown
  std::string message;
};

/// Sampled simulation output. Per-sample vectors are indexed like the owning NetworkPhs:
/// node pressures over all nodes, edge flows over all edges, supply flows over supply nodes.
struct Trajectory {
  ModelVariant variant = ModelVariant::kPhs;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> costates;
  std::vector<Eigen::VectorXd> node_pressures;  ///< [Pa]
  std::vector<Eigen::VectorXd> edge_flows;      ///< [m^3/s], positive from -> to
  std::vector<Eigen::VectorXd> supply_flows;    ///< recovered supply injections [m^3/s]
  std::vector<Eigen::VectorXd> injections;      ///< demand-node injections [m^3/s]

  // Running integrals from the initial time, integrated alongside the state.
  std::vector<double> injected_volume;               ///< int sum(demand injections) dt [m^3]
  std::vector<Eigen::VectorXd> supplied_volume;      ///< int supply flows dt [m^3]
  std::vector<double> dissipated_energy;             ///< int dH/dx^T R dH/dx dt
  std::vector<double> port_energy;                   ///< int y^T u dt
  std::vector<double> disturbance_energy;            ///< int z^T d dt

  /// Largest |v| = |rho_n qn / (rho A)| seen per edge, and samples exceeding 15 m/s.
  std::vector<double> max_velocity;
  std::size_t velocity_violations = 0;

  OdeStats stats;
  std::optional<TrajectoryFailure> failure;

  std::size_t size() const { return times.size(); }
  bool ok() const { return !failure.has_value(); }
};

}  // namespace gasphs
