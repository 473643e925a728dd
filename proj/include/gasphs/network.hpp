#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gasphs/friction.hpp"
#include "gasphs/gas.hpp"
#include "gasphs/pipeline.hpp"

namespace gasphs {

enum class NodeKind { kDemand, kSupply };

struct NetworkNode {
  std::string id;
  double elevation = 0.0;  ///< [m]
  NodeKind kind = NodeKind::kDemand;
  double fixed_pressure = 0.0;            ///< [Pa], supply nodes only
  std::optional<double> initial_pressure;  ///< [Pa], optional start value for demand nodes
};

/// A pipe between two nodes. Its inclination is derived from the node elevations,
/// L sin(theta) = h(to) - h(from); positive flow runs from `from` to `to`.
struct NetworkEdge {
  std::string id;
  std::size_t from = 0;
  std::size_t to = 0;
  PipeGeometry geometry;
};

/// Graph of the gas network. Node and edge ids are unique; every pipe connects two
/// distinct existing nodes.
class NetworkTopology {
public:
  std::size_t add_node(NetworkNode node);

  /// Adds a pipe. `geometry.inclination_sin` is ignored and recomputed from the node
  /// elevations; `declared_inclination_sin`, when given, must agree with them.
  /// With segments > 1 the pipe is expanded into a chain of equal edges joined by
  /// zero-load demand nodes ("<id>@k"); edge ids become "<id>#k".
  void add_pipe(const std::string& id, const std::string& from, const std::string& to, PipeGeometry geometry,
                std::optional<double> declared_inclination_sin = std::nullopt, int segments = 1);

  void set_elevation(const std::string& node_id, double elevation);

  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const std::vector<NetworkEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t node_index(const std::string& id) const;
  std::optional<std::size_t> find_node(const std::string& id) const;
  std::size_t edge_index(const std::string& id) const;

  /// Connectedness, no isolated nodes, elevation/inclination consistency and either a
  /// supply node or initial pressures on every node.
  void validate() const;

  /// Edges incident to node i.
  std::vector<std::size_t> incident_edges(std::size_t node) const;

private:
  void refresh_inclination(NetworkEdge& edge) const;

  std::vector<NetworkNode> nodes_;
  std::vector<NetworkEdge> edges_;
  std::unordered_map<std::string, std::size_t> node_lookup_;
  std::unordered_map<std::string, std::size_t> edge_lookup_;
};

/// Node-by-edge incidence matrix, +1 where the node is the sink (`to`) of the edge and
/// -1 where it is the source (`from`).
struct IncidenceMatrix {
  Eigen::SparseMatrix<double> matrix;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

IncidenceMatrix incidence_matrix(const NetworkTopology& topology);

/// Equivalent capacitance of node i, sum over incident pipes of L A / (2 rho_n c^2).
double node_capacitance(const NetworkTopology& topology, const FrozenGasState& gs, std::size_t node);

enum class ModelVariant {
  kPhs,     ///< gravity term with the frozen mean pressure (port-Hamiltonian form)
  kLivePm,  ///< gravity term with the instantaneous mean pressure
};

/// Structure matrices of the network model on the retained states:
///   xdot = (J - R(x)) dH/dx + G u + G_p p_supply + E d,  y = G^T dH/dx,  z = E^T dH/dx.
struct NetworkStructure {
  Eigen::MatrixXd interconnection;  ///< J
  Eigen::VectorXd storage;          ///< diagonal of Q
  Eigen::MatrixXd input;            ///< G, demand injections
  Eigen::MatrixXd supply_input;     ///< G_p, fixed supply pressures acting on the edges
  Eigen::MatrixXd disturbance;      ///< E
};

struct NetworkPower {
  double dissipation = 0.0;  ///< dH/dx^T R dH/dx >= 0
  double port = 0.0;         ///< y^T u including supply pressure ports
  double disturbance = 0.0;  ///< z^T d
};

/// Port-Hamiltonian model of the whole network. The retained co-state is
/// (p_i for demand nodes in node order, qnm_j for every edge); supply nodes hold a fixed
/// pressure and contribute their recovered injection as an output.
class NetworkPhs {
public:
  NetworkPhs(NetworkTopology topology, GasProperties gas, FrozenGasState gas_state, FrictionModel friction,
             std::vector<double> frozen_mean_pressures);

  const NetworkTopology& topology() const { return topology_; }
  const GasProperties& gas() const { return gas_; }
  const FrozenGasState& gas_state() const { return gas_state_; }
  const FrictionModel& friction() const { return friction_; }
  const IncidenceMatrix& incidence() const { return incidence_; }

  std::size_t node_count() const { return topology_.node_count(); }
  std::size_t edge_count() const { return topology_.edge_count(); }
  std::size_t demand_count() const { return demand_nodes_.size(); }
  std::size_t state_dimension() const { return demand_nodes_.size() + edge_count(); }
  /// Offset of the first edge flow in the co-state.
  std::size_t edge_offset() const { return demand_nodes_.size(); }

  const std::vector<std::size_t>& demand_nodes() const { return demand_nodes_; }
  const std::vector<std::size_t>& supply_nodes() const { return supply_nodes_; }
  bool is_supply(std::size_t node) const { return state_index_[node] < 0; }
  double supply_pressure(std::size_t node) const { return supply_pressure_[node]; }
  /// Position of node i's pressure in the co-state; empty for supply nodes.
  std::optional<std::size_t> state_index(std::size_t node) const;

  double capacitance(std::size_t node) const { return capacitance_[node]; }
  double inertia(std::size_t edge) const;  ///< rho_n L / A
  const PipeParams& edge_params(std::size_t edge) const { return edge_params_[edge]; }
  double frozen_mean_pressure(std::size_t edge) const { return frozen_mean_pressure_[edge]; }
  const std::vector<double>& frozen_mean_pressures() const { return frozen_mean_pressure_; }
  double disturbance(std::size_t edge) const { return disturbance_[edge]; }

  NetworkStructure structure() const;
  /// Diagonal of R(x); zero on node rows.
  Eigen::VectorXd dissipation_diagonal(const Eigen::VectorXd& costate) const;

  /// Pressures at all nodes: from the co-state for demand nodes, fixed for supply nodes.
  /// Throws ModelValidityError naming the first non-positive node.
  Eigen::VectorXd node_pressures(const Eigen::VectorXd& costate) const;
  Eigen::VectorXd edge_flows(const Eigen::VectorXd& costate) const;
  /// Injections at supply nodes implied by the edge flows, in supply_nodes() order.
  Eigen::VectorXd supply_flows(const Eigen::VectorXd& costate) const;

  /// Time derivative of the co-state for the given demand injections (demand node order).
  Eigen::VectorXd costate_rate(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                               ModelVariant variant = ModelVariant::kPhs) const;
  /// xdot = Q^{-1} d(costate)/dt.
  Eigen::VectorXd state_rate(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                             ModelVariant variant = ModelVariant::kPhs) const;

  Eigen::VectorXd state_from_costate(const Eigen::VectorXd& costate) const;
  Eigen::VectorXd costate_from_state(const Eigen::VectorXd& state) const;

  /// H = x^T Q x / 2 over the retained states.
  double hamiltonian(const Eigen::VectorXd& costate) const;
  /// Stored standard volume sum_i C_i p_i over the retained nodes [m^3].
  double linepack(const Eigen::VectorXd& costate) const;
  NetworkPower power(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                     ModelVariant variant = ModelVariant::kPhs) const;

  /// Copy with node i held at a fixed pressure.
  NetworkPhs with_supply(std::size_t node, double pressure) const;
  NetworkPhs with_frozen_mean_pressures(std::vector<double> frozen_mean_pressures) const;

private:
  void rebuild_indices();

  NetworkTopology topology_;
  GasProperties gas_;
  FrozenGasState gas_state_;
  FrictionModel friction_;
  IncidenceMatrix incidence_;
  std::vector<PipeParams> edge_params_;
  std::vector<double> capacitance_;
  std::vector<double> frozen_mean_pressure_;
  std::vector<double> disturbance_;
  std::vector<double> supply_pressure_;
  std::vector<long> state_index_;  // -1 for supply nodes
  std::vector<std::size_t> demand_nodes_;
  std::vector<std::size_t> supply_nodes_;
};

/// Full |V| + |E| network model; node kinds of the topology are not applied.
NetworkPhs assemble_network_phs(const NetworkTopology& topology, const GasProperties& gas,
                                const FrozenGasState& gas_state, const std::vector<double>& frozen_mean_pressures,
                                const FrictionModel& friction = {});

/// Removes node i's pressure state and turns its pressure into an input.
NetworkPhs apply_supply_node(const NetworkPhs& phs, std::size_t node, double fixed_pressure);

/// Applies every supply node declared in the topology.
NetworkPhs apply_topology_supplies(const NetworkPhs& phs);

}  // namespace gasphs
