#include "gasphs/network.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gasphs/error.hpp"

namespace gasphs {

std::size_t NetworkTopology::add_node(NetworkNode node) {
  if (node.id.empty()) throw InvalidInput("node id must not be empty");
  if (node_lookup_.count(node.id) != 0) throw InvalidInput("duplicate node id '" + node.id + "'");
  if (!std::isfinite(node.elevation)) throw InvalidInput("node '" + node.id + "' has a non-finite elevation");
  if (node.kind == NodeKind::kSupply && !(node.fixed_pressure > 0.0)) {
    throw InvalidInput("supply node '" + node.id + "' needs a positive fixed pressure");
  }
  if (node.initial_pressure && !(*node.initial_pressure > 0.0)) {
    throw InvalidInput("node '" + node.id + "' has a non-positive initial pressure");
  }
  const std::size_t index = nodes_.size();
  node_lookup_.emplace(node.id, index);
  nodes_.push_back(std::move(node));
  return index;
}

void NetworkTopology::refresh_inclination(NetworkEdge& edge) const {
  const double rise = nodes_[edge.to].elevation - nodes_[edge.from].elevation;
  const double sin_theta = rise / edge.geometry.length;
  if (std::abs(sin_theta) > 1.0) {
    throw InvalidInput("pipe '" + edge.id + "' is shorter than the elevation difference of its end nodes");
  }
  edge.geometry.inclination_sin = sin_theta;
}

void NetworkTopology::add_pipe(const std::string& id, const std::string& from, const std::string& to,
                               PipeGeometry geometry, std::optional<double> declared_inclination_sin, int segments) {
  if (id.empty()) throw InvalidInput("pipe id must not be empty");
  if (segments < 1) throw InvalidInput("pipe '" + id + "' must have at least one segment");
  const auto from_index = find_node(from);
  const auto to_index = find_node(to);
  if (!from_index) throw InvalidInput("pipe '" + id + "' references unknown node '" + from + "'");
  if (!to_index) throw InvalidInput("pipe '" + id + "' references unknown node '" + to + "'");
  if (*from_index == *to_index) throw InvalidInput("pipe '" + id + "' is a self-loop on node '" + from + "'");
  geometry.inclination_sin = 0.0;
  geometry.validate();

  const double rise = nodes_[*to_index].elevation - nodes_[*from_index].elevation;
  if (declared_inclination_sin) {
    const double expected = rise / geometry.length;
    if (std::abs(*declared_inclination_sin - expected) > 1e-9 + 1e-6 * std::abs(expected)) {
      throw InvalidInput("pipe '" + id + "' declares inclination sine " + std::to_string(*declared_inclination_sin) +
                         " but its node elevations imply " + std::to_string(expected));
    }
  }

  auto push_edge = [&](const std::string& edge_id, std::size_t a, std::size_t b, PipeGeometry g) {
    if (edge_lookup_.count(edge_id) != 0) throw InvalidInput("duplicate pipe id '" + edge_id + "'");
    NetworkEdge edge{edge_id, a, b, g};
    refresh_inclination(edge);
    edge_lookup_.emplace(edge_id, edges_.size());
    edges_.push_back(std::move(edge));
  };

  if (segments == 1) {
    push_edge(id, *from_index, *to_index, geometry);
    return;
  }
  PipeGeometry piece = geometry;
  piece.length = geometry.length / segments;
  const double h0 = nodes_[*from_index].elevation;
  std::size_t previous = *from_index;
  for (int k = 1; k <= segments; ++k) {
    std::size_t next = *to_index;
    if (k < segments) {
      NetworkNode joint;
      joint.id = id + "@" + std::to_string(k);
      joint.elevation = h0 + rise * static_cast<double>(k) / segments;
      if (nodes_[*from_index].initial_pressure && nodes_[*to_index].initial_pressure) {
        const double s = static_cast<double>(k) / segments;
        joint.initial_pressure =
            (1.0 - s) * *nodes_[*from_index].initial_pressure + s * *nodes_[*to_index].initial_pressure;
      }
      next = add_node(std::move(joint));
    }
    push_edge(id + "#" + std::to_string(k), previous, next, piece);
    previous = next;
  }
}

void NetworkTopology::set_elevation(const std::string& node_id, double elevation) {
  const std::size_t i = node_index(node_id);
  const double old = nodes_[i].elevation;
  nodes_[i].elevation = elevation;
  try {
    for (auto& edge : edges_) {
      if (edge.from == i || edge.to == i) refresh_inclination(edge);
    }
  } catch (...) {
    nodes_[i].elevation = old;
    for (auto& edge : edges_) {
      if (edge.from == i || edge.to == i) refresh_inclination(edge);
    }
    throw;
  }
}

std::optional<std::size_t> NetworkTopology::find_node(const std::string& id) const {
  const auto it = node_lookup_.find(id);
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t NetworkTopology::node_index(const std::string& id) const {
  const auto found = find_node(id);
  if (!found) throw InvalidInput("unknown node '" + id + "'");
  return *found;
}

std::size_t NetworkTopology::edge_index(const std::string& id) const {
  const auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) throw InvalidInput("unknown pipe '" + id + "'");
  return it->second;
}

std::vector<std::size_t> NetworkTopology::incident_edges(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < edges_.size(); ++j) {
    if (edges_[j].from == node || edges_[j].to == node) out.push_back(j);
  }
  return out;
}

void NetworkTopology::validate() const {
  if (nodes_.empty()) throw InvalidInput("network has no nodes");
  if (edges_.empty()) throw InvalidInput("network has no pipes");

  std::vector<std::size_t> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> degree(nodes_.size(), 0);
  for (const auto& edge : edges_) {
    parent[find(edge.from)] = find(edge.to);
    ++degree[edge.from];
    ++degree[edge.to];
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (degree[i] == 0) throw InvalidInput("node '" + nodes_[i].id + "' is isolated");
    if (find(i) != find(0)) {
      throw InvalidInput("network is disconnected: node '" + nodes_[i].id + "' is not reachable from '" +
                         nodes_[0].id + "'");
    }
  }

  for (const auto& edge : edges_) {
    const double rise = nodes_[edge.to].elevation - nodes_[edge.from].elevation;
    if (std::abs(edge.geometry.length * edge.geometry.inclination_sin - rise) > 1e-9 * (1.0 + std::abs(rise))) {
      throw InvalidInput("pipe '" + edge.id + "' inclination inconsistent with node elevations");
    }
  }

  bool has_supply = false;
  bool all_initialized = true;
  for (const auto& node : nodes_) {
    has_supply = has_supply || node.kind == NodeKind::kSupply;
    all_initialized = all_initialized && (node.kind == NodeKind::kSupply || node.initial_pressure.has_value());
  }
  if (!has_supply && !all_initialized) {
    throw InvalidInput("network needs a supply node or an initial pressure on every node");
  }
}

IncidenceMatrix incidence_matrix(const NetworkTopology& topology) {
  const auto& nodes = topology.nodes();
  const auto& edges = topology.edges();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) {
    if (edges[j].from >= nodes.size() || edges[j].to >= nodes.size()) {
      throw InvalidInput("pipe '" + edges[j].id + "' has a dangling endpoint");
    }
    triplets.emplace_back(static_cast<int>(edges[j].from), static_cast<int>(j), -1.0);
    triplets.emplace_back(static_cast<int>(edges[j].to), static_cast<int>(j), 1.0);
  }
  IncidenceMatrix b;
  b.matrix.resize(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(edges.size()));
  b.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

double node_capacitance(const NetworkTopology& topology, const FrozenGasState& gs, std::size_t node) {
  const auto incident = topology.incident_edges(node);
  if (incident.empty()) throw InvalidInput("node '" + topology.nodes().at(node).id + "' is isolated");
  double c = 0.0;
  for (const std::size_t j : incident) {
    const auto& g = topology.edges()[j].geometry;
    c += g.length * g.area() / (2.0 * gs.standard_density * gs.speed_of_sound_sq);
  }
  return c;
}

NetworkPhs::NetworkPhs(NetworkTopology topology, GasProperties gas, FrozenGasState gas_state,
                       FrictionModel friction, std::vector<double> frozen_mean_pressures)
    : topology_(std::move(topology)),
      gas_(gas),
      gas_state_(gas_state),
      friction_(friction),
      frozen_mean_pressure_(std::move(frozen_mean_pressures)) {
  topology_.validate();
  if (frozen_mean_pressure_.size() != topology_.edge_count()) {
    throw InvalidInput("need one frozen mean pressure per pipe");
  }
  incidence_ = incidence_matrix(topology_);
  const std::size_t n_nodes = topology_.node_count();
  capacitance_.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) capacitance_[i] = node_capacitance(topology_, gas_state_, i);

  edge_params_.reserve(topology_.edge_count());
  disturbance_.resize(topology_.edge_count());
  for (std::size_t j = 0; j < topology_.edge_count(); ++j) {
    PipeParams params{topology_.edges()[j].geometry, gas_state_, gas_, friction_};
    params.validate();
    if (!(frozen_mean_pressure_[j] > 0.0)) {
      throw InvalidInput("frozen mean pressure of pipe '" + topology_.edges()[j].id + "' must be positive");
    }
    disturbance_[j] = gravity_disturbance(params, frozen_mean_pressure_[j]);
    edge_params_.push_back(std::move(params));
  }
  supply_pressure_.assign(n_nodes, 0.0);
  state_index_.assign(n_nodes, 0);
  rebuild_indices();
}

void NetworkPhs::rebuild_indices() {
  demand_nodes_.clear();
  supply_nodes_.clear();
  for (std::size_t i = 0; i < topology_.node_count(); ++i) {
    if (supply_pressure_[i] > 0.0) {
      state_index_[i] = -1;
      supply_nodes_.push_back(i);
    } else {
      state_index_[i] = static_cast<long>(demand_nodes_.size());
      demand_nodes_.push_back(i);
    }
  }
}

std::optional<std::size_t> NetworkPhs::state_index(std::size_t node) const {
  if (state_index_[node] < 0) return std::nullopt;
  return static_cast<std::size_t>(state_index_[node]);
}

double NetworkPhs::inertia(std::size_t edge) const { return 1.0 / edge_params_[edge].inductive_weight(); }

NetworkStructure NetworkPhs::structure() const {
  const auto nd = static_cast<Eigen::Index>(demand_count());
  const auto ne = static_cast<Eigen::Index>(edge_count());
  const auto ns = static_cast<Eigen::Index>(supply_nodes_.size());
  const Eigen::Index n = nd + ne;
  NetworkStructure s;
  s.interconnection = Eigen::MatrixXd::Zero(n, n);
  s.storage = Eigen::VectorXd::Zero(n);
  s.input = Eigen::MatrixXd::Zero(n, nd);
  s.supply_input = Eigen::MatrixXd::Zero(n, ns);
  s.disturbance = Eigen::MatrixXd::Zero(n, ne);

  const Eigen::MatrixXd b = incidence_.dense();
  for (Eigen::Index k = 0; k < nd; ++k) {
    const auto i = static_cast<Eigen::Index>(demand_nodes_[static_cast<std::size_t>(k)]);
    s.interconnection.block(k, nd, 1, ne) = b.row(i);
    s.interconnection.block(nd, k, ne, 1) = -b.row(i).transpose();
    s.storage(k) = 1.0 / capacitance_[static_cast<std::size_t>(i)];
    s.input(k, k) = 1.0;
  }
  for (Eigen::Index k = 0; k < ns; ++k) {
    const auto i = static_cast<Eigen::Index>(supply_nodes_[static_cast<std::size_t>(k)]);
    s.supply_input.block(nd, k, ne, 1) = -b.row(i).transpose();
  }
  for (Eigen::Index j = 0; j < ne; ++j) {
    s.storage(nd + j) = edge_params_[static_cast<std::size_t>(j)].inductive_weight();
    s.disturbance(nd + j, j) = -1.0;
  }
  return s;
}

Eigen::VectorXd NetworkPhs::node_pressures(const Eigen::VectorXd& costate) const {
  if (static_cast<std::size_t>(costate.size()) != state_dimension()) {
    throw InvalidInput("co-state has wrong dimension");
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(node_count()));
  for (std::size_t i = 0; i < node_count(); ++i) {
    const double value = state_index_[i] < 0 ? supply_pressure_[i] : costate(state_index_[i]);
    if (!(value > 0.0)) {
      throw ModelValidityError("non-positive pressure " + std::to_string(value) + " Pa", topology_.nodes()[i].id);
    }
    p(static_cast<Eigen::Index>(i)) = value;
  }
  return p;
}

Eigen::VectorXd NetworkPhs::edge_flows(const Eigen::VectorXd& costate) const {
  return costate.tail(static_cast<Eigen::Index>(edge_count()));
}

Eigen::VectorXd NetworkPhs::supply_flows(const Eigen::VectorXd& costate) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(supply_nodes_.size()));
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  std::vector<double> net(node_count(), 0.0);
  for (std::size_t j = 0; j < edge_count(); ++j) {
    const double q = costate(offset + static_cast<Eigen::Index>(j));
    net[topology_.edges()[j].from] -= q;
    net[topology_.edges()[j].to] += q;
  }
  for (std::size_t k = 0; k < supply_nodes_.size(); ++k) out(static_cast<Eigen::Index>(k)) = -net[supply_nodes_[k]];
  return out;
}

Eigen::VectorXd NetworkPhs::dissipation_diagonal(const Eigen::VectorXd& costate) const {
  const Eigen::VectorXd p = node_pressures(costate);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(costate.size());
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  for (std::size_t j = 0; j < edge_count(); ++j) {
    const auto& edge = topology_.edges()[j];
    const auto row = offset + static_cast<Eigen::Index>(j);
    const double pm = mean_pressure(p(static_cast<Eigen::Index>(edge.from)), p(static_cast<Eigen::Index>(edge.to)));
    r(row) = resistive_coefficient(edge_params_[j], costate(row), pm);
  }
  return r;
}

Eigen::VectorXd NetworkPhs::costate_rate(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                                         ModelVariant variant) const {
  if (static_cast<std::size_t>(injections.size()) != demand_count()) {
    throw InvalidInput("need one injection per demand node");
  }
  const Eigen::VectorXd p = node_pressures(costate);
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  Eigen::VectorXd rate(costate.size());
  std::vector<double> net(node_count(), 0.0);

  for (std::size_t j = 0; j < edge_count(); ++j) {
    const auto& edge = topology_.edges()[j];
    const auto row = offset + static_cast<Eigen::Index>(j);
    const double q = costate(row);
    const double p_from = p(static_cast<Eigen::Index>(edge.from));
    const double p_to = p(static_cast<Eigen::Index>(edge.to));
    const double pm = mean_pressure(p_from, p_to);
    const double r = resistive_coefficient(edge_params_[j], q, pm);
    const double d = variant == ModelVariant::kPhs ? disturbance_[j] : gravity_disturbance(edge_params_[j], pm);
    rate(row) = edge_params_[j].inductive_weight() * (p_from - p_to - r * q - d);
    net[edge.from] -= q;
    net[edge.to] += q;
  }
  for (std::size_t k = 0; k < demand_nodes_.size(); ++k) {
    const std::size_t i = demand_nodes_[k];
    rate(static_cast<Eigen::Index>(k)) = (injections(static_cast<Eigen::Index>(k)) + net[i]) / capacitance_[i];
  }
  return rate;
}

Eigen::VectorXd NetworkPhs::state_from_costate(const Eigen::VectorXd& costate) const {
  Eigen::VectorXd x(costate.size());
  for (std::size_t k = 0; k < demand_nodes_.size(); ++k) {
    x(static_cast<Eigen::Index>(k)) = capacitance_[demand_nodes_[k]] * costate(static_cast<Eigen::Index>(k));
  }
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  for (std::size_t j = 0; j < edge_count(); ++j) {
    const auto row = offset + static_cast<Eigen::Index>(j);
    x(row) = costate(row) / edge_params_[j].inductive_weight();
  }
  return x;
}

Eigen::VectorXd NetworkPhs::costate_from_state(const Eigen::VectorXd& state) const {
  Eigen::VectorXd e(state.size());
  for (std::size_t k = 0; k < demand_nodes_.size(); ++k) {
    e(static_cast<Eigen::Index>(k)) = state(static_cast<Eigen::Index>(k)) / capacitance_[demand_nodes_[k]];
  }
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  for (std::size_t j = 0; j < edge_count(); ++j) {
    const auto row = offset + static_cast<Eigen::Index>(j);
    e(row) = state(row) * edge_params_[j].inductive_weight();
  }
  return e;
}

Eigen::VectorXd NetworkPhs::state_rate(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                                       ModelVariant variant) const {
  return state_from_costate(costate_rate(costate, injections, variant));
}

double NetworkPhs::hamiltonian(const Eigen::VectorXd& costate) const {
  return 0.5 * costate.dot(state_from_costate(costate));
}

double NetworkPhs::linepack(const Eigen::VectorXd& costate) const {
  double total = 0.0;
  for (std::size_t k = 0; k < demand_nodes_.size(); ++k) {
    total += capacitance_[demand_nodes_[k]] * costate(static_cast<Eigen::Index>(k));
  }
  return total;
}

NetworkPower NetworkPhs::power(const Eigen::VectorXd& costate, const Eigen::VectorXd& injections,
                               ModelVariant variant) const {
  const Eigen::VectorXd p = node_pressures(costate);
  const Eigen::VectorXd r = dissipation_diagonal(costate);
  const auto offset = static_cast<Eigen::Index>(edge_offset());
  NetworkPower out;
  for (std::size_t j = 0; j < edge_count(); ++j) {
    const auto row = offset + static_cast<Eigen::Index>(j);
    const double q = costate(row);
    out.dissipation += r(row) * q * q;
    double d = disturbance_[j];
    if (variant == ModelVariant::kLivePm) {
      const auto& edge = topology_.edges()[j];
      d = gravity_disturbance(edge_params_[j], mean_pressure(p(static_cast<Eigen::Index>(edge.from)),
                                                             p(static_cast<Eigen::Index>(edge.to))));
    }
    out.disturbance -= q * d;  // z = -qnm
  }
  for (std::size_t k = 0; k < demand_nodes_.size(); ++k) {
    out.port += costate(static_cast<Eigen::Index>(k)) * injections(static_cast<Eigen::Index>(k));
  }
  const Eigen::VectorXd supply = supply_flows(costate);
  for (std::size_t k = 0; k < supply_nodes_.size(); ++k) {
    out.port += supply_pressure_[supply_nodes_[k]] * supply(static_cast<Eigen::Index>(k));
  }
  return out;
}

NetworkPhs NetworkPhs::with_supply(std::size_t node, double pressure) const {
  if (node >= node_count()) throw InvalidInput("supply node index out of range");
  if (!(pressure > 0.0)) throw InvalidInput("supply pressure must be positive");
  NetworkPhs out = *this;
  out.supply_pressure_[node] = pressure;
  out.rebuild_indices();
  if (out.demand_nodes_.empty()) throw InvalidInput("cannot fix the pressure of every node: no dynamics left");
  return out;
}

NetworkPhs NetworkPhs::with_frozen_mean_pressures(std::vector<double> frozen_mean_pressures) const {
  if (frozen_mean_pressures.size() != edge_count()) throw InvalidInput("need one frozen mean pressure per pipe");
  NetworkPhs out = *this;
  for (std::size_t j = 0; j < edge_count(); ++j) {
    if (!(frozen_mean_pressures[j] > 0.0)) throw InvalidInput("frozen mean pressure must be positive");
    out.disturbance_[j] = gravity_disturbance(edge_params_[j], frozen_mean_pressures[j]);
  }
  out.frozen_mean_pressure_ = std::move(frozen_mean_pressures);
  return out;
}

NetworkPhs assemble_network_phs(const NetworkTopology& topology, const GasProperties& gas,
                                const FrozenGasState& gas_state, const std::vector<double>& frozen_mean_pressures,
                                const FrictionModel& friction) {
  return NetworkPhs(topology, gas, gas_state, friction, frozen_mean_pressures);
}

NetworkPhs apply_supply_node(const NetworkPhs& phs, std::size_t node, double fixed_pressure) {
  return phs.with_supply(node, fixed_pressure);
}

NetworkPhs apply_topology_supplies(const NetworkPhs& phs) {
  NetworkPhs out = phs;
  const auto& nodes = phs.topology().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::kSupply) out = out.with_supply(i, nodes[i].fixed_pressure);
  }
  return out;
}

}  // namespace gasphs
