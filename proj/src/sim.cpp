#include "gasphs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"

namespace gasphs {

LoadProfile::LoadProfile(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) throw InvalidInput("load profile needs one value per time");
  if (times_.empty()) throw InvalidInput("load profile needs at least one point");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) throw InvalidInput("load profile must be finite");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw InvalidInput("load profile times must be strictly increasing");
  }
}

LoadProfile LoadProfile::constant(double value) { return LoadProfile({0.0}, {value}); }

double LoadProfile::operator()(double t) const {
  if (times_.empty()) return 0.0;
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

std::vector<double> SimSettings::sample_times() const {
  std::vector<double> out;
  const double span = t_end - t_start;
  const auto n = static_cast<std::size_t>(std::floor(span / sample_dt * (1.0 + 1e-12)));
  out.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) out.push_back(t_start + static_cast<double>(k) * sample_dt);
  if (out.back() < t_end) {
    if (t_end - out.back() <= 1e-9 * sample_dt) out.back() = t_end;
    else out.push_back(t_end);
  }
  return out;
}

NetworkTopology Scenario::topology() const {
  NetworkTopology topo;
  for (const auto& n : nodes) {
    topo.add_node(NetworkNode{n.id, n.elevation, n.kind, n.fixed_pressure, n.initial_pressure});
  }
  for (const auto& p : pipes) {
    PipeGeometry g;
    g.length = p.length;
    g.diameter = p.diameter;
    g.roughness = p.roughness;
    g.efficiency = p.efficiency;
    topo.add_pipe(p.id, p.from, p.to, g, p.inclination_sin, p.segments);
  }
  topo.validate();
  return topo;
}

void Scenario::validate() const {
  gas.validate();
  if (!(sim.t_end > sim.t_start)) throw InvalidInput("t_end must exceed the start time");
  if (!(sim.sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
  if (!(sim.solver.rtol > 0.0) || !(sim.solver.atol > 0.0)) throw InvalidInput("rtol and atol must be positive");
  if (sim.z_reference_pressure && !(*sim.z_reference_pressure > 0.0)) {
    throw InvalidInput("Z reference pressure must be positive");
  }
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::kSupply && !n.load.empty()) {
      throw InvalidInput("supply node '" + n.id + "' cannot carry a load profile");
    }
    if (n.load.times().size() > 1 && (n.load.times().front() > sim.t_start || n.load.times().back() < sim.t_end)) {
      throw InvalidInput("load profile of node '" + n.id + "' does not cover the simulated time span");
    }
  }
  (void)topology();
}

namespace {

/// Load lookup in the demand order of one NetworkPhs.
class InjectionSchedule {
public:
  InjectionSchedule(const NetworkPhs& phs, const Scenario& scenario) {
    std::unordered_map<std::string, const LoadProfile*> by_id;
    for (const auto& n : scenario.nodes) {
      if (!n.load.empty()) by_id.emplace(n.id, &n.load);
    }
    for (const std::size_t i : phs.demand_nodes()) {
      const auto it = by_id.find(phs.topology().nodes()[i].id);
      profiles_.push_back(it == by_id.end() ? nullptr : it->second);
    }
  }

  Eigen::VectorXd at(double t) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(profiles_.size()));
    for (std::size_t k = 0; k < profiles_.size(); ++k) {
      u(static_cast<Eigen::Index>(k)) = profiles_[k] ? -(*profiles_[k])(t) : 0.0;
    }
    return u;
  }

  std::vector<double> knots(double t0, double t1) const {
    std::vector<double> out;
    for (const auto* p : profiles_) {
      if (!p) continue;
      for (const double t : p->times()) {
        if (t > t0 && t < t1) out.push_back(t);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

private:
  std::vector<const LoadProfile*> profiles_;
};

constexpr double kPressureScale = units::kPaPerBar;

}  // namespace

Eigen::VectorXd demand_injections(const NetworkPhs& phs, const Scenario& scenario, double t) {
  return InjectionSchedule(phs, scenario).at(t);
}

SteadyState steady_state(const NetworkPhs& phs, const Eigen::VectorXd& injections, ModelVariant variant,
                         const SteadyStateOptions& options, std::optional<Eigen::VectorXd> initial_guess) {
  const auto n = static_cast<Eigen::Index>(phs.state_dimension());
  const auto nd = static_cast<Eigen::Index>(phs.demand_count());
  if (injections.size() != nd) throw InvalidInput("need one injection per demand node");
  const bool anchored = !phs.supply_nodes().empty();

  Eigen::VectorXd guess;
  if (initial_guess) {
    if (initial_guess->size() != n) throw InvalidInput("initial guess has the wrong dimension");
    guess = *initial_guess;
  } else {
    guess = Eigen::VectorXd::Zero(n);
    double anchor = 0.0;
    for (const std::size_t s : phs.supply_nodes()) anchor = std::max(anchor, phs.supply_pressure(s));
    for (Eigen::Index k = 0; k < nd; ++k) {
      const auto& node = phs.topology().nodes()[phs.demand_nodes()[static_cast<std::size_t>(k)]];
      if (anchored) {
        guess(k) = anchor;
      } else if (node.initial_pressure) {
        guess(k) = *node.initial_pressure;
      } else {
        throw InvalidInput("node '" + node.id + "' needs an initial pressure");
      }
    }
    // minimum-norm flows satisfying the demand node balances
    const Eigen::MatrixXd b = phs.incidence().dense();
    Eigen::MatrixXd bd(nd, static_cast<Eigen::Index>(phs.edge_count()));
    for (Eigen::Index k = 0; k < nd; ++k) bd.row(k) = b.row(static_cast<Eigen::Index>(phs.demand_nodes()[k]));
    guess.tail(n - nd) = bd.completeOrthogonalDecomposition().solve(-injections);
  }

  double linepack0 = 0.0;
  double capacitance_total = 0.0;
  if (!anchored) {
    if (std::abs(injections.sum()) > 1e-12 * std::max(1.0, injections.cwiseAbs().sum())) {
      throw InvalidInput("a network without supply nodes has no equilibrium unless the injections balance");
    }
    linepack0 = phs.linepack(guess);
    for (const std::size_t i : phs.demand_nodes()) capacitance_total += phs.capacitance(i);
  }

  // scaled unknowns: pressures in bar, flows in m^3/s
  auto to_costate = [&](const Eigen::VectorXd& xs) {
    Eigen::VectorXd e = xs;
    e.head(nd) *= kPressureScale;
    return e;
  };
  auto residual = [&](const Eigen::VectorXd& xs) {
    const Eigen::VectorXd e = to_costate(xs);
    const Eigen::VectorXd rate = phs.costate_rate(e, injections, variant);
    Eigen::VectorXd r(n);
    for (Eigen::Index k = 0; k < nd; ++k) r(k) = rate(k) * phs.capacitance(phs.demand_nodes()[static_cast<std::size_t>(k)]);
    for (std::size_t j = 0; j < phs.edge_count(); ++j) {
      const auto row = nd + static_cast<Eigen::Index>(j);
      r(row) = rate(row) / phs.edge_params(j).inductive_weight() / kPressureScale;
    }
    if (!anchored) r(0) = (phs.linepack(e) - linepack0) / capacitance_total / kPressureScale;
    return r;
  };
  auto safe_norm = [&](const Eigen::VectorXd& xs, Eigen::VectorXd& r) {
    try {
      r = residual(xs);
      const double norm = r.lpNorm<Eigen::Infinity>();
      return std::isfinite(norm) ? norm : std::numeric_limits<double>::infinity();
    } catch (const ModelValidityError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Eigen::VectorXd xs = guess;
  xs.head(nd) /= kPressureScale;
  Eigen::VectorXd r;
  double norm = safe_norm(xs, r);
  if (!std::isfinite(norm)) throw ModelValidityError("steady-state initial guess violates positive pressures");

  SteadyState out;
  Eigen::MatrixXd jac(n, n);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm < options.tolerance) {
      out.costate = to_costate(xs);
      out.residual = norm;
      out.iterations = it;
      return out;
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(xs(c)));
      Eigen::VectorXd xp = xs;
      xp(c) += h;
      Eigen::VectorXd rp;
      if (!std::isfinite(safe_norm(xp, rp))) {
        xp(c) = xs(c) - h;
        if (!std::isfinite(safe_norm(xp, rp))) throw ModelValidityError("steady-state Jacobian left the valid region");
        jac.col(c) = (r - rp) / h;
      } else {
        jac.col(c) = (rp - r) / h;
      }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) {
      throw ConvergenceError("steady-state Jacobian is singular (rcond " + std::to_string(rcond) + ")", norm);
    }
    const Eigen::VectorXd dx = lu.solve(-r);

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd trial = xs + alpha * dx;
      Eigen::VectorXd rt;
      const double trial_norm = safe_norm(trial, rt);
      if (trial_norm < (1.0 - 1e-4 * alpha) * norm || (trial_norm < options.tolerance)) {
        xs = trial;
        r = rt;
        norm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (norm < 1e3 * options.tolerance) {
        // stagnation at round-off level
        break;
      }
      throw ConvergenceError("steady-state line search failed", norm);
    }
  }
  if (norm < options.tolerance) {
    out.costate = to_costate(xs);
    out.residual = norm;
    out.iterations = options.max_iterations;
    return out;
  }
  throw ConvergenceError("steady-state Newton iteration did not converge (residual " + std::to_string(norm) + ")",
                         norm);
}

FrozenModel frozen_model(const Scenario& scenario) {
  scenario.validate();
  const NetworkTopology topo = scenario.topology();

  double z_ref = 0.0;
  const bool defaulted = !scenario.sim.z_reference_pressure.has_value();
  if (scenario.sim.z_reference_pressure) {
    z_ref = *scenario.sim.z_reference_pressure;
  } else {
    for (const auto& n : topo.nodes()) {
      if (n.kind == NodeKind::kSupply) z_ref = std::max(z_ref, n.fixed_pressure);
    }
    if (z_ref == 0.0) {
      for (const auto& n : topo.nodes()) z_ref = std::max(z_ref, n.initial_pressure.value_or(0.0));
    }
  }
  const FrozenGasState gs = freeze_gas_state(scenario.gas, z_ref, scenario.sim.compressibility);
  return FrozenModel{apply_topology_supplies(assemble_network_phs(
                         topo, scenario.gas, gs, std::vector<double>(topo.edge_count(), z_ref), scenario.sim.friction)),
                     z_ref, defaulted};
}

PreparedRun prepare(const Scenario& scenario) {
  FrozenModel model = frozen_model(scenario);
  const NetworkPhs& phs = model.phs;
  const NetworkTopology& topo = phs.topology();
  const double z_ref = model.z_reference_pressure;
  const bool defaulted = model.z_reference_defaulted;

  const Eigen::VectorXd inj0 = demand_injections(phs, scenario, scenario.sim.t_start);
  Eigen::VectorXd initial;
  int iterations = 0;
  if (!phs.supply_nodes().empty()) {
    const SteadyState ss = steady_state(phs, inj0, ModelVariant::kLivePm);
    initial = ss.costate;
    iterations = ss.iterations;
  } else {
    initial = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(phs.state_dimension()));
    for (std::size_t k = 0; k < phs.demand_count(); ++k) {
      initial(static_cast<Eigen::Index>(k)) = *topo.nodes()[phs.demand_nodes()[k]].initial_pressure;
    }
  }

  const Eigen::VectorXd p = phs.node_pressures(initial);
  std::vector<double> pm(phs.edge_count());
  for (std::size_t j = 0; j < phs.edge_count(); ++j) {
    const auto& e = topo.edges()[j];
    pm[j] = mean_pressure(p(static_cast<Eigen::Index>(e.from)), p(static_cast<Eigen::Index>(e.to)));
  }
  return PreparedRun{phs.with_frozen_mean_pressures(std::move(pm)), initial, z_ref, defaulted, iterations};
}

Trajectory integrate(const NetworkPhs& phs, const Scenario& scenario, const Eigen::VectorXd& initial,
                     std::optional<ModelVariant> variant_override) {
  const ModelVariant variant = variant_override.value_or(scenario.sim.variant);
  const InjectionSchedule schedule(phs, scenario);
  const auto n = static_cast<Eigen::Index>(phs.state_dimension());
  const auto nd = static_cast<Eigen::Index>(phs.demand_count());
  const auto ns = static_cast<Eigen::Index>(phs.supply_nodes().size());
  if (initial.size() != n) throw InvalidInput("initial co-state has the wrong dimension");

  // y = (co-state, injected volume, supplied volumes, dissipated, port and disturbance energy)
  const Eigen::Index q0 = n;
  const Eigen::Index dim = n + 1 + ns + 3;
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dim);
  y0.head(n) = initial;

  std::string last_where;
  OdeSystem system;
  system.controlled = static_cast<std::size_t>(n);
  system.error_scale = Eigen::VectorXd::Ones(n);
  system.error_scale.head(nd).setConstant(1.0 / kPressureScale);
  system.rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
    try {
      const Eigen::VectorXd e = y.head(n);
      const Eigen::VectorXd u = schedule.at(t);
      dydt.resize(dim);
      dydt.head(n) = phs.costate_rate(e, u, variant);
      const NetworkPower power = phs.power(e, u, variant);
      dydt(q0) = u.sum();
      dydt.segment(q0 + 1, ns) = phs.supply_flows(e);
      dydt(q0 + 1 + ns) = power.dissipation;
      dydt(q0 + 2 + ns) = power.port;
      dydt(q0 + 3 + ns) = power.disturbance;
    } catch (const ModelValidityError& err) {
      last_where = err.where();
      throw;
    }
  };

  Trajectory traj;
  traj.variant = variant;
  const std::vector<double> samples = scenario.sim.sample_times();
  const std::vector<double> breaks = schedule.knots(scenario.sim.t_start, scenario.sim.t_end);

  OdeSolution sol;
  try {
    sol = integrate_ode(system, scenario.sim.t_start, y0, samples, breaks, scenario.sim.solver);
  } catch (const IntegrationError& err) {
    traj.failure = TrajectoryFailure{err.time(), last_where,
                                     last_where.empty() ? err.what()
                                                        : std::string(err.what()) +
                                                              " after pressure positivity was violated at " +
                                                              last_where};
    return traj;
  }
  traj.stats = sol.stats;

  const double c2 = phs.gas_state().speed_of_sound_sq;
  const double rho_n = phs.gas_state().standard_density;
  traj.max_velocity.assign(phs.edge_count(), 0.0);
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const Eigen::VectorXd& y = sol.values[k];
    const Eigen::VectorXd e = y.head(n);
    Eigen::VectorXd p;
    try {
      p = phs.node_pressures(e);
    } catch (const ModelValidityError& err) {
      traj.failure = TrajectoryFailure{sol.times[k], err.where(), err.what()};
      break;
    }
    traj.times.push_back(sol.times[k]);
    traj.costates.push_back(e);
    traj.node_pressures.push_back(p);
    traj.edge_flows.push_back(phs.edge_flows(e));
    traj.supply_flows.push_back(phs.supply_flows(e));
    traj.injections.push_back(schedule.at(sol.times[k]));
    traj.injected_volume.push_back(y(q0));
    traj.supplied_volume.push_back(y.segment(q0 + 1, ns));
    traj.dissipated_energy.push_back(y(q0 + 1 + ns));
    traj.port_energy.push_back(y(q0 + 2 + ns));
    traj.disturbance_energy.push_back(y(q0 + 3 + ns));

    for (std::size_t j = 0; j < phs.edge_count(); ++j) {
      const auto& edge = phs.topology().edges()[j];
      const double pm = mean_pressure(p(static_cast<Eigen::Index>(edge.from)), p(static_cast<Eigen::Index>(edge.to)));
      const double q = e(nd + static_cast<Eigen::Index>(j));
      const double v = std::abs(rho_n * q * c2 / (pm * phs.edge_params(j).geometry.area()));
      traj.max_velocity[j] = std::max(traj.max_velocity[j], v);
      if (v > kSlowFlowVelocityLimit) ++traj.velocity_violations;
    }
  }
  return traj;
}

SimulationResult simulate(const Scenario& scenario) {
  SimulationResult out{prepare(scenario), {}, {}};
  out.trajectory = integrate(out.prepared.phs, scenario, out.prepared.initial);
  out.energy = energy_balance(out.trajectory, out.prepared.phs);
  return out;
}

double mass_balance_error(const NetworkPhs& phs, const Trajectory& trajectory) {
  if (trajectory.size() == 0) return 0.0;
  const double lp0 = phs.linepack(trajectory.costates[0]);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double change = phs.linepack(trajectory.costates[k]) - lp0;
    const double net = trajectory.injected_volume[k] + trajectory.supplied_volume[k].sum();
    worst = std::max(worst, std::abs(change - net));
    scale = std::max({scale, std::abs(change), std::abs(trajectory.injected_volume[k]) +
                                                   trajectory.supplied_volume[k].cwiseAbs().sum()});
  }
  return scale > 0.0 ? worst / scale : worst;
}

VariantDeviation variant_deviation(const Trajectory& phs, const Trajectory& live_pm, double nominal_pressure) {
  if (phs.size() != live_pm.size()) throw InvalidInput("trajectories have different sample counts");
  VariantDeviation dev;
  if (phs.size() == 0) return dev;
  const auto m = phs.edge_flows.front().size();
  Eigen::VectorXd peak = Eigen::VectorXd::Zero(m);
  for (const auto& q : live_pm.edge_flows) peak = peak.cwiseMax(q.cwiseAbs());
  for (std::size_t k = 0; k < phs.size(); ++k) {
    dev.pressure = std::max(dev.pressure, (phs.node_pressures[k] - live_pm.node_pressures[k]).lpNorm<Eigen::Infinity>() /
                                              nominal_pressure);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (peak(j) > 0.0) {
        dev.flow = std::max(dev.flow, std::abs(phs.edge_flows[k](j) - live_pm.edge_flows[k](j)) / peak(j));
      }
    }
  }
  return dev;
}

}  // namespace gasphs
