#include "gasphs/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "gasphs/constants.hpp"

namespace gasphs {

using OrderedJson = nlohmann::ordered_json;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

void write_trajectory_csv(std::ostream& out, const NetworkPhs& phs, const Trajectory& trajectory) {
  const auto& topo = phs.topology();
  out << "t";
  for (const auto& n : topo.nodes()) out << ",p_" << n.id;
  for (const auto& e : topo.edges()) out << ",qnm_" << e.id;
  for (const std::size_t s : phs.supply_nodes()) out << ",qn_supply_" << topo.nodes()[s].id;
  out << '\n';
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out << format_double(trajectory.times[k]);
    for (const double p : trajectory.node_pressures[k]) out << ',' << format_double(p / units::kPaPerBar);
    for (const double q : trajectory.edge_flows[k]) out << ',' << format_double(q);
    for (const double q : trajectory.supply_flows[k]) out << ',' << format_double(q);
    out << '\n';
  }
}

namespace {

OrderedJson complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

OrderedJson finite_or_null(double v) { return std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr); }

}  // namespace

std::string energy_report_json(const EnergyReport& report, const Trajectory& trajectory) {
  OrderedJson j;
  j["max_abs_residual"] = report.max_abs_residual;
  j["max_hamiltonian"] = report.max_hamiltonian;
  j["energy_scale"] = report.energy_scale;
  j["normalized_residual"] = report.normalized_residual;
  j["min_dissipation"] = finite_or_null(report.min_dissipation);
  j["passive"] = report.passive;
  j["velocity_limit_m_per_s"] = kSlowFlowVelocityLimit;
  j["velocity_violations"] = trajectory.velocity_violations;
  j["max_velocity_m_per_s"] = trajectory.max_velocity;
  if (trajectory.failure) {
    j["failure"] = {{"time_s", trajectory.failure->time},
                    {"where", trajectory.failure->where},
                    {"message", trajectory.failure->message}};
  }
  OrderedJson samples = OrderedJson::array();
  for (const auto& s : report.samples) {
    samples.push_back({{"t", s.time},
                       {"H", s.hamiltonian},
                       {"dissipation", s.dissipation},
                       {"port_power", s.port_power},
                       {"disturbance_power", s.disturbance_power},
                       {"residual", s.residual}});
  }
  j["samples"] = std::move(samples);
  return j.dump(2);
}

std::string steady_state_json(const NetworkPhs& phs, const SteadyState& state) {
  OrderedJson j;
  const Eigen::VectorXd p = phs.node_pressures(state.costate);
  const Eigen::VectorXd q = phs.edge_flows(state.costate);
  const Eigen::VectorXd s = phs.supply_flows(state.costate);
  OrderedJson pressures;
  for (std::size_t i = 0; i < phs.node_count(); ++i) {
    pressures[phs.topology().nodes()[i].id] = p(static_cast<Eigen::Index>(i)) / units::kPaPerBar;
  }
  OrderedJson flows;
  for (std::size_t e = 0; e < phs.edge_count(); ++e) flows[phs.topology().edges()[e].id] = q(static_cast<Eigen::Index>(e));
  OrderedJson supply;
  for (std::size_t k = 0; k < phs.supply_nodes().size(); ++k) {
    supply[phs.topology().nodes()[phs.supply_nodes()[k]].id] = s(static_cast<Eigen::Index>(k));
  }
  j["pressure_bar"] = std::move(pressures);
  j["flow_m3_per_s"] = std::move(flows);
  j["supply_flow_m3_per_s"] = std::move(supply);
  j["residual"] = state.residual;
  j["iterations"] = state.iterations;
  return j.dump(2);
}

std::string stability_conditions_json(const NetworkPhs& phs, const std::string& equilibrium_error) {
  OrderedJson pipes = OrderedJson::array();
  bool all_ok = true;
  for (std::size_t j = 0; j < phs.edge_count(); ++j) {
    const auto& params = phs.edge_params(j);
    const StabilityCondition c = check_stability_condition(params);
    all_ok = all_ok && c.ok;
    pipes.push_back({{"pipe", phs.topology().edges()[j].id},
                     {"phi", gravity_feedback_gain(params)},
                     {"condition_ok", c.ok},
                     {"threshold_m", c.threshold},
                     {"height_difference_m", c.height_difference},
                     {"margin_m", c.margin},
                     {"eip", params.geometry.inclination_sin == 0.0}});
  }
  OrderedJson j;
  j["all_conditions_ok"] = all_ok;
  j["equilibrium_error"] = equilibrium_error;
  j["pipes"] = std::move(pipes);
  return j.dump(2);
}

std::string stability_json(const std::vector<StabilityReport>& reports,
                           const std::vector<PointwiseStability>& pointwise) {
  OrderedJson pipes = OrderedJson::array();
  bool all_ok = true;
  for (const auto& r : reports) {
    all_ok = all_ok && r.condition.ok;
    OrderedJson eig = OrderedJson::array();
    for (const auto& z : r.eigenvalues) eig.push_back(complex_json(z));
    pipes.push_back({{"pipe", r.pipe_id},
                     {"kl", r.kl},
                     {"kr", r.kr},
                     {"phi", r.phi},
                     {"resistance", r.resistance},
                     {"eigenvalues", std::move(eig)},
                     {"condition_ok", r.condition.ok},
                     {"threshold_m", r.condition.threshold},
                     {"height_difference_m", r.condition.height_difference},
                     {"margin_m", r.condition.margin},
                     {"eip", r.eip}});
  }
  OrderedJson j;
  j["all_conditions_ok"] = all_ok;
  j["pipes"] = std::move(pipes);
  if (!pointwise.empty()) {
    OrderedJson pw = OrderedJson::array();
    for (const auto& p : pointwise) {
      pw.push_back({{"pipe", p.pipe_id},
                    {"max_real_part", finite_or_null(p.max_real_part)},
                    {"nonpositive_everywhere", p.nonpositive_everywhere}});
    }
    j["pointwise"] = std::move(pw);
  }
  return j.dump(2);
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkCase>& cases) {
  out << "h1_m,ok,max_pressure_deviation_pct,max_flow_deviation_pct,max_frozen_pm_gap_bar,"
         "energy_residual_normalized,mass_balance_error\n";
  for (const auto& c : cases) {
    out << format_double(c.h1) << ',' << (c.ok ? 1 : 0) << ',' << format_double(100.0 * c.max_pressure_deviation)
        << ',' << format_double(100.0 * c.max_flow_deviation) << ','
        << format_double(c.max_abs_frozen_gap / units::kPaPerBar) << ','
        << format_double(c.energy.normalized_residual) << ',' << format_double(c.mass_balance_error) << '\n';
  }
}

std::string benchmark_json(const std::vector<BenchmarkCase>& cases) {
  OrderedJson rows = OrderedJson::array();
  for (const auto& c : cases) {
    OrderedJson row;
    row["h1_m"] = c.h1;
    row["ok"] = c.ok;
    if (!c.ok) row["message"] = c.message;
    row["max_pressure_deviation"] = c.max_pressure_deviation;
    row["max_flow_deviation"] = c.max_flow_deviation;
    row["max_frozen_pm_gap_Pa"] = c.max_abs_frozen_gap;
    row["energy_residual_normalized"] = c.energy.normalized_residual;
    row["passive"] = c.energy.passive;
    row["mass_balance_error"] = c.mass_balance_error;
    row["frozen_mean_pressure_Pa"] = c.frozen_mean_pressures;
    OrderedJson pw = OrderedJson::array();
    for (const auto& p : c.pointwise) {
      pw.push_back({{"pipe", p.pipe_id}, {"max_real_part", finite_or_null(p.max_real_part)}});
    }
    row["pointwise_stability"] = std::move(pw);
    row["defaults"] = "pipe lengths and load profiles are synthetic artifact defaults";
    rows.push_back(std::move(row));
  }
  return OrderedJson{{"cases", std::move(rows)}}.dump(2);
}

}  // namespace gasphs
