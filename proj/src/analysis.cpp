#include "gasphs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gasphs/error.hpp"

namespace gasphs {

double hamiltonian(const PipelinePhs& phs, const Eigen::Vector3d& costate) {
  const Eigen::Vector3d x = phs.state_from_costate(costate);
  return 0.5 * x.dot(phs.storage() * x);
}

double hamiltonian(const NetworkPhs& phs, const Eigen::VectorXd& costate) { return phs.hamiltonian(costate); }

EnergyReport energy_balance(const Trajectory& trajectory, const NetworkPhs& phs) {
  EnergyReport report;
  const std::size_t n = trajectory.size();
  if (n == 0) return report;
  report.samples.reserve(n);
  report.min_dissipation = std::numeric_limits<double>::infinity();

  const double h0 = phs.hamiltonian(trajectory.costates[0]);
  double previous_residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = trajectory.costates[k];
    const NetworkPower power = phs.power(e, trajectory.injections[k], trajectory.variant);
    EnergySample s;
    s.time = trajectory.times[k];
    s.hamiltonian = phs.hamiltonian(e);
    s.dissipation = power.dissipation;
    s.port_power = power.port;
    s.disturbance_power = power.disturbance;
    const double supplied = trajectory.port_energy[k] + trajectory.disturbance_energy[k] -
                            trajectory.dissipated_energy[k];
    s.residual = (s.hamiltonian - h0) - supplied;

    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(s.residual));
    if (k > 0) report.max_step_residual = std::max(report.max_step_residual, std::abs(s.residual - previous_residual));
    previous_residual = s.residual;
    report.max_hamiltonian = std::max(report.max_hamiltonian, s.hamiltonian);
    report.energy_scale = std::max({report.energy_scale, std::abs(s.hamiltonian - h0),
                                    std::abs(trajectory.port_energy[k]), std::abs(trajectory.disturbance_energy[k]),
                                    std::abs(trajectory.dissipated_energy[k])});
    report.min_dissipation = std::min(report.min_dissipation, s.dissipation);
    report.passive = report.passive && s.dissipation >= 0.0;
    report.samples.push_back(s);
  }
  const double scale = report.energy_scale > 0.0 ? report.energy_scale : report.max_hamiltonian;
  report.normalized_residual = scale > 0.0 ? report.max_abs_residual / scale : 0.0;
  return report;
}

double ofp_index(const PipeParams& params, double mean_pressure) {
  if (!(mean_pressure > 0.0)) throw ModelValidityError("OFP index requires a positive mean pressure");
  return laminar_damping(params.geometry, params.gas_state, params.gas, mean_pressure);
}

OfpCheck verify_ofp_bound(const PipeParams& params, double mean_pressure, std::span<const double> flow_magnitudes) {
  OfpCheck check;
  check.index = ofp_index(params, mean_pressure);
  check.min_sampled_resistance = std::numeric_limits<double>::infinity();
  std::vector<double> grid(flow_magnitudes.begin(), flow_magnitudes.end());
  std::sort(grid.begin(), grid.end());
  double previous = -std::numeric_limits<double>::infinity();
  for (const double q : grid) {
    const double r = resistive_coefficient(params, q, mean_pressure);
    check.min_sampled_resistance = std::min(check.min_sampled_resistance, r);
    check.lower_bound_holds = check.lower_bound_holds && check.index <= r;
    check.monotone = check.monotone && r >= previous;
    previous = r;
  }
  return check;
}

PressureWeights pressure_weights(double pl, double pr) {
  if (!(pl > 0.0) || !(pr > 0.0)) throw ModelValidityError("pressure weights require positive pressures");
  const double sum = pl + pr;
  return {(2.0 - pr / sum) / 3.0, (2.0 - pl / sum) / 3.0};
}

double gravity_feedback_gain(const PipeParams& params, double gravity) {
  return gravity * params.geometry.length * params.geometry.inclination_sin / params.gas_state.speed_of_sound_sq;
}

Eigen::Matrix3d variable_pm_state_matrix(const PipeParams& params, const PipelineState& state, double gravity) {
  const PressureWeights w = pressure_weights(state.pl, state.pr);
  const double phi = gravity_feedback_gain(params, gravity);
  const double r = resistive_coefficient(params, state.qnm, mean_pressure(state.pl, state.pr));
  Eigen::Matrix3d a;
  a << 0.0, 0.0, -1.0,
       0.0, 0.0, 1.0,
       1.0 - phi * w.kl, -1.0 - phi * w.kr, -r;
  return a;
}

std::array<std::complex<double>, 3> eigenvalues_variable_pm(double resistance, double phi, double kl, double kr) {
  if (!(resistance >= 0.0)) throw InvalidInput("resistance must be non-negative");
  // lambda^2 + R lambda + c0 = 0
  const double c0 = 2.0 + phi * (kr - kl);
  const double radicand = resistance * resistance - 4.0 * c0;
  std::array<std::complex<double>, 3> out{};
  if (radicand < 0.0) {
    const double im = 0.5 * std::sqrt(-radicand);
    out[1] = {-0.5 * resistance, im};
    out[2] = {-0.5 * resistance, -im};
    return out;
  }
  const double root = std::sqrt(radicand);
  const double minus_root = -0.5 * (resistance + root);
  // product of the roots is c0; avoids cancellation in -R/2 + sqrt(.)/2
  const double plus_root = minus_root != 0.0 ? c0 / minus_root : 0.5 * (root - resistance);
  out[1] = plus_root;
  out[2] = minus_root;
  return out;
}

namespace {

StabilityCondition stability_condition_for(double c2, double height, double gravity) {
  StabilityCondition c;
  c.threshold = 6.0 * c2 / gravity;
  c.height_difference = height;
  c.margin = c.threshold - std::abs(height);
  c.ok = c.margin > 0.0;
  return c;
}

}  // namespace

StabilityCondition check_stability_condition(const PipeParams& params, double gravity) {
  return stability_condition_for(params.gas_state.speed_of_sound_sq,
                                 params.geometry.length * params.geometry.inclination_sin, gravity);
}

StabilityCondition check_stability_condition_worst_case(const PipeParams& params, double p_min, double p_max,
                                                        double gravity) {
  if (!(p_min > 0.0) || !(p_max >= p_min)) throw InvalidInput("pressure range must satisfy 0 < p_min <= p_max");
  constexpr int kSamples = 256;
  double c2_min = std::numeric_limits<double>::infinity();
  const double temperature = params.gas.operating_temperature;
  for (int i = 0; i <= kSamples; ++i) {
    const double p = p_min + (p_max - p_min) * static_cast<double>(i) / kSamples;
    c2_min = std::min(c2_min, papay_compressibility(p, temperature, params.gas) *
                                  params.gas.specific_gas_constant * temperature);
  }
  return stability_condition_for(c2_min, params.geometry.length * params.geometry.inclination_sin, gravity);
}

StabilityReport stability_report(const PipeParams& params, const PipelineState& state, std::string pipe_id) {
  StabilityReport r;
  r.pipe_id = std::move(pipe_id);
  const PressureWeights w = pressure_weights(state.pl, state.pr);
  r.kl = w.kl;
  r.kr = w.kr;
  r.phi = gravity_feedback_gain(params);
  r.resistance = resistive_coefficient(params, state.qnm, mean_pressure(state.pl, state.pr));
  r.eigenvalues = eigenvalues_variable_pm(r.resistance, r.phi, r.kl, r.kr);
  r.condition = check_stability_condition(params);
  r.eip = params.geometry.inclination_sin == 0.0;
  return r;
}

std::vector<StabilityReport> stability_reports(const NetworkPhs& phs, const Eigen::VectorXd& costate) {
  const Eigen::VectorXd p = phs.node_pressures(costate);
  const Eigen::VectorXd q = phs.edge_flows(costate);
  std::vector<StabilityReport> out;
  out.reserve(phs.edge_count());
  for (std::size_t j = 0; j < phs.edge_count(); ++j) {
    const auto& edge = phs.topology().edges()[j];
    const PipelineState state{p(static_cast<Eigen::Index>(edge.from)), p(static_cast<Eigen::Index>(edge.to)),
                              q(static_cast<Eigen::Index>(j))};
    out.push_back(stability_report(phs.edge_params(j), state, edge.id));
  }
  return out;
}

std::vector<PointwiseStability> pointwise_stability(const NetworkPhs& phs, const Trajectory& trajectory) {
  std::vector<PointwiseStability> out(phs.edge_count());
  for (std::size_t j = 0; j < phs.edge_count(); ++j) {
    out[j].pipe_id = phs.topology().edges()[j].id;
    out[j].max_real_part = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    for (const auto& report : stability_reports(phs, trajectory.costates[k])) {
      const std::size_t j = phs.topology().edge_index(report.pipe_id);
      const double re = std::max(report.eigenvalues[1].real(), report.eigenvalues[2].real());
      out[j].max_real_part = std::max(out[j].max_real_part, re);
    }
  }
  for (auto& entry : out) entry.nonpositive_everywhere = entry.max_real_part <= 0.0;
  return out;
}

}  // namespace gasphs
