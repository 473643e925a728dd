#include "gasphs/pipeline.hpp"

#include <cmath>
#include <string>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"

namespace gasphs {

void PipeParams::validate() const {
  geometry.validate();
  gas.validate();
  if (!(gas_state.speed_of_sound_sq > 0.0) || !(gas_state.standard_density > 0.0)) {
    throw InvalidInput("frozen gas state must have positive c^2 and rho_n");
  }
}

double PipeParams::capacitive_weight() const {
  return 2.0 * gas_state.standard_density * gas_state.speed_of_sound_sq / (geometry.length * geometry.area());
}

double PipeParams::inductive_weight() const {
  return geometry.area() / (gas_state.standard_density * geometry.length);
}

double mean_pressure(double pl, double pr) {
  if (!(pl > 0.0) || !(pr > 0.0)) {
    throw ModelValidityError("mean pressure requires positive pressures, got pl = " + std::to_string(pl) +
                             " Pa, pr = " + std::to_string(pr) + " Pa");
  }
  return 2.0 / 3.0 * (pl + pr - pl * pr / (pl + pr));
}

double mean_pressure_cubic_ratio(double pl, double pr) {
  if (!(pl > 0.0) || !(pr > 0.0)) throw ModelValidityError("mean pressure requires positive pressures");
  if (pl == pr) throw InvalidInput("cubic-ratio form of the mean pressure is undefined for pl == pr");
  // extended precision: both differences cancel as pl -> pr
  const long double l = pl, r = pr;
  return static_cast<double>(2.0L / 3.0L * (l * l * l - r * r * r) / (l * l - r * r));
}

double resistive_coefficient(const PipeParams& params, double qnm, double mean_pressure) {
  if (!(mean_pressure > 0.0)) throw ModelValidityError("resistive coefficient requires pM > 0");
  const auto& geom = params.geometry;
  const auto& gs = params.gas_state;
  const double q_abs = std::abs(qnm);
  const FrictionEvaluation friction = effective_friction(q_abs, geom, gs, params.gas, params.friction);
  if (friction.regime == FlowRegime::kLaminar) {
    return laminar_damping(geom, gs, params.gas, mean_pressure);
  }
  const double area = geom.area();
  const double rho_n = gs.standard_density;
  return *friction.effective_factor * rho_n * rho_n * gs.speed_of_sound_sq * geom.length * q_abs /
         (2.0 * geom.diameter * area * area * mean_pressure);
}

double gravity_disturbance(const PipeParams& params, double mean_pressure) {
  return kGravity * params.geometry.length * params.geometry.inclination_sin * mean_pressure /
         params.gas_state.speed_of_sound_sq;
}

PressureRates lumped_mass_rhs(const PipelineState& state, double qnl, double qnr, const PipeParams& params) {
  const double k = params.capacitive_weight();
  return {k * (qnl - state.qnm), k * (state.qnm - qnr)};
}

double lumped_momentum_rhs(const PipelineState& state, const PipeParams& params,
                           std::optional<double> gravity_mean_pressure) {
  const double pm = mean_pressure(state.pl, state.pr);
  const double pm_gravity = gravity_mean_pressure.value_or(pm);
  // L times the momentum balance: (rho_n L / A) qnm' = pl - pr - R_m qnm - d
  const double driving = state.pl - state.pr - resistive_coefficient(params, state.qnm, pm) * state.qnm -
                         gravity_disturbance(params, pm_gravity);
  return params.inductive_weight() * driving;
}

PipelinePhs::PipelinePhs(PipeParams params, double frozen_mean_pressure)
    : params_(std::move(params)), frozen_mean_pressure_(frozen_mean_pressure) {
  params_.validate();
  if (!(frozen_mean_pressure_ > 0.0)) {
    throw InvalidInput("frozen mean pressure must be positive");
  }
  const double cap = params_.capacitive_weight();
  q_ = Eigen::Vector3d(cap, cap, params_.inductive_weight()).asDiagonal();
  j_ << 0.0, 0.0, -1.0,
        0.0, 0.0, 1.0,
        1.0, -1.0, 0.0;
  g_ << 1.0, 0.0,
        0.0, 1.0,
        0.0, 0.0;
  e_ << 0.0, 0.0, -1.0;
  d_ = gravity_disturbance(params_, frozen_mean_pressure_);
}

Eigen::Matrix3d PipelinePhs::dissipation(const Eigen::Vector3d& costate) const {
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  r(2, 2) = resistive_coefficient(params_, costate(2), mean_pressure(costate(0), costate(1)));
  return r;
}

Eigen::Vector3d PipelinePhs::state_from_costate(const Eigen::Vector3d& costate) const {
  return costate.cwiseQuotient(q_.diagonal());
}

Eigen::Vector3d PipelinePhs::costate_from_state(const Eigen::Vector3d& state) const {
  return q_.diagonal().cwiseProduct(state);
}

Eigen::Vector3d PipelinePhs::state_rate(const Eigen::Vector3d& costate, const Eigen::Vector2d& u) const {
  const Eigen::Vector3d conservative = j_ * costate;
  const Eigen::Vector3d dissipative = dissipation(costate) * costate;
  return conservative - dissipative + g_ * u + e_ * d_;
}

Eigen::Vector3d PipelinePhs::costate_rate(const Eigen::Vector3d& costate, const Eigen::Vector2d& u) const {
  return q_.diagonal().cwiseProduct(state_rate(costate, u));
}

PipelinePorts PipelinePhs::ports(const Eigen::Vector3d& costate) const {
  return {g_.transpose() * costate, e_.dot(costate)};
}

PipelinePhs build_pipeline_phs(const PipeParams& params, double frozen_mean_pressure) {
  return PipelinePhs(params, frozen_mean_pressure);
}

double split_rl_rhs(double qnm, double pl, double pr, const PipeParams& params, double frozen_mean_pressure) {
  const double r_m = resistive_coefficient(params, qnm, mean_pressure(pl, pr));
  const double d_m = gravity_disturbance(params, frozen_mean_pressure);
  // x_m' = -R_m qnm + g_m^T (pl, pr) - d_m, g_m = (1, -1)
  const double x_rate = -r_m * qnm + (pl - pr) - d_m;
  return params.inductive_weight() * x_rate;
}

CapacitivePort split_c_rhs(double pk, double qn_side, double qnm, PipeSide side, const PipeParams& params) {
  const double beta = side == PipeSide::kLeft ? 1.0 : -1.0;
  // x_k' = g_k^T u with g_k = (1, 1), u = (beta qn_k, -beta qnm)
  const double x_rate = beta * qn_side - beta * qnm;
  return {params.capacitive_weight() * x_rate, pk};
}

}  // namespace gasphs
