#pragma once

#include <optional>

#include <Eigen/Dense>

#include "gasphs/friction.hpp"
#include "gasphs/gas.hpp"

namespace gasphs {

/// Everything needed to evaluate the lumped dynamics of one pipe.
struct PipeParams {
  PipeGeometry geometry;
  FrozenGasState gas_state;
  GasProperties gas;
  FrictionModel friction;

  void validate() const;
  /// 2 rho_n c^2 / (L A): pressure rate per unit standard flow imbalance of one half.
  double capacitive_weight() const;
  /// A / (rho_n L): inverse flow inertia of the pipe.
  double inductive_weight() const;
};

/// Co-state of the pipeline: boundary pressures [Pa] and middle standard flow [m^3/s].
struct PipelineState {
  double pl = 0.0;
  double pr = 0.0;
  double qnm = 0.0;

  Eigen::Vector3d vector() const { return {pl, pr, qnm}; }
  static PipelineState from_vector(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

/// Weymouth mean pressure, (2/3)(pl + pr - pl pr / (pl + pr)).
double mean_pressure(double pl, double pr);
/// Equivalent form (2/3)(pl^3 - pr^3)/(pl^2 - pr^2); requires pl != pr.
double mean_pressure_cubic_ratio(double pl, double pr);

/// Resistive coefficient R_m(qnm, pM) = f_e rho_n^2 c^2 L |qnm| / (2 D A^2 pM) [Pa s/m^3].
/// Uses the laminar closed form for Re < 2300, which also covers qnm = 0.
double resistive_coefficient(const PipeParams& params, double qnm, double mean_pressure);

/// Gravity disturbance g L sin(theta) pM / c^2 [Pa].
double gravity_disturbance(const PipeParams& params, double mean_pressure);

struct PressureRates {
  double left = 0.0;
  double right = 0.0;
};

/// Lumped mass balance of the left and right halves.
PressureRates lumped_mass_rhs(const PipelineState& state, double qnl, double qnr, const PipeParams& params);

/// Lumped momentum balance, returns d qnm / dt. The gravity term uses the live mean
/// pressure unless `gravity_mean_pressure` pins it.
double lumped_momentum_rhs(const PipelineState& state, const PipeParams& params,
                           std::optional<double> gravity_mean_pressure = std::nullopt);

struct PipelinePorts {
  Eigen::Vector2d y;  ///< (pl, pr)
  double z = 0.0;     ///< qnm
};

/// Third-order port-Hamiltonian pipeline model
///   xdot = (J - R(x)) dH/dx + G u + e d,  y = G^T dH/dx,  z = e^T dH/dx,  H = x^T Q x / 2
/// with co-state dH/dx = Q x = (pl, pr, qnm) and u = (qnl, -qnr).
class PipelinePhs {
public:
  PipelinePhs(PipeParams params, double frozen_mean_pressure);

  const PipeParams& params() const { return params_; }
  double frozen_mean_pressure() const { return frozen_mean_pressure_; }

  const Eigen::Matrix3d& storage() const { return q_; }
  const Eigen::Matrix3d& interconnection() const { return j_; }
  const Eigen::Matrix<double, 3, 2>& input() const { return g_; }
  const Eigen::Vector3d& disturbance_map() const { return e_; }
  double disturbance() const { return d_; }

  /// R(x), evaluated from the co-state (pM live in the denominator).
  Eigen::Matrix3d dissipation(const Eigen::Vector3d& costate) const;

  Eigen::Vector3d state_from_costate(const Eigen::Vector3d& costate) const;
  Eigen::Vector3d costate_from_state(const Eigen::Vector3d& state) const;

  /// xdot for the given co-state and inputs u = (qnl, -qnr).
  Eigen::Vector3d state_rate(const Eigen::Vector3d& costate, const Eigen::Vector2d& u) const;
  /// (pl', pr', qnm') = Q xdot.
  Eigen::Vector3d costate_rate(const Eigen::Vector3d& costate, const Eigen::Vector2d& u) const;

  PipelinePorts ports(const Eigen::Vector3d& costate) const;

private:
  PipeParams params_;
  double frozen_mean_pressure_;
  Eigen::Matrix3d q_;
  Eigen::Matrix3d j_;
  Eigen::Matrix<double, 3, 2> g_;
  Eigen::Vector3d e_;
  double d_;
};

PipelinePhs build_pipeline_phs(const PipeParams& params, double frozen_mean_pressure);

/// Inductive-resistive half of the split model: d qnm / dt driven by the port pressures.
/// The gravity term uses the frozen mean pressure.
double split_rl_rhs(double qnm, double pl, double pr, const PipeParams& params, double frozen_mean_pressure);

enum class PipeSide { kLeft, kRight };

struct CapacitivePort {
  double pressure_rate = 0.0;  ///< dpk/dt
  double output = 0.0;         ///< pk, returned on both ports
};

/// Capacitive end of the split model. `qn_side` is qnl on the left and qnr on the right;
/// beta = +1 (left) or -1 (right).
CapacitivePort split_c_rhs(double pk, double qn_side, double qnm, PipeSide side, const PipeParams& params);

}  // namespace gasphs
