#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gasphs/constants.hpp"
#include "gasphs/network.hpp"
#include "gasphs/pipeline.hpp"
#include "gasphs/trajectory.hpp"

namespace gasphs {

/// H = x^T Q x / 2 with x = Q^{-1} (pl, pr, qnm).
double hamiltonian(const PipelinePhs& phs, const Eigen::Vector3d& costate);
double hamiltonian(const NetworkPhs& phs, const Eigen::VectorXd& costate);

struct EnergySample {
  double time = 0.0;
  double hamiltonian = 0.0;
  double dissipation = 0.0;  ///< instantaneous dH/dx^T R dH/dx
  double port_power = 0.0;
  double disturbance_power = 0.0;
  /// (H(t) - H(t0)) - int(-dissipation + port + disturbance) dt
  double residual = 0.0;
};

struct EnergyReport {
  std::vector<EnergySample> samples;
  double max_abs_residual = 0.0;
  double max_step_residual = 0.0;  ///< largest residual change between consecutive samples
  double max_hamiltonian = 0.0;
  /// Largest |H - H0| or accumulated port, disturbance or dissipated energy.
  double energy_scale = 0.0;
  double normalized_residual = 0.0;  ///< max_abs_residual / energy_scale
  double min_dissipation = 0.0;
  bool passive = true;  ///< dissipation >= 0 at every sample
};

/// Audits dH/dt = -dH/dx^T R dH/dx + y^T u + z^T d along a trajectory of `phs`.
EnergyReport energy_balance(const Trajectory& trajectory, const NetworkPhs& phs);

/// Output-feedback passivity index of the inductive-resistive pipe dynamics: the laminar
/// damping coefficient at mean pressure pM.
double ofp_index(const PipeParams& params, double mean_pressure);

struct OfpCheck {
  double index = 0.0;
  double min_sampled_resistance = 0.0;
  bool lower_bound_holds = true;
  bool monotone = true;  ///< R_m non-decreasing along the (sorted) flow grid
};

/// Samples R_m(|qn|, pM) over `flow_magnitudes` and compares with the OFP index.
OfpCheck verify_ofp_bound(const PipeParams& params, double mean_pressure, std::span<const double> flow_magnitudes);

struct PressureWeights {
  double kl = 0.5;
  double kr = 0.5;
};

/// Weights with pM = kl pl + kr pr.
PressureWeights pressure_weights(double pl, double pr);

/// phi = g L sin(theta) / c^2.
double gravity_feedback_gain(const PipeParams& params, double gravity = kGravity);

/// State matrix of the pipe with a variable mean pressure in the gravity term:
///   xdot = A (pl, pr, qnm) + G u,  u = (qnl, -qnr).
Eigen::Matrix3d variable_pm_state_matrix(const PipeParams& params, const PipelineState& state,
                                         double gravity = kGravity);

/// Closed-form eigenvalues of variable_pm_state_matrix: lambda1 = 0 and the roots of
/// lambda^2 + R lambda + 2 + phi (kr - kl). Returned as (0, '+' root, '-' root).
std::array<std::complex<double>, 3> eigenvalues_variable_pm(double resistance, double phi, double kl, double kr);

struct StabilityCondition {
  bool ok = true;
  double threshold = 0.0;          ///< 6 c^2 / g [m]
  double height_difference = 0.0;  ///< L sin(theta) [m]
  double margin = 0.0;             ///< threshold - |L sin(theta)|
};

/// Sufficient Lyapunov-stability condition |L sin(theta)| < 6 c^2 / g of the variable
/// mean pressure pipe.
StabilityCondition check_stability_condition(const PipeParams& params, double gravity = kGravity);

/// Same condition with the smallest c^2 found over [p_min, p_max] (Papay Z).
StabilityCondition check_stability_condition_worst_case(const PipeParams& params, double p_min, double p_max,
                                                        double gravity = kGravity);

struct StabilityReport {
  std::string pipe_id;
  double kl = 0.5;
  double kr = 0.5;
  double phi = 0.0;
  double resistance = 0.0;
  std::array<std::complex<double>, 3> eigenvalues{};
  StabilityCondition condition;
  bool eip = false;  ///< level pipe: equilibrium-independent passivity applies
};

StabilityReport stability_report(const PipeParams& params, const PipelineState& state, std::string pipe_id = {});

/// One report per network edge at the given co-state.
std::vector<StabilityReport> stability_reports(const NetworkPhs& phs, const Eigen::VectorXd& costate);

struct PointwiseStability {
  std::string pipe_id;
  double max_real_part = 0.0;  ///< over all samples, of lambda2 and lambda3
  bool nonpositive_everywhere = true;
};

/// Evaluates the variable-mean-pressure eigenvalues at every trajectory sample.
std::vector<PointwiseStability> pointwise_stability(const NetworkPhs& phs, const Trajectory& trajectory);

}  // namespace gasphs
