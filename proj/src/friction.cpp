#include "gasphs/friction.hpp"

#include <cmath>
#include <string>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"

namespace gasphs {

double PipeGeometry::area() const { return kPi * diameter * diameter / 4.0; }

void PipeGeometry::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidInput("pipe length must be positive");
  if (!(diameter > 0.0) || !std::isfinite(diameter)) throw InvalidInput("pipe diameter must be positive");
  if (!(roughness >= 0.0) || !std::isfinite(roughness)) throw InvalidInput("pipe roughness must be non-negative");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw InvalidInput("friction efficiency must lie in (0, 1]");
  if (!(inclination_sin >= -1.0 && inclination_sin <= 1.0)) {
    throw InvalidInput("inclination sine must lie in [-1, 1]");
  }
}

double reynolds(double qn_abs, const PipeGeometry& geom, const FrozenGasState& gs, const GasProperties& gas) {
  if (!(qn_abs >= 0.0)) throw InvalidInput("flow magnitude must be non-negative");
  return gs.standard_density * qn_abs * geom.diameter / (gas.dynamic_viscosity * geom.area());
}

double friction_laminar(double reynolds_number) {
  if (!(reynolds_number > 0.0)) {
    throw InvalidInput("laminar friction factor undefined at Re = 0; use the laminar damping closed form");
  }
  return 64.0 / reynolds_number;
}

double friction_turbulent_hofer(double reynolds_number, const PipeGeometry& geom) {
  if (!(reynolds_number >= kCriticalReynolds)) {
    throw InvalidInput("Hofer correlation requires Re >= 2300, got " + std::to_string(reynolds_number));
  }
  const double inner = 4.518 / reynolds_number * std::log10(reynolds_number / 7.0) +
                       geom.roughness / (3.71 * geom.diameter);
  const double s = 2.0 * std::log10(inner);
  return 1.0 / (s * s);
}

ColebrookSolution friction_colebrook_white(double reynolds_number, const PipeGeometry& geom,
                                           const ColebrookOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidInput("Colebrook-White tolerance must be positive");
  const double relative_roughness = geom.roughness / (3.71 * geom.diameter);
  // x = 1/sqrt(f)
  auto map = [&](double x) { return -2.0 * std::log10(2.51 * x / reynolds_number + relative_roughness); };

  double x = 1.0 / std::sqrt(friction_turbulent_hofer(reynolds_number, geom));
  ColebrookSolution solution;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const double gx = map(x);
    solution.residual = std::abs(gx - x);
    solution.iterations = it;
    if (solution.residual < options.tolerance) {
      solution.factor = 1.0 / (x * x);
      return solution;
    }
    x += options.relaxation * (gx - x);
  }
  throw ConvergenceError("Colebrook-White iteration did not converge at Re = " + std::to_string(reynolds_number),
                         solution.residual);
}

namespace {

double turbulent_factor(double re, const PipeGeometry& geom, const FrictionModel& model) {
  if (model.turbulent == TurbulentCorrelation::kColebrookWhite) {
    return friction_colebrook_white(re, geom, model.colebrook).factor;
  }
  return friction_turbulent_hofer(re, geom);
}

}  // namespace

FrictionEvaluation effective_friction(double qn_abs, const PipeGeometry& geom, const FrozenGasState& gs,
                                      const GasProperties& gas, const FrictionModel& model) {
  FrictionEvaluation out;
  out.reynolds = reynolds(qn_abs, geom, gs, gas);
  const double eta_sq = geom.efficiency * geom.efficiency;

  if (out.reynolds < kCriticalReynolds) {
    out.regime = FlowRegime::kLaminar;
    if (out.reynolds > 0.0) out.effective_factor = friction_laminar(out.reynolds) / eta_sq;
    return out;
  }
  const double f_turb = turbulent_factor(out.reynolds, geom, model);
  if (model.transition_width > 0.0 && out.reynolds < kCriticalReynolds + model.transition_width) {
    const double s = (out.reynolds - kCriticalReynolds) / model.transition_width;
    out.regime = FlowRegime::kTransition;
    out.effective_factor = ((1.0 - s) * friction_laminar(out.reynolds) + s * f_turb) / eta_sq;
    return out;
  }
  out.regime = FlowRegime::kTurbulent;
  out.effective_factor = f_turb / eta_sq;
  return out;
}

double laminar_damping(const PipeGeometry& geom, const FrozenGasState& gs, const GasProperties& gas,
                       double mean_pressure) {
  if (!(mean_pressure > 0.0)) {
    throw ModelValidityError("laminar damping requires a positive mean pressure");
  }
  const double eta_sq = geom.efficiency * geom.efficiency;
  return 32.0 * gs.standard_density * gs.speed_of_sound_sq * gas.dynamic_viscosity * geom.length /
         (eta_sq * geom.diameter * geom.diameter * geom.area() * mean_pressure);
}

}  // namespace gasphs
