#pragma once

#include <optional>

#include "gasphs/gas.hpp"

namespace gasphs {

/// Geometry and friction data of one pipeline.
struct PipeGeometry {
  double length = 0.0;           ///< L [m]
  double diameter = 0.0;         ///< D [m]
  double roughness = 0.0;        ///< k [m]
  double efficiency = 1.0;       ///< eta in (0, 1]
  double inclination_sin = 0.0;  ///< sin(theta), positive when rising from left to right

  double area() const;  ///< pi D^2 / 4
  void validate() const;
};

enum class TurbulentCorrelation { kHofer, kColebrookWhite };

struct ColebrookOptions {
  double tolerance = 1e-12;  ///< on the residual of the implicit equation in 1/sqrt(f)
  int max_iterations = 100;
  double relaxation = 1.0;   ///< fixed-point damping, x <- x + w (g(x) - x)
};

/// Friction closure settings. Defaults: Hofer, hard switch at Re = 2300.
struct FrictionModel {
  TurbulentCorrelation turbulent = TurbulentCorrelation::kHofer;
  /// Width in Re above the critical value over which laminar and turbulent factors are
  /// blended linearly. Zero disables blending.
  double transition_width = 0.0;
  ColebrookOptions colebrook{};
};

enum class FlowRegime { kLaminar, kTransition, kTurbulent };

struct FrictionEvaluation {
  double reynolds = 0.0;
  FlowRegime regime = FlowRegime::kLaminar;
  /// Effective factor f/eta^2. Empty at zero flow, where only the laminar closed form of
  /// the damping coefficient is defined.
  std::optional<double> effective_factor;
};

struct ColebrookSolution {
  double factor = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Re from the standard flow, using rho q = rho_n qn.
double reynolds(double qn_abs, const PipeGeometry& geom, const FrozenGasState& gs, const GasProperties& gas);

/// Hagen-Poiseuille, f = 64/Re. Re must be positive.
double friction_laminar(double reynolds_number);

/// Colebrook-White solved by fixed-point iteration on 1/sqrt(f), seeded with Hofer.
/// Throws ConvergenceError if the iteration cap is reached.
ColebrookSolution friction_colebrook_white(double reynolds_number, const PipeGeometry& geom,
                                           const ColebrookOptions& options = {});

/// Hofer's explicit approximation. Requires Re >= 2300.
double friction_turbulent_hofer(double reynolds_number, const PipeGeometry& geom);

FrictionEvaluation effective_friction(double qn_abs, const PipeGeometry& geom, const FrozenGasState& gs,
                                      const GasProperties& gas, const FrictionModel& model = {});

/// Closed-form laminar damping 32 rho_n c^2 mu L / (eta^2 D^2 A pM) [Pa s/m^3]: the
/// resistive coefficient of the momentum balance for any flow with Re < 2300.
double laminar_damping(const PipeGeometry& geom, const FrozenGasState& gs, const GasProperties& gas,
                       double mean_pressure);

}  // namespace gasphs
