#pragma once

namespace gasphs {

/// Constants of the working gas. All values in SI units.
struct GasProperties {
  double specific_gas_constant = 0.0;  ///< R [J/(kg K)]
  double dynamic_viscosity = 0.0;      ///< mu [kg/(m s)]
  double critical_pressure = 0.0;      ///< pc [Pa]
  double critical_temperature = 0.0;   ///< Tc [K]
  double standard_pressure = 0.0;      ///< pn [Pa]
  double standard_temperature = 0.0;   ///< Tn [K]
  double operating_temperature = 0.0;  ///< T [K], isothermal

  /// Throws InvalidInput unless every field is positive and T lies in [200, 400] K.
  void validate() const;

  /// Natural gas used for the three-node benchmark.
  static GasProperties natural_gas();
};

enum class CompressibilityModel {
  kPapay,  ///< Z from the Papay correlation
  kIdeal,  ///< Z = 1 (test mode)
};

/// Gas closure frozen at one reference pressure (constant compressibility).
struct FrozenGasState {
  double compressibility = 1.0;     ///< Z [-]
  double speed_of_sound_sq = 0.0;   ///< c^2 = Z R T [m^2/s^2]
  double standard_density = 0.0;    ///< rho_n [kg/m^3]
  double reference_pressure = 0.0;  ///< pressure Z was evaluated at [Pa]

  double speed_of_sound() const;
  /// Density at pressure p under the frozen closure, rho = p / c^2.
  double density(double pressure) const { return pressure / speed_of_sound_sq; }
};

/// Papay compressibility factor. Throws ModelValidityError for p < 0 or Z <= 0.
double papay_compressibility(double pressure, double temperature, const GasProperties& gas);

/// Freezes Z, c^2 and rho_n. rho_n always uses Z at standard conditions.
FrozenGasState freeze_gas_state(const GasProperties& gas, double reference_pressure,
                                CompressibilityModel model = CompressibilityModel::kPapay);

// Conversions between mass flow M [kg/s], actual volumetric flow q [m^3/s] and
// standard volumetric flow qn [m^3/s]: M = rho q = rho_n qn.
double mass_flow_from_standard(double qn, double standard_density);
double standard_flow_from_mass(double mass_flow, double standard_density);
double mass_flow_from_volumetric(double q, double density);
double volumetric_flow_from_mass(double mass_flow, double density);
double volumetric_flow_from_standard(double qn, double standard_density, double density);

}  // namespace gasphs
