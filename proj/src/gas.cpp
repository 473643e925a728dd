#include "gasphs/gas.hpp"

#include <cmath>
#include <string>

#include "gasphs/constants.hpp"
#include "gasphs/error.hpp"

namespace gasphs {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidInput(std::string("gas property '") + name + "' must be positive and finite");
  }
}

void require_positive_density(double density) {
  if (!(density > 0.0)) throw InvalidInput("density must be strictly positive");
}

}  // namespace

void GasProperties::validate() const {
  require_positive(specific_gas_constant, "R");
  require_positive(dynamic_viscosity, "mu");
  require_positive(critical_pressure, "pc");
  require_positive(critical_temperature, "Tc");
  require_positive(standard_pressure, "pn");
  require_positive(standard_temperature, "Tn");
  require_positive(operating_temperature, "T");
  if (operating_temperature < 200.0 || operating_temperature > 400.0) {
    throw InvalidInput("operating temperature " + std::to_string(operating_temperature) +
                       " K outside the isothermal model range [200, 400] K");
  }
}

GasProperties GasProperties::natural_gas() {
  GasProperties gas;
  gas.specific_gas_constant = 518.28;
  gas.dynamic_viscosity = 1.0e-5;
  gas.critical_pressure = 46.5 * units::kPaPerBar;
  gas.critical_temperature = 190.55;
  gas.standard_pressure = 1.01325 * units::kPaPerBar;
  gas.standard_temperature = 273.15;
  gas.operating_temperature = 278.0;
  return gas;
}

double FrozenGasState::speed_of_sound() const { return std::sqrt(speed_of_sound_sq); }

double papay_compressibility(double pressure, double temperature, const GasProperties& gas) {
  if (!(pressure >= 0.0)) {
    throw ModelValidityError("Papay compressibility requires p >= 0, got " + std::to_string(pressure));
  }
  if (!(temperature > 0.0)) throw InvalidInput("temperature must be positive");
  const double pr = pressure / gas.critical_pressure;
  const double tr = temperature / gas.critical_temperature;
  const double z = 1.0 - 3.52 * pr * std::exp(-2.26 * tr) + 0.274 * pr * pr * std::exp(-1.878 * tr);
  if (!(z > 0.0)) {
    throw ModelValidityError("Papay compressibility non-positive at p = " + std::to_string(pressure) +
                             " Pa; pressure outside the correlation's range");
  }
  return z;
}

FrozenGasState freeze_gas_state(const GasProperties& gas, double reference_pressure,
                                CompressibilityModel model) {
  gas.validate();
  if (!(reference_pressure > 0.0)) throw InvalidInput("reference pressure must be positive");

  FrozenGasState state;
  state.reference_pressure = reference_pressure;
  double z_standard = 1.0;
  if (model == CompressibilityModel::kPapay) {
    state.compressibility = papay_compressibility(reference_pressure, gas.operating_temperature, gas);
    z_standard = papay_compressibility(gas.standard_pressure, gas.standard_temperature, gas);
  }
  state.speed_of_sound_sq = state.compressibility * gas.specific_gas_constant * gas.operating_temperature;
  state.standard_density =
      gas.standard_pressure / (z_standard * gas.specific_gas_constant * gas.standard_temperature);
  return state;
}

double mass_flow_from_standard(double qn, double standard_density) {
  require_positive_density(standard_density);
  return standard_density * qn;
}

double standard_flow_from_mass(double mass_flow, double standard_density) {
  require_positive_density(standard_density);
  return mass_flow / standard_density;
}

double mass_flow_from_volumetric(double q, double density) {
  require_positive_density(density);
  return density * q;
}

double volumetric_flow_from_mass(double mass_flow, double density) {
  require_positive_density(density);
  return mass_flow / density;
}

double volumetric_flow_from_standard(double qn, double standard_density, double density) {
  require_positive_density(standard_density);
  require_positive_density(density);
  return standard_density * qn / density;
}

}  // namespace gasphs
