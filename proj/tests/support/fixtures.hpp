#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "gasphs/constants.hpp"
#include "gasphs/network.hpp"
#include "gasphs/pipeline.hpp"

namespace gasphs::testing {

inline constexpr double kBar = units::kPaPerBar;

/// Table 1 pipe of the given length, gas frozen at 50 bar.
inline PipeParams reference_pipe(double length = 100e3, double inclination_sin = 0.0) {
  PipeParams p;
  p.gas = GasProperties::natural_gas();
  p.gas_state = freeze_gas_state(p.gas, 50.0 * kBar);
  p.geometry.length = length;
  p.geometry.diameter = 0.6;
  p.geometry.roughness = 0.012e-3;
  p.geometry.efficiency = 0.98;
  p.geometry.inclination_sin = inclination_sin;
  return p;
}

class Sampler {
public:
  explicit Sampler(std::uint64_t seed = 12345) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  /// Pipe with random geometry; lengths 1-200 km, inclination within +-0.02.
  PipeParams pipe() {
    PipeParams p = reference_pipe(uniform(1e3, 200e3), uniform(-0.02, 0.02));
    p.geometry.diameter = uniform(0.2, 1.4);
    p.geometry.roughness = uniform(0.0, 0.1e-3);
    p.geometry.efficiency = uniform(0.9, 1.0);
    return p;
  }

  /// Admissible co-state: pressures 5-90 bar, flows covering both regimes and signs.
  PipelineState state() {
    const double magnitude = coin() ? uniform(0.0, 0.05) : uniform(0.0, 200.0);
    return {uniform(5.0, 90.0) * kBar, uniform(5.0, 90.0) * kBar, coin() ? magnitude : -magnitude};
  }

  /// Connected random graph: a random tree plus `extra` chords, elevations within +-300 m.
  NetworkTopology topology(std::size_t nodes, std::size_t extra) {
    NetworkTopology topo;
    for (std::size_t i = 0; i < nodes; ++i) {
      NetworkNode n;
      n.id = "n" + std::to_string(i);
      n.elevation = uniform(-300.0, 300.0);
      n.initial_pressure = 50.0 * kBar;
      topo.add_node(n);
    }
    std::size_t edge = 0;
    auto add = [&](std::size_t a, std::size_t b) {
      PipeGeometry g;
      g.length = uniform(10e3, 120e3);
      g.diameter = uniform(0.4, 1.0);
      g.roughness = 0.012e-3;
      g.efficiency = 0.98;
      topo.add_pipe("e" + std::to_string(edge++), "n" + std::to_string(a), "n" + std::to_string(b), g);
    };
    for (std::size_t i = 1; i < nodes; ++i) {
      if (coin()) add(index(i), i);
      else add(i, index(i));
    }
    for (std::size_t k = 0; k < extra; ++k) {
      const std::size_t a = index(nodes);
      const std::size_t b = index(nodes);
      if (a != b) add(a, b);
    }
    return topo;
  }

  /// Random admissible co-state for a network model.
  Eigen::VectorXd costate(const NetworkPhs& phs) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(phs.state_dimension()));
    for (std::size_t k = 0; k < phs.demand_count(); ++k) e(static_cast<Eigen::Index>(k)) = uniform(5.0, 90.0) * kBar;
    for (std::size_t j = 0; j < phs.edge_count(); ++j) {
      e(static_cast<Eigen::Index>(phs.edge_offset() + j)) = uniform(-150.0, 150.0);
    }
    return e;
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

/// |a - b| / max(|a|, |b|, floor).
inline double rel_diff(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace gasphs::testing
