#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gasphs/error.hpp"

namespace gasphs {

enum class OdeMethod {
  kDormandPrince45,       ///< explicit embedded RK 4(5), dense output of order 4
  kImplicitTrapezoidal,   ///< trapezoidal rule, Newton inner solves, step-doubling error estimate
};

struct OdeOptions {
  OdeMethod method = OdeMethod::kDormandPrince45;
  double rtol = 1e-6;
  double atol = 1e-6;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  ///< 0 selects a starting step automatically
  std::size_t max_steps = 5'000'000;
};

/// dy/dt = f(t, y). Only the first `controlled` components enter the error norm; the
/// remaining ones are carried along (quadratures). Errors are measured on
/// `error_scale .* y`, so atol/rtol apply to scaled units.
struct OdeSystem {
  std::size_t controlled = 0;
  Eigen::VectorXd error_scale;
  std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)> rhs;
  /// Called after every accepted step; throwing aborts the integration.
  std::function<void(double, const Eigen::VectorXd&)> on_accept;
};

struct OdeStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  std::size_t jacobian_evaluations = 0;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  OdeStats stats;
};

class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Integrates from `t0` to the last output time, reporting the solution at every entry of
/// `output_times` (sorted, >= t0). Steps land exactly on each breakpoint in (t0, t_end),
/// where the right-hand side may have a kink. A ModelValidityError thrown by the
/// right-hand side rejects the step and retries with a smaller one.
OdeSolution integrate_ode(const OdeSystem& system, double t0, const Eigen::VectorXd& y0,
                          std::span<const double> output_times, std::span<const double> breakpoints,
                          const OdeOptions& options);

}  // namespace gasphs
