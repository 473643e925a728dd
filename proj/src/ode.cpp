#include "gasphs/ode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gasphs {

namespace {

using Eigen::VectorXd;

// Dormand-Prince 5(4) tableau with the order-4 continuous extension.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0, kA75 = -2187.0 / 6784.0,
                 kA76 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
constexpr double kD1 = -12715105075.0 / 11282082432.0, kD3 = 87487479700.0 / 32700410799.0,
                 kD4 = -10690763975.0 / 1880347072.0, kD5 = 701980252875.0 / 199316789632.0,
                 kD6 = -1453857185.0 / 822651844.0, kD7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

/// Interpolant over the last accepted step.
struct DenseStep {
  double t_old = 0.0;
  double h = 0.0;
  bool hermite = false;
  VectorXd r1, r2, r3, r4, r5;  // DOPRI: Hairer's contd5 coefficients; Hermite: y0, y1, f0, f1

  VectorXd operator()(double t) const {
    const double theta = (t - t_old) / h;
    const double theta1 = 1.0 - theta;
    if (!hermite) return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
    const double h00 = (1.0 + 2.0 * theta) * theta1 * theta1;
    const double h10 = theta * theta1 * theta1;
    const double h01 = theta * theta * (3.0 - 2.0 * theta);
    const double h11 = -theta * theta * theta1;
    return h00 * r1 + h01 * r2 + h * (h10 * r3 + h11 * r4);
  }
};

class Driver {
public:
  Driver(const OdeSystem& system, const OdeOptions& options) : sys_(system), opt_(options) {}

  void eval(double t, const VectorXd& y, VectorXd& out) {
    out.resize(y.size());
    ++stats.rhs_evaluations;
    sys_.rhs(t, y, out);
  }

  double weight(std::size_t i, double a, double b) const {
    const double s = sys_.error_scale(static_cast<Eigen::Index>(i));
    return opt_.atol + opt_.rtol * std::max(std::abs(a * s), std::abs(b * s));
  }

  double error_norm(const VectorXd& y, const VectorXd& y_new, const VectorXd& err) const {
    if (sys_.controlled == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < sys_.controlled; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double e = err(k) * sys_.error_scale(k) / weight(i, y(k), y_new(k));
      sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(sys_.controlled));
  }

  double initial_step(double t, const VectorXd& y, const VectorXd& f0, double span) {
    if (opt_.initial_step > 0.0) return std::min(opt_.initial_step, span);
    const double d0 = error_norm(y, y, y);
    const double d1 = error_norm(y, y, f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min({h0, opt_.max_step, span});
    double h1 = 0.0;
    try {
      VectorXd f1;
      eval(t + h0, y + h0 * f0, f1);
      const double d2 = error_norm(y, y, (f1 - f0) / h0);
      const double dm = std::max(d1, d2);
      h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    } catch (const ModelValidityError&) {
      h1 = h0 * 1e-2;
    }
    return std::min({100.0 * h0, h1, opt_.max_step, span});
  }

  VectorXd jacobian_column_step(const VectorXd& y) const {
    VectorXd delta(y.size());
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double unit = static_cast<std::size_t>(i) < sys_.controlled ? 1.0 / sys_.error_scale(i) : 1.0;
      delta(i) = root_eps * std::max(std::abs(y(i)), unit);
    }
    return delta;
  }

  Eigen::MatrixXd jacobian(double t, const VectorXd& y, const VectorXd& f0) {
    ++stats.jacobian_evaluations;
    const VectorXd delta = jacobian_column_step(y);
    Eigen::MatrixXd jac(y.size(), y.size());
    VectorXd yp = y;
    VectorXd fp;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      yp(i) = y(i) + delta(i);
      eval(t, yp, fp);
      jac.col(i) = (fp - f0) / delta(i);
      yp(i) = y(i);
    }
    return jac;
  }

  /// One trapezoidal step with a Newton solve; empty when Newton fails.
  std::optional<VectorXd> trapezoid(double t, const VectorXd& y, const VectorXd& f_y, double h,
                                    const Eigen::MatrixXd& jac) {
    const Eigen::Index n = y.size();
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - 0.5 * h * jac;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    VectorXd z = y + h * f_y;
    VectorXd fz;
    for (int it = 0; it < 10; ++it) {
      eval(t + h, z, fz);
      const VectorXd residual = z - y - 0.5 * h * (f_y + fz);
      const VectorXd dz = lu.solve(-residual);
      z += dz;
      if (error_norm(z, z, dz) < 1e-3) return z;
    }
    return std::nullopt;
  }

  OdeStats stats;

private:
  const OdeSystem& sys_;
  const OdeOptions& opt_;
};

}  // namespace

OdeSolution integrate_ode(const OdeSystem& system, double t0, const Eigen::VectorXd& y0,
                          std::span<const double> output_times, std::span<const double> breakpoints,
                          const OdeOptions& options) {
  if (output_times.empty()) throw InvalidInput("integrate_ode needs at least one output time");
  if (!std::is_sorted(output_times.begin(), output_times.end()) || output_times.front() < t0) {
    throw InvalidInput("output times must be sorted and not precede the initial time");
  }
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw InvalidInput("rtol and atol must be positive");
  if (!(options.max_step > 0.0)) throw InvalidInput("max step must be positive");
  if (system.controlled > static_cast<std::size_t>(y0.size()) ||
      static_cast<std::size_t>(system.error_scale.size()) != system.controlled) {
    throw InvalidInput("error scale must cover exactly the controlled components");
  }

  const double t_end = output_times.back();
  std::vector<double> segment_ends;
  for (const double b : breakpoints) {
    if (b > t0 && b < t_end) segment_ends.push_back(b);
  }
  std::sort(segment_ends.begin(), segment_ends.end());
  segment_ends.erase(std::unique(segment_ends.begin(), segment_ends.end()), segment_ends.end());
  segment_ends.push_back(t_end);

  Driver drv(system, options);
  OdeSolution sol;
  sol.times.reserve(output_times.size());
  sol.values.reserve(output_times.size());
  std::size_t next_output = 0;
  auto emit_until = [&](double t_new, const VectorXd& y_new, const DenseStep* dense) {
    while (next_output < output_times.size() && output_times[next_output] <= t_new) {
      const double t_out = output_times[next_output];
      sol.times.push_back(t_out);
      sol.values.push_back(t_out == t_new || dense == nullptr ? y_new : (*dense)(t_out));
      ++next_output;
    }
  };

  double t = t0;
  VectorXd y = y0;
  emit_until(t0, y0, nullptr);
  if (t_end <= t0) {
    sol.stats = drv.stats;
    return sol;
  }

  const bool explicit_method = options.method == OdeMethod::kDormandPrince45;
  const double order_exponent = explicit_method ? 1.0 / 5.0 : 1.0 / 3.0;
  VectorXd f;
  drv.eval(t, y, f);
  double h = drv.initial_step(t, y, f, t_end - t0);
  std::size_t steps = 0;

  VectorXd k2, k3, k4, k5, k6, k7, y_stage, y_new, err;
  DenseStep dense;

  for (const double seg_end : segment_ends) {
    if (t > t0) drv.eval(t, y, f);  // restart the FSAL stage at a kink
    bool rejected_last = false;
    while (t < seg_end) {
      if (++steps > options.max_steps) throw IntegrationError("maximum number of steps exceeded", t);
      h = std::min(h, options.max_step);
      bool last = false;
      if (t + 1.01 * h >= seg_end) {
        h = seg_end - t;
        last = true;
      }
      const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
      if (h < min_step) throw IntegrationError("step size underflow", t);

      double err_norm = 0.0;
      bool stage_failed = false;
      try {
        if (explicit_method) {
          drv.eval(t + kC2 * h, y + h * kA21 * f, k2);
          drv.eval(t + kC3 * h, y + h * (kA31 * f + kA32 * k2), k3);
          drv.eval(t + kC4 * h, y + h * (kA41 * f + kA42 * k2 + kA43 * k3), k4);
          drv.eval(t + kC5 * h, y + h * (kA51 * f + kA52 * k2 + kA53 * k3 + kA54 * k4), k5);
          drv.eval(t + h, y + h * (kA61 * f + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5), k6);
          y_new = y + h * (kA71 * f + kA73 * k3 + kA74 * k4 + kA75 * k5 + kA76 * k6);
          drv.eval(t + h, y_new, k7);
          err = h * (kE1 * f + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
          err_norm = drv.error_norm(y, y_new, err);
        } else {
          const Eigen::MatrixXd jac = drv.jacobian(t, y, f);
          const auto full = drv.trapezoid(t, y, f, h, jac);
          const auto half = full ? drv.trapezoid(t, y, f, 0.5 * h, jac) : std::nullopt;
          std::optional<VectorXd> two;
          if (half) {
            drv.eval(t + 0.5 * h, *half, k2);
            two = drv.trapezoid(t + 0.5 * h, *half, k2, 0.5 * h, jac);
          }
          if (!two) {
            stage_failed = true;
          } else {
            y_new = *two;
            err = (y_new - *full) / 3.0;
            err_norm = drv.error_norm(y, y_new, err);
            drv.eval(t + h, y_new, k7);
          }
        }
      } catch (const ModelValidityError&) {
        stage_failed = true;
      }

      if (stage_failed || !std::isfinite(err_norm)) {
        ++drv.stats.rejected_steps;
        h *= 0.25;
        rejected_last = true;
        continue;
      }

      if (err_norm > 1.0) {
        ++drv.stats.rejected_steps;
        h *= std::max(kMinFactor, kSafety * std::pow(err_norm, -order_exponent));
        rejected_last = true;
        continue;
      }

      const double t_new = last ? seg_end : t + h;
      dense.t_old = t;
      dense.h = t_new - t;
      if (explicit_method) {
        dense.hermite = false;
        dense.r1 = y;
        dense.r2 = y_new - y;
        dense.r3 = h * f - dense.r2;
        dense.r4 = dense.r2 - h * k7 - dense.r3;
        dense.r5 = h * (kD1 * f + kD3 * k3 + kD4 * k4 + kD5 * k5 + kD6 * k6 + kD7 * k7);
      } else {
        dense.hermite = true;
        dense.r1 = y;
        dense.r2 = y_new;
        dense.r3 = f;
        dense.r4 = k7;
      }
      emit_until(t_new, y_new, &dense);
      ++drv.stats.accepted_steps;
      if (system.on_accept) system.on_accept(t_new, y_new);

      double factor = err_norm == 0.0 ? kMaxFactor : kSafety * std::pow(err_norm, -order_exponent);
      factor = std::clamp(factor, kMinFactor, rejected_last ? 1.0 : kMaxFactor);
      rejected_last = false;
      t = t_new;
      y = y_new;
      f = k7;
      if (!last) h *= factor;
      else h = std::max(h * factor, h);
    }
  }
  sol.stats = drv.stats;
  return sol;
}

}  // namespace gasphs
