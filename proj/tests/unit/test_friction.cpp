#include <cmath>
#include <utility>

#include <gtest/gtest.h>

#include "gasphs/error.hpp"
#include "gasphs/friction.hpp"
#include "support/fixtures.hpp"

namespace gasphs {
namespace {

using testing::reference_pipe;

constexpr double kReynoldsUnitFlow = 152339.65940757428;
constexpr double kColebrookSmooth1e6 = 0.011645040997991623;
constexpr double kColebrookReference1e6 = 0.012079479082603457;
constexpr double kHoferReference1e6 = 0.01211622270638574;
constexpr double kHofer2300 = 0.047034217291402112;

/// Colebrook-White by bisection in long double on x = 1/sqrt(f).
double colebrook_bisection(double re, double relative_roughness) {
  long double lo = 0.5L, hi = 50.0L;
  auto g = [&](long double x) {
    return x + 2.0L * std::log10(2.51L * x / static_cast<long double>(re) +
                                 static_cast<long double>(relative_roughness) / 3.71L);
  };
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (g(lo) * g(mid) <= 0.0L ? hi : lo) = mid;
  }
  const long double x = 0.5L * (lo + hi);
  return static_cast<double>(1.0L / (x * x));
}

TEST(Reynolds, ZeroFlow) {
  const auto p = reference_pipe();
  EXPECT_EQ(reynolds(0.0, p.geometry, p.gas_state, p.gas), 0.0);
}

TEST(Reynolds, MatchesOracle) {
  const auto p = reference_pipe();
  EXPECT_NEAR(reynolds(1.0, p.geometry, p.gas_state, p.gas), kReynoldsUnitFlow, 1e-8);
}

TEST(Reynolds, Linear) {
  const auto p = reference_pipe();
  EXPECT_DOUBLE_EQ(reynolds(2.0, p.geometry, p.gas_state, p.gas), 2.0 * reynolds(1.0, p.geometry, p.gas_state, p.gas));
}

TEST(Laminar, IdentityPoints) {
  EXPECT_EQ(friction_laminar(64.0), 1.0);
  EXPECT_EQ(friction_laminar(32.0), 2.0);
  EXPECT_NEAR(friction_laminar(2300.0), 0.027826086956521739, 1e-17);
  EXPECT_THROW(friction_laminar(0.0), InvalidInput);
}

TEST(Laminar, ProductIs64) {
  testing::Sampler s(3);
  for (int i = 0; i < 1000; ++i) {
    const double re = s.uniform(1e-3, 2300.0);
    EXPECT_NEAR(friction_laminar(re) * re, 64.0, 64.0 * 4e-16);
  }
}

TEST(ColebrookWhite, SmoothPipeOracle) {
  PipeGeometry g = reference_pipe().geometry;
  g.roughness = 0.0;
  const auto sol = friction_colebrook_white(1e6, g);
  EXPECT_NEAR(sol.factor, kColebrookSmooth1e6, 1e-14);
  EXPECT_LT(sol.residual, 1e-12);
}

TEST(ColebrookWhite, ReferencePipeOracle) {
  const auto sol = friction_colebrook_white(1e6, reference_pipe().geometry);
  EXPECT_NEAR(sol.factor, kColebrookReference1e6, 1e-14);
}

TEST(ColebrookWhite, AgreesWithBisection) {
  testing::Sampler s(11);
  for (int i = 0; i < 200; ++i) {
    PipeGeometry g = reference_pipe().geometry;
    const double re = std::pow(10.0, s.uniform(std::log10(2300.0), 8.0));
    g.roughness = g.diameter * std::pow(10.0, s.uniform(-6.0, -2.0));
    EXPECT_NEAR(friction_colebrook_white(re, g).factor, colebrook_bisection(re, g.roughness / g.diameter), 1e-12);
  }
}

TEST(ColebrookWhite, FullyRoughLimit) {
  PipeGeometry g = reference_pipe().geometry;
  g.roughness = 0.01 * g.diameter;
  const double limit = std::pow(2.0 * std::log10(3.71 / 0.01), -2.0);
  EXPECT_NEAR(friction_colebrook_white(1e8, g).factor / limit, 1.0, 2e-3);
}

TEST(ColebrookWhite, ReportsNonConvergence) {
  ColebrookOptions o;
  o.max_iterations = 1;
  o.tolerance = 1e-300;
  EXPECT_THROW(friction_colebrook_white(1e6, reference_pipe().geometry, o), ConvergenceError);
}

TEST(Hofer, Oracles) {
  EXPECT_NEAR(friction_turbulent_hofer(1e6, reference_pipe().geometry), kHoferReference1e6, 1e-15);
  PipeGeometry g = reference_pipe().geometry;
  g.roughness = 2e-5 * g.diameter;
  const double f = friction_turbulent_hofer(2300.0, g);
  EXPECT_TRUE(std::isfinite(f));
  EXPECT_NEAR(f, kHofer2300, 1e-15);
}

TEST(Hofer, WithinOnePercentOfColebrookOnReferencePipe) {
  const auto g = reference_pipe().geometry;
  EXPECT_LT(testing::rel_diff(friction_turbulent_hofer(1e6, g), friction_colebrook_white(1e6, g).factor), 0.01);
}

// Envelope of |Hofer - CW| / CW over Re in [4e3, 1e7], from the mpmath oracle: below 1%
// up to k/D = 4.6e-4, 1.124% at k/D = 1e-3.
TEST(Hofer, DeviationEnvelopeAgainstColebrook) {
  for (const auto& [kd, bound] : {std::pair{1e-6, 0.0031}, {1e-4, 0.0068}, {4.6e-4, 0.0095}, {1e-3, 0.0113}}) {
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double re = 4e3 * std::pow(1e7 / 4e3, i / 299.0);
      PipeGeometry g = reference_pipe().geometry;
      g.roughness = kd * g.diameter;
      worst = std::max(worst, testing::rel_diff(friction_turbulent_hofer(re, g), colebrook_bisection(re, kd)));
    }
    EXPECT_LT(worst, bound) << kd;
    EXPECT_GT(worst, 0.95 * bound - 0.0005) << kd;
  }
}

TEST(Hofer, RejectsLaminarReynolds) {
  EXPECT_THROW(friction_turbulent_hofer(2000.0, reference_pipe().geometry), InvalidInput);
}

TEST(Hofer, DecreasingInReynolds) {
  const auto g = reference_pipe().geometry;
  double previous = friction_turbulent_hofer(2300.0, g);
  for (int i = 1; i <= 2000; ++i) {
    const double re = 2300.0 * std::pow(1e8 / 2300.0, i / 2000.0);
    const double f = friction_turbulent_hofer(re, g);
    ASSERT_LT(f, previous) << re;
    previous = f;
  }
}

TEST(EffectiveFriction, UnitEfficiency) {
  auto p = reference_pipe();
  p.geometry.efficiency = 1.0;
  const auto ev = effective_friction(100.0, p.geometry, p.gas_state, p.gas);
  EXPECT_EQ(*ev.effective_factor, friction_turbulent_hofer(ev.reynolds, p.geometry));
}

TEST(EffectiveFriction, ReferenceEfficiency) {
  const auto p = reference_pipe();
  const auto ev = effective_friction(100.0, p.geometry, p.gas_state, p.gas);
  EXPECT_DOUBLE_EQ(*ev.effective_factor, friction_turbulent_hofer(ev.reynolds, p.geometry) / 0.9604);
}

TEST(EffectiveFriction, ZeroFlowHasNoFactor) {
  const auto p = reference_pipe();
  const auto ev = effective_friction(0.0, p.geometry, p.gas_state, p.gas);
  EXPECT_EQ(ev.reynolds, 0.0);
  EXPECT_EQ(ev.regime, FlowRegime::kLaminar);
  EXPECT_FALSE(ev.effective_factor.has_value());
}

TEST(EffectiveFriction, RegimeSwitchAtCriticalReynolds) {
  const auto p = reference_pipe();
  const double q_crit = kCriticalReynolds / reynolds(1.0, p.geometry, p.gas_state, p.gas);
  const auto below = effective_friction(q_crit * (1.0 - 1e-9), p.geometry, p.gas_state, p.gas);
  const auto above = effective_friction(q_crit * (1.0 + 1e-9), p.geometry, p.gas_state, p.gas);
  EXPECT_EQ(below.regime, FlowRegime::kLaminar);
  EXPECT_EQ(above.regime, FlowRegime::kTurbulent);
  // documented jump between the two branches at Re = 2300
  const double jump = friction_turbulent_hofer(2300.0, p.geometry) - 64.0 / 2300.0;
  EXPECT_NEAR((*above.effective_factor - *below.effective_factor) * 0.9604, jump, 1e-8);
}

TEST(EffectiveFriction, ColebrookSelectable) {
  const auto p = reference_pipe();
  FrictionModel m;
  m.turbulent = TurbulentCorrelation::kColebrookWhite;
  const auto ev = effective_friction(100.0, p.geometry, p.gas_state, p.gas, m);
  EXPECT_DOUBLE_EQ(*ev.effective_factor, friction_colebrook_white(ev.reynolds, p.geometry).factor / 0.9604);
}

TEST(EffectiveFriction, BlendingIsContinuous) {
  const auto p = reference_pipe();
  FrictionModel m;
  m.transition_width = 1000.0;
  const double per_re = 1.0 / reynolds(1.0, p.geometry, p.gas_state, p.gas);
  const auto at_start = effective_friction(2300.0 * per_re * (1.0 + 1e-12), p.geometry, p.gas_state, p.gas, m);
  const auto at_end = effective_friction(3300.0 * per_re * (1.0 - 1e-12), p.geometry, p.gas_state, p.gas, m);
  EXPECT_NEAR(*at_start.effective_factor * 0.9604, 64.0 / 2300.0, 1e-9);
  EXPECT_NEAR(*at_end.effective_factor * 0.9604, friction_turbulent_hofer(3300.0, p.geometry), 1e-9);
  EXPECT_EQ(effective_friction(2800.0 * per_re, p.geometry, p.gas_state, p.gas, m).regime, FlowRegime::kTransition);
}

TEST(EffectiveFriction, FrictionTimesFlowNonDecreasing) {
  testing::Sampler s(5);
  for (int cfg = 0; cfg < 20; ++cfg) {
    const auto p = s.pipe();
    double previous = 0.0;
    for (int i = 1; i <= 4000; ++i) {
      const double q = 300.0 * i / 4000.0;
      const auto ev = effective_friction(q, p.geometry, p.gas_state, p.gas);
      const double v = *ev.effective_factor * q;
      ASSERT_GE(v, previous * (1.0 - 1e-12)) << "q=" << q;
      previous = v;
    }
  }
}

TEST(LaminarDamping, InverseInMeanPressure) {
  const auto p = reference_pipe();
  const double r1 = laminar_damping(p.geometry, p.gas_state, p.gas, 40.0 * testing::kBar);
  const double r2 = laminar_damping(p.geometry, p.gas_state, p.gas, 80.0 * testing::kBar);
  EXPECT_DOUBLE_EQ(r1, 2.0 * r2);
}

TEST(LaminarDamping, MatchesOracle) {
  const auto p = reference_pipe();
  EXPECT_NEAR(laminar_damping(p.geometry, p.gas_state, p.gas, 50.0 * testing::kBar), 5.9622256114134969, 1e-12);
}

TEST(LaminarDamping, EfficiencyScaling) {
  auto p = reference_pipe();
  const double r098 = laminar_damping(p.geometry, p.gas_state, p.gas, 50.0 * testing::kBar);
  p.geometry.efficiency = 1.0;
  const double r1 = laminar_damping(p.geometry, p.gas_state, p.gas, 50.0 * testing::kBar);
  EXPECT_NEAR(r1 / r098, 0.9604, 1e-15);
}

TEST(LaminarDamping, RejectsNonPositiveMeanPressure) {
  const auto p = reference_pipe();
  EXPECT_THROW(laminar_damping(p.geometry, p.gas_state, p.gas, 0.0), ModelValidityError);
}

TEST(PipeGeometry, Validation) {
  PipeGeometry g = reference_pipe().geometry;
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.area(), kPi * 0.36 / 4.0);
  g.efficiency = 1.1;
  EXPECT_THROW(g.validate(), InvalidInput);
  g = reference_pipe().geometry;
  g.roughness = -1.0;
  EXPECT_THROW(g.validate(), InvalidInput);
  g = reference_pipe().geometry;
  g.length = 0.0;
  EXPECT_THROW(g.validate(), InvalidInput);
}

}  // namespace
}  // namespace gasphs
