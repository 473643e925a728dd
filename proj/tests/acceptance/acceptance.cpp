// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gasphs/analysis.hpp"
#include "gasphs/cli.hpp"
#include "gasphs/friction.hpp"
#include "gasphs/gas.hpp"
#include "gasphs/network.hpp"
#include "gasphs/pipeline.hpp"
#include "gasphs/scenario_io.hpp"
#include "gasphs/sim.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace gasphs;
using gasphs::testing::kBar;
using gasphs::testing::rel_diff;
using gasphs::testing::Sampler;
using gasphs::testing::reference_pipe;

namespace fs = std::filesystem;

const fs::path kScenarios{GASPHS_SCENARIO_DIR};

// mpmath reference, tests/oracles/compute_oracles.py
constexpr double kZ50Oracle = 0.88046502296454306;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Eigen::VectorXd random_injections(Sampler& s, const NetworkPhs& phs) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(phs.demand_count()));
  for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = s.uniform(-80, 80);
  return u;
}

Outcome structure_checks() {
  Sampler s(101);
  bool skew = true, storage = true, psd = true;
  for (int i = 0; i < 50; ++i) {
    const auto phs = build_pipeline_phs(s.pipe(), s.uniform(10, 80) * kBar);
    skew = skew && (phs.interconnection() + phs.interconnection().transpose()).isZero(0.0);
    storage = storage && (phs.storage().diagonal().array() > 0.0).all() &&
              (phs.storage() - Eigen::Matrix3d(phs.storage().diagonal().asDiagonal())).isZero(0.0);
  }
  int networks = 0;
  for (std::size_t n = 2; n <= 50; ++n) {
    const auto topo = s.topology(n, s.index(8));
    const FrozenGasState gs = freeze_gas_state(GasProperties::natural_gas(), 50 * kBar);
    const auto full = assemble_network_phs(topo, GasProperties::natural_gas(), gs,
                                           std::vector<double>(topo.edge_count(), 50 * kBar));
    for (const auto& phs : {full, apply_supply_node(full, s.index(n), 55 * kBar)}) {
      const auto st = phs.structure();
      skew = skew && (st.interconnection + st.interconnection.transpose()).isZero(0.0);
      storage = storage && (st.storage.array() > 0.0).all();
      ++networks;
    }
  }
  const auto net = apply_supply_node(
      assemble_network_phs(s.topology(20, 6), GasProperties::natural_gas(),
                           freeze_gas_state(GasProperties::natural_gas(), 50 * kBar), std::vector<double>(25, 50 * kBar)),
      0, 60 * kBar);
  double min_eig = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto params = s.pipe();
    const auto phs = build_pipeline_phs(params, 50 * kBar);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(phs.dissipation(s.state().vector()));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    min_eig = std::min(min_eig, net.dissipation_diagonal(s.costate(net)).minCoeff());
  }
  psd = min_eig >= 0.0;
  return {skew && storage && psd,
          "J+J^T=0 " + std::string(skew ? "exact" : "VIOLATED") + ", Q>0 " + (storage ? "yes" : "NO") + " on 50 pipes and " +
              std::to_string(networks) + " networks, min eig R over 1e4 states " + fmt("%.3g", min_eig)};
}

Outcome model_form_consistency() {
  Sampler s(102);
  double worst_lumped = 0.0, worst_network = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto params = s.pipe();
    const double pm = s.uniform(10, 80) * kBar;
    const auto phs = build_pipeline_phs(params, pm);
    const PipelineState st = s.state();
    const double qnl = s.uniform(-100, 100), qnr = s.uniform(-100, 100);
    const Eigen::Vector3d mono = phs.costate_rate(st.vector(), {qnl, -qnr});
    const PressureRates mass = lumped_mass_rhs(st, qnl, qnr, params);
    const double momentum = lumped_momentum_rhs(st, params, pm);
    worst_lumped = std::max({worst_lumped, rel_diff(mono(0), mass.left), rel_diff(mono(1), mass.right),
                             rel_diff(mono(2), momentum)});
  }
  for (int i = 0; i < 1000; ++i) {
    NetworkTopology t;
    const double length = s.uniform(10e3, 150e3);
    t.add_node({"a", 0.0, NodeKind::kDemand, 0.0, 50 * kBar});
    t.add_node({"b", s.uniform(-0.01, 0.01) * length, NodeKind::kDemand, 0.0, 50 * kBar});
    PipeGeometry g = reference_pipe(length).geometry;
    g.diameter = s.uniform(0.3, 1.2);
    t.add_pipe("ab", "a", "b", g);
    const double pm = s.uniform(10, 80) * kBar;
    const auto gs = freeze_gas_state(GasProperties::natural_gas(), 50 * kBar);
    const auto net = assemble_network_phs(t, GasProperties::natural_gas(), gs, {pm});
    const auto pipe = build_pipeline_phs(net.edge_params(0), pm);
    const PipelineState st = s.state();
    const Eigen::Vector2d u(s.uniform(-100, 100), s.uniform(-100, 100));
    const Eigen::Vector3d a = pipe.costate_rate(st.vector(), u);
    const Eigen::VectorXd b = net.costate_rate(st.vector(), u);
    for (int k = 0; k < 3; ++k) worst_network = std::max(worst_network, rel_diff(a(k), b(k)));
  }
  return {worst_lumped <= 1e-12 && worst_network <= 1e-13,
          fmt("PHS vs lumped %.2e (tol 1e-12), one-edge network vs pipeline %.2e (tol 1e-13)", worst_lumped,
              worst_network)};
}

Outcome split_equivalence() {
  Sampler s(103);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto params = s.pipe();
    const double pm = s.uniform(10, 80) * kBar;
    const auto phs = build_pipeline_phs(params, pm);
    const PipelineState st = s.state();
    const double qnl = s.uniform(-100, 100), qnr = s.uniform(-100, 100);
    const Eigen::Vector3d mono = phs.costate_rate(st.vector(), {qnl, -qnr});
    const auto left = split_c_rhs(st.pl, qnl, st.qnm, PipeSide::kLeft, params);
    const auto right = split_c_rhs(st.pr, qnr, st.qnm, PipeSide::kRight, params);
    const double mid = split_rl_rhs(st.qnm, left.output, right.output, params, pm);
    worst = std::max({worst, rel_diff(left.pressure_rate, mono(0)), rel_diff(right.pressure_rate, mono(1)),
                      rel_diff(mid, mono(2))});
  }
  return {worst <= 1e-14, fmt("split RL+C vs monolithic %.2e (tol 1e-14)", worst)};
}

Outcome friction_oracle() {
  double worst = 0.0, worst_re = 0.0, worst_kd = 0.0;
  int points = 0;
  for (int i = 0; i < 25; ++i) {
    const double re = 4e3 * std::pow(1e7 / 4e3, i / 24.0);
    for (int j = 0; j < 10; ++j) {
      const double kd = 1e-6 * std::pow(1e3, j / 9.0);
      PipeGeometry g;
      g.length = 1e3;
      g.diameter = 0.5;
      g.roughness = kd * g.diameter;
      ColebrookOptions opt;
      opt.tolerance = 1e-12;
      const double cw = friction_colebrook_white(re, g, opt).factor;
      const double err = std::abs(friction_turbulent_hofer(re, g) - cw) / cw;
      if (err > worst) {
        worst = err;
        worst_re = re;
        worst_kd = kd;
      }
      ++points;
    }
  }
  return {worst < 0.01 && points >= 200,
          fmt("%.0f points, max |Hofer-CW|/CW = %.3f%% at Re %.3g", static_cast<double>(points), 100 * worst, worst_re) +
              fmt(", k/D %.1e", worst_kd)};
}

Outcome mean_pressure_checks() {
  Sampler s(105);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double pl = s.uniform(1, 100) * kBar, pr = s.uniform(1, 100) * kBar;
    if (pl == pr) continue;
    worst = std::max(worst, rel_diff(mean_pressure(pl, pr), mean_pressure_cubic_ratio(pl, pr)));
  }
  const double pm21 = mean_pressure(2 * kBar, 1 * kBar);
  const double err21 = rel_diff(pm21, 14.0 / 9.0 * kBar);
  bool equal_ok = true;
  for (const double p : {1.0, 3.7e5, 50e5, 1e7}) equal_ok = equal_ok && mean_pressure(p, p) == p;
  return {worst <= 1e-13 && err21 <= 1e-15 && equal_ok,
          fmt("forms agree to %.2e, pM(2,1 bar) = %.15g bar (rel err %.1e)", worst, pm21 / kBar, err21) +
              (equal_ok ? ", pM(p,p) = p" : ", pM(p,p) != p")};
}

Outcome papay_checks() {
  const GasProperties gas = GasProperties::natural_gas();
  bool zero_ok = true;
  for (const double t : {200.0, 278.0, 350.0}) zero_ok = zero_ok && papay_compressibility(0.0, t, gas) == 1.0;
  const double z50 = papay_compressibility(50 * kBar, 278.0, gas);
  const FrozenGasState gs = freeze_gas_state(gas, 50 * kBar);
  const double c2_err = rel_diff(gs.speed_of_sound_sq, gs.compressibility * gas.specific_gas_constant * 278.0);
  const double c_err = rel_diff(gs.speed_of_sound() * gs.speed_of_sound(), gs.speed_of_sound_sq);
  const bool ok = zero_ok && std::abs(z50 - 0.8804) <= 1e-3 && std::abs(z50 - kZ50Oracle) <= 1e-14 &&
                  c2_err <= 1e-15 && c_err <= 1e-15;
  return {ok, std::string(zero_ok ? "Z(0,T) = 1" : "Z(0,T) != 1") +
                  fmt(", Z(50 bar, 278 K) = %.17g (oracle diff %.1e)", z50, std::abs(z50 - kZ50Oracle)) +
                  fmt(", c = %.6f m/s, c^2 vs Z R T %.1e", gs.speed_of_sound(), c2_err)};
}

Outcome energy_balance_check() {
  const Scenario s = parse_scenario(kScenarios / "single_pipe_step.scn");
  const auto r = simulate(s);
  if (!r.trajectory.ok()) return {false, "run failed: " + r.trajectory.failure->message};
  const bool level = std::all_of(r.energy.samples.begin(), r.energy.samples.end(),
                                 [](const EnergySample& e) { return e.disturbance_power == 0.0; });
  return {r.energy.normalized_residual < 1e-6 && r.energy.passive && level,
          fmt("rtol %.0e: normalized residual %.2e, min dissipation %.3g", s.sim.solver.rtol,
              r.energy.normalized_residual, r.energy.min_dissipation) +
              (r.energy.passive ? ", passive" : ", NOT passive")};
}

std::vector<BenchmarkCase>& benchmark() {
  static std::vector<BenchmarkCase> cases = run_benchmark();
  return cases;
}

Outcome mass_conservation() {
  double worst = 0.0;
  for (const auto& c : benchmark()) {
    if (!c.ok) return {false, "h1 = " + fmt("%.0f", c.h1) + " failed: " + c.message};
    worst = std::max(worst, c.mass_balance_error);
  }
  return {worst < 1e-6, fmt("max relative linepack mismatch %.2e over %.0f benchmark runs", worst,
                            2.0 * static_cast<double>(benchmark().size()))};
}

Outcome appendix_checks() {
  Sampler s(109);
  double worst_eig = 0.0, worst_weight = 0.0;
  bool range_ok = true;
  for (int i = 0; i < 1000; ++i) {
    auto params = s.pipe();
    params.geometry.inclination_sin = s.uniform(-0.5, 0.5);
    const PipelineState st = s.state();
    const Eigen::Matrix3d a = variable_pm_state_matrix(params, st);
    const auto rep = stability_report(params, st);
    const Eigen::EigenSolver<Eigen::Matrix3d> es(a, false);
    std::vector<std::complex<double>> numeric(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    std::vector<std::complex<double>> closed(rep.eigenvalues.begin(), rep.eigenvalues.end());
    auto order = [](auto x, auto y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
    std::sort(numeric.begin(), numeric.end(), order);
    std::sort(closed.begin(), closed.end(), order);
    for (int k = 0; k < 3; ++k) {
      worst_eig = std::max(worst_eig, std::abs(closed[k] - numeric[k]) / std::max(1.0, std::abs(numeric[k])));
    }
    const auto w = pressure_weights(st.pl, st.pr);
    range_ok = range_ok && w.kl > 1.0 / 3.0 && w.kl < 2.0 / 3.0 && w.kr > 1.0 / 3.0 && w.kr < 2.0 / 3.0;
    worst_weight = std::max(worst_weight, rel_diff(w.kl * st.pl + w.kr * st.pr, mean_pressure(st.pl, st.pr)));
  }
  auto params = reference_pipe();
  params.gas_state.speed_of_sound_sq = 300.0 * 300.0;
  const double threshold_km = check_stability_condition(params, 9.805).threshold / 1e3;
  return {worst_eig <= 1e-10 && range_ok && worst_weight <= 1e-13 && std::abs(threshold_km - 55.07) <= 0.01,
          fmt("eigenvalues vs numeric %.2e, weight identity %.2e, 6c^2/g = %.4f km", worst_eig, worst_weight,
              threshold_km) +
              (range_ok ? ", kl,kr in (1/3,2/3)" : ", weights OUT of range")};
}

Outcome variant_agreement() {
  bool ok = true;
  std::string detail;
  for (const auto& c : benchmark()) {
    if (!c.ok) return {false, "h1 = " + fmt("%.0f", c.h1) + " failed: " + c.message};
    const double limit = std::abs(c.h1) == 0.0 ? 0.002 : 0.01;
    const bool pass = c.max_pressure_deviation < limit;
    ok = ok && pass;
    detail += fmt("%+.0f m: %.3f%%", c.h1, 100 * c.max_pressure_deviation) + (pass ? "" : " (over limit)") + "; ";
  }
  detail += "limits 0.2% level, 1% at +-1 km";
  return {ok, detail};
}

Outcome ofp_bound() {
  std::vector<double> grid;
  for (int k = 0; k <= 4000; ++k) grid.push_back(200.0 * k / 4000.0);
  bool ok = true;
  double tightest = INFINITY;
  for (const double length : {80e3, 100e3}) {
    for (const double pm_bar : {20.0, 50.0, 80.0}) {
      const auto check = verify_ofp_bound(reference_pipe(length), pm_bar * kBar, grid);
      ok = ok && check.lower_bound_holds && check.monotone;
      tightest = std::min(tightest, check.min_sampled_resistance / check.index);
    }
  }
  return {ok, fmt("min sampled R_m / laminar bound = %.6f over 6 cases x %.0f flows", tightest,
                  static_cast<double>(grid.size())) +
                  (ok ? ", non-decreasing" : ", bound or monotonicity VIOLATED")};
}

Outcome reproducibility() {
  const fs::path base = fs::temp_directory_path() / "gasphs_acceptance_repro";
  fs::remove_all(base);
  const std::string scn = (kScenarios / "three_node.scn").string();
  std::string csv[2];
  for (int k = 0; k < 2; ++k) {
    const std::string out = (base / std::to_string(k)).string();
    const char* argv[] = {"gasphs", "simulate", "--scenario", scn.c_str(), "--out", out.c_str()};
    std::ostringstream o, e;
    if (run_cli(6, argv, o, e) != 0) return {false, "simulate failed: " + e.str()};
    std::ifstream in(fs::path(out) / "trajectory.csv", std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    csv[k] = buf.str();
  }
  fs::remove_all(base);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, std::to_string(csv[0].size()) + " bytes of trajectory.csv, " + (same ? "identical" : "DIFFERENT") +
                    ", sha256 " + sha256_hex(csv[0]).substr(0, 16)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"structure checks", structure_checks},
      {"model form consistency", model_form_consistency},
      {"split model equivalence", split_equivalence},
      {"friction oracle", friction_oracle},
      {"mean pressure", mean_pressure_checks},
      {"real gas closure", papay_checks},
      {"energy balance", energy_balance_check},
      {"mass conservation", mass_conservation},
      {"variable mean pressure eigenvalues", appendix_checks},
      {"model variant agreement", variant_agreement},
      {"OFP bound", ofp_bound},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %-36s [%7.2f s] %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
