// SPDX-License-Identifier: Apache-2.0
#include "dsa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/parallel.hpp"
#include "dsa/random.hpp"

namespace dsa {

Scenario::Scenario(ScenarioConfig c) : cfg(std::move(c)) {
  geometry = build_geometry(cfg);
  impedance = assemble_impedance(geometry);
}

Scenario::Scenario(ScenarioConfig c, DsaGeometry g)
    : cfg(std::move(c)), geometry(std::move(g)) {
  geometry.validate();
  impedance = assemble_impedance(geometry);
}

CMatrix conjugate_steering_weights(const CMatrix& hc_row, double R) {
  CMatrix w = hc_row.adjoint();
  const double n = w.norm();
  if (!(n > 0.0)) throw DomainError("steering row is zero");
  return w * (std::sqrt(R) / n);
}

int steering_index(double steer_deg, int k) {
  double wrapped = std::fmod(steer_deg, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  return static_cast<int>(std::lround(wrapped / 360.0 * k)) % k;
}

namespace {

OptProblem base_problem(const Scenario& sc) {
  OptProblem p;
  p.partition = sc.impedance.partition;
  p.R = sc.cfg.reference_resistance_ohm;
  p.ni = sc.cfg.optimizer.ni;
  p.nalt = sc.cfg.optimizer.nalt;
  p.init = sc.cfg.optimizer.init;
  p.seed = sc.cfg.optimizer.seed;
  p.variant = sc.cfg.optimizer.variant;
  p.digital_precoding = sc.cfg.optimizer.digital_precoding;
  return p;
}

}  // namespace

BeamsteerRun run_beamsteer(const Scenario& sc, double steer_deg, int threads) {
  const ScenarioConfig& cfg = sc.cfg;
  const DsaGeometry& g = sc.geometry;
  const double R = cfg.reference_resistance_ohm;
  BeamsteerRun out;
  out.steer_deg = steer_deg;
  const int K = cfg.usecase.test_points;
  out.ring = build_test_ring(K, cfg.usecase.distance_m, Carrier{g.f0, g.lambda},
                             cfg.rx_gain_linear());
  out.k_star = steering_index(steer_deg, K);
  out.hc = transimpedance_farfield(g, out.ring).Hc;
  const TargetSpec target = target_beamsteer(K, out.k_star, cfg.usecase.prx_w);

  if (g.ns() == 0) {
    out.baseline = true;
    const TestPointSet steer = build_test_points_deg(
        {steer_deg}, cfg.usecase.distance_m, Carrier{g.f0, g.lambda},
        cfg.rx_gain_linear());
    const CMatrix row = transimpedance_farfield(g, steer).Hc;
    out.solution.Wd_hat = conjugate_steering_weights(row, R);
    out.solution.theta_hat = RVector(0);
    out.solution.converged = true;
    out.solution.stop_reason = "baseline";
  } else {
    OptProblem p = base_problem(sc);
    p.Hc = out.hc;
    p.Hopt = target.Hopt;
    p.variant = ObjectiveVariant::Direct;
    out.solution = alternate_optimize(p);
  }
  const NetworkState s(sc.impedance.partition,
                       LoadVector(out.solution.theta_hat), R);
  out.pattern = gain_pattern(s, g, out.solution.Wd_hat,
                             degree_grid(cfg.pattern.step_deg),
                             cfg.usecase.distance_m, threads,
                             cfg.rx_gain_linear());
  out.peak_db = -1e300;
  for (const PatternSample& ps : out.pattern) {
    if (ps.gain_db > out.peak_db) {
      out.peak_db = ps.gain_db;
      out.peak_angle_deg = ps.angle_deg;
    }
  }
  const TestPointSet steer =
      build_test_points_deg({steer_deg}, cfg.usecase.distance_m,
                            Carrier{g.f0, g.lambda}, cfg.rx_gain_linear());
  out.steer_gain_db =
      to_db_power(gain_at_points(s, g, out.solution.Wd_hat, steer)(0));
  out.power = powers_for_precoder(s, out.solution.Wd_hat);
  return out;
}

std::vector<SweepRow> run_geometry_sweep(const ScenarioConfig& cfg,
                                         int threads) {
  const SweepVariable var = cfg.sweep.variable;
  if (var != SweepVariable::DeltaL && var != SweepVariable::Layers &&
      var != SweepVariable::Ns) {
    throw ConfigError("geometry sweep needs variable delta_l, L_R or Ns");
  }
  if (cfg.sweep.values.empty()) throw ConfigError("sweep.values is empty");
  std::vector<SweepRow> rows(cfg.sweep.values.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    ScenarioConfig c = cfg;
    const double v = cfg.sweep.values[i];
    switch (var) {
      case SweepVariable::DeltaL:
        c.geometry.kind = GeometryKind::Cylinder;
        c.geometry.delta_l_wavelengths = v;
        break;
      case SweepVariable::Layers:
        c.geometry.kind = GeometryKind::Cylinder;
        c.geometry.layers = static_cast<int>(std::lround(v));
        break;
      case SweepVariable::Ns:
        c.geometry.kind = GeometryKind::RandomDisk;
        c.geometry.ns = static_cast<int>(std::lround(v));
        break;
      default:
        break;
    }
    const Scenario sc(c);
    rows[i].value = v;
    rows[i].ns = static_cast<int>(sc.geometry.ns());
    rows[i].run = run_beamsteer(sc, c.usecase.steer_deg.front(), 1);
  });
  return rows;
}

SensitivityRun run_sensitivity(const Scenario& sc,
                               const std::vector<double>& sigmas, int trials,
                               int threads) {
  SensitivityRun out;
  out.base = run_beamsteer(sc, sc.cfg.usecase.steer_deg.front(), threads);
  const DsaGeometry& g = sc.geometry;
  const TestPointSet steer = build_test_points_deg(
      {out.base.steer_deg}, sc.cfg.usecase.distance_m, Carrier{g.f0, g.lambda},
      sc.cfg.rx_gain_linear());
  const CMatrix row = transimpedance_farfield(g, steer).Hc;
  const double friis =
      friis_factor(steer.points[0].norm(), g.lambda, steer.rx_gain);
  out.stats = perturb_analysis(sc.impedance.partition, row, friis,
                               out.base.solution.theta_hat,
                               out.base.solution.Wd_hat,
                               sc.cfg.reference_resistance_ohm, sigmas, trials,
                               sc.cfg.optimizer.seed, threads);
  return out;
}

MisoRun run_miso(const Scenario& sc, int threads) {
  const ScenarioConfig& cfg = sc.cfg;
  const DsaGeometry& g = sc.geometry;
  const int na = static_cast<int>(g.na());
  if (static_cast<int>(cfg.usecase.users_deg.size()) != na) {
    throw ConfigError("zf-miso: number of users must equal geometry.na");
  }
  MisoRun out;
  out.users = build_test_points_deg(cfg.usecase.users_deg,
                                    cfg.usecase.distance_m,
                                    Carrier{g.f0, g.lambda},
                                    cfg.rx_gain_linear());
  out.hc = transimpedance_farfield(g, out.users).Hc;
  out.target = target_zf_miso(out.hc, na);
  OptProblem p = base_problem(sc);
  p.Hc = out.hc;
  p.Hopt = out.target.Hopt;
  p.variant = ObjectiveVariant::Direct;
  p.digital_precoding = true;
  out.solution = alternate_optimize(p);
  const NetworkState s(sc.impedance.partition,
                       LoadVector(out.solution.theta_hat), p.R);
  out.h = end_to_end(out.hc, s.Wem(), out.solution.Wd_hat);
  out.coupling = metric_user_coupling(out.h);
  out.stream_patterns =
      stream_patterns(s, g, out.solution.Wd_hat,
                      degree_grid(cfg.pattern.step_deg), cfg.usecase.distance_m,
                      threads, cfg.rx_gain_linear());
  return out;
}

MimoRun run_mimo(const Scenario& sc) {
  const ScenarioConfig& cfg = sc.cfg;
  const DsaGeometry& g = sc.geometry;
  const int na = static_cast<int>(g.na());
  if (cfg.usecase.layers != na) {
    throw ConfigError("svd-mimo: usecase.layers must equal geometry.na");
  }
  MimoRun out;
  NlosReferenceSpec spec;
  spec.scatter_angles_deg = cfg.usecase.scene.scatter_angles_deg;
  spec.scatter_distance = cfg.usecase.scene.scatter_distance_m;
  spec.rx_distance = cfg.usecase.scene.rx_distance_m;
  spec.rx_elements = cfg.usecase.scene.rx_elements;
  spec.align_first = cfg.usecase.scene.align[0];
  spec.align_second = cfg.usecase.scene.align[1];
  out.scene = reference_nlos_scene(Carrier{g.f0, g.lambda}, spec);
  out.scene.rx_array.rx_gain = cfg.rx_gain_linear();
  out.hc = transimpedance_nlos(g, out.scene).Hc;
  out.target = target_svd_mimo(out.hc, na);
  OptProblem p = base_problem(sc);
  p.Hc = out.hc;
  p.Hopt = out.target.Hopt;
  p.U = out.target.U;
  p.Lambda = out.target.Lambda;
  p.digital_precoding = true;
  out.solution = alternate_optimize(p);
  const NetworkState s(sc.impedance.partition,
                       LoadVector(out.solution.theta_hat), p.R);
  out.h = end_to_end(out.hc, s.Wem(), out.solution.Wd_hat);
  out.layers = metric_layer_matrix(out.target.U, out.h);
  out.sigmas = cfg.usecase.sigma_rel;
  for (std::size_t i = 0; i < out.sigmas.size(); ++i) {
    const RVector th = perturb_theta(out.solution.theta_hat, out.sigmas[i],
                                     derive_seed(cfg.optimizer.seed, i));
    const NetworkState sp(sc.impedance.partition, LoadVector(th), p.R);
    out.perturbed.push_back(metric_layer_matrix(
        out.target.U, end_to_end(out.hc, sp.Wem(), out.solution.Wd_hat)));
  }
  return out;
}

}  // namespace dsa
