// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dsa/channel.hpp"
#include "dsa/config.hpp"
#include "dsa/network.hpp"
#include "dsa/optimize.hpp"
#include "dsa/usecases.hpp"

namespace dsa {

struct Scenario {
  ScenarioConfig cfg;
  DsaGeometry geometry;
  AssembledImpedance impedance;

  explicit Scenario(ScenarioConfig c);
  Scenario(ScenarioConfig c, DsaGeometry g);
};

// Conjugate (matched) weights for one test-point row, ||Wd||_F^2 = R.
CMatrix conjugate_steering_weights(const CMatrix& hc_row, double R);

int steering_index(double steer_deg, int k);

struct BeamsteerRun {
  double steer_deg = 0.0;
  int k_star = 0;
  bool baseline = false;  // no scatterers: matched weights, no optimization
  OptSolution solution;
  std::vector<PatternSample> pattern;
  double peak_db = 0.0;
  double peak_angle_deg = 0.0;
  double steer_gain_db = 0.0;
  PowerReport power;
  TestPointSet ring;
  CMatrix hc;  // ring transimpedance
};

BeamsteerRun run_beamsteer(const Scenario& sc, double steer_deg,
                           int threads = 1);

struct SweepRow {
  double value = 0.0;
  int ns = 0;
  BeamsteerRun run;
};

std::vector<SweepRow> run_geometry_sweep(const ScenarioConfig& cfg,
                                         int threads = 1);

struct SensitivityRun {
  BeamsteerRun base;
  std::vector<PerturbationStats> stats;
};

SensitivityRun run_sensitivity(const Scenario& sc,
                               const std::vector<double>& sigmas, int trials,
                               int threads = 1);

struct MisoRun {
  TestPointSet users;
  CMatrix hc;
  TargetSpec target;
  OptSolution solution;
  CMatrix h;          // K x N_a end-to-end channel
  RMatrix coupling;   // dB
  std::vector<std::vector<PatternSample>> stream_patterns;
};

MisoRun run_miso(const Scenario& sc, int threads = 1);

struct MimoRun {
  NlosScene scene;
  CMatrix hc;
  TargetSpec target;
  OptSolution solution;
  CMatrix h;
  LayerMatrix layers;
  std::vector<double> sigmas;
  std::vector<LayerMatrix> perturbed;
};

MimoRun run_mimo(const Scenario& sc);

}  // namespace dsa
