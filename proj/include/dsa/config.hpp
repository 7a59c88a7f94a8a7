// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsa/geometry.hpp"
#include "dsa/io.hpp"
#include "dsa/optimize.hpp"
#include "dsa/usecases.hpp"

namespace dsa {

enum class GeometryKind { Cylinder, RandomDisk, Ula, Uca, Single, File };

struct GeometryConfig {
  GeometryKind kind = GeometryKind::Cylinder;
  int na = 1;
  // cylinder
  double delta_l_wavelengths = 0.25;
  int rings = 5;
  int layers = 1;
  RingPopulation population = RingPopulation::Calibrated;
  ActivePlacement placement = ActivePlacement::AxisStack;
  double active_ring_radius_wavelengths = 0.125;
  // random disk
  int ns = 121;
  std::uint64_t seed = 1;
  // random disk, uca
  double diameter_m = 0.032;
  // ula; 0 means aperture_m / na
  double spacing_m = 0.0;
  double aperture_m = 0.032;
  // file
  std::string path;
};

struct NlosConfig {
  std::vector<double> scatter_angles_deg{-43.0, -14.0, 14.0, 43.0, 72.0};
  double scatter_distance_m = 5.0;
  double rx_distance_m = 10.0;
  int rx_elements = 20;
  std::vector<int> align{3, 4};
};

struct UseCaseConfig {
  TargetKind kind = TargetKind::Beamsteer;
  // beamsteer
  std::vector<double> steer_deg{0.0};
  int test_points = 108;
  double prx_w = 1.0;
  // beamsteer / miso
  double distance_m = 100.0;
  // miso
  std::vector<double> users_deg{-40.0, 20.0, 80.0, 200.0};
  // mimo
  int layers = 4;
  NlosConfig scene;
  std::vector<double> sigma_rel{0.0, 0.01, 0.1};
};

struct OptimizerConfig {
  int ni = 1500;
  int nalt = 1;
  ThetaInit init = ThetaInit::Resonant;
  std::uint64_t seed = 0;
  ObjectiveVariant variant = ObjectiveVariant::Direct;
  bool digital_precoding = false;
};

enum class SweepVariable { None, DeltaL, Layers, Ns, SigmaRel };

struct SweepConfig {
  SweepVariable variable = SweepVariable::None;
  std::vector<double> values;
  int trials = 200;
};

struct PatternConfig {
  double step_deg = 1.0;
};

struct OutputConfig {
  std::string directory = "out";
  TableFormat format = TableFormat::Csv;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double frequency_hz = 28e9;
  double reference_resistance_ohm = 50.0;
  double rx_gain_db = 0.0;
  double dipole_length_wavelengths = 1.0 / 50.0;
  double dipole_radius_wavelengths = 1.0 / 100.0;
  std::string polarization = "vertical";
  GeometryConfig geometry;
  UseCaseConfig usecase;
  OptimizerConfig optimizer;
  SweepConfig sweep;
  PatternConfig pattern;
  OutputConfig outputs;

  Carrier carrier() const;
  DipoleDims dims() const;
  double rx_gain_linear() const;

  // Canonical JSON with every field present.
  std::string to_json() const;
  std::uint64_t hash() const;
};

// Parses JSON text. Unknown keys, type mismatches and out-of-range values
// raise ConfigError naming the field (and line/column for syntax errors).
ScenarioConfig parse_config(const std::string& text,
                            const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

const char* to_string(GeometryKind k);
const char* to_string(SweepVariable v);

DsaGeometry build_geometry(const ScenarioConfig& cfg);

}  // namespace dsa
