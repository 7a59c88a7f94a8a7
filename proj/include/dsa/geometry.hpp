// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dsa/em_dipole.hpp"
#include "dsa/types.hpp"

namespace dsa {

struct Carrier {
  double f0 = 28e9;
  double lambda = 299792458.0 / 28e9;

  static Carrier from_frequency(double f0, const PhysicalConstants& k = {});
};

/// Element dimensions shared by every dipole of a builder.
struct DipoleDims {
  double length = 0.0;
  double radius = 0.0;

  // l = lambda/50, r = lambda/100
  static DipoleDims defaults(double lambda);
};

enum class ElementRole { Active, Scatterer };

struct DsaGeometry {
  std::vector<Dipole> active;
  std::vector<Dipole> scatterers;
  double lambda = 0.0;
  double f0 = 0.0;

  std::size_t na() const { return active.size(); }
  std::size_t ns() const { return scatterers.size(); }
  std::size_t n() const { return active.size() + scatterers.size(); }

  const Dipole& element(std::size_t i) const {
    return i < active.size() ? active[i] : scatterers[i - active.size()];
  }
  std::vector<Dipole> elements() const;

  // Distinct positions, unit orientations, valid dimensions.
  void validate() const;
};

struct TestPointSet {
  std::vector<Vec3> points;
  std::vector<Vec3> rx_orientations;
  double rx_gain = 1.0;

  std::size_t size() const { return points.size(); }
  // Warns when any point is closer than 10 lambda to an element.
  void check_far_field(const DsaGeometry& g) const;
};

// Ring element count convention for the concentric-cylinder builder.
//  Calibrated:        n = round(17 rho/lambda + 11.35)
//  HalfWavelengthArc: n = max(1, round(2 pi rho / (lambda/2)))
enum class RingPopulation { Calibrated, HalfWavelengthArc };

int ring_element_count(double radius, double lambda, RingPopulation pop);

// Where multiple active elements go.
//  AxisStack:  on the array axis, lambda/2 apart along y, centered
//  CenterRing: in the x-z plane on a circle of radius active_ring_radius
enum class ActivePlacement { AxisStack, CenterRing };

struct CylinderSpec {
  double delta_l = 0.0;  // ring radius increment [m]
  int rings = 5;         // L
  int layers = 1;        // L_R, vertical replicas spaced lambda/2 along y
  int na = 1;
  RingPopulation population = RingPopulation::Calibrated;
  ActivePlacement placement = ActivePlacement::AxisStack;
  double active_ring_radius = 0.0;  // 0: lambda/8
};

DsaGeometry build_cylinder_dsa(const CylinderSpec& spec, const Carrier& carrier,
                               const DipoleDims& dims);
DsaGeometry build_cylinder_dsa(const CylinderSpec& spec, const Carrier& carrier);

DsaGeometry build_random_disk_dsa(int ns, double diameter,
                                  const Carrier& carrier, int na,
                                  std::uint64_t seed, const DipoleDims& dims,
                                  ActivePlacement placement =
                                      ActivePlacement::AxisStack,
                                  double active_ring_radius = 0.0);
DsaGeometry build_random_disk_dsa(int ns, double diameter,
                                  const Carrier& carrier, int na,
                                  std::uint64_t seed);

// na elements along z, centered on the origin.
DsaGeometry build_ula(int na, double spacing, const Carrier& carrier,
                      const DipoleDims& dims);
DsaGeometry build_ula(int na, double spacing, const Carrier& carrier);

// na elements on a circle in the x-z plane.
DsaGeometry build_uca(int na, double diameter, const Carrier& carrier,
                      const DipoleDims& dims);
DsaGeometry build_uca(int na, double diameter, const Carrier& carrier);

// Actives only (used by the single-dipole case).
DsaGeometry build_active_stack(int na, const Carrier& carrier,
                               const DipoleDims& dims,
                               ActivePlacement placement =
                                   ActivePlacement::AxisStack,
                               double active_ring_radius = 0.0);

// t_k = [d sin phi_k, 0, d cos phi_k], phi_k = 2 pi k / K, y-oriented.
TestPointSet build_test_ring(int k, double d, const Carrier& carrier,
                             double rx_gain = 1.0);

// Same convention as the ring, at arbitrary angles in degrees.
TestPointSet build_test_points_deg(const std::vector<double>& angles_deg,
                                   double d, const Carrier& carrier,
                                   double rx_gain = 1.0);

// Text records: "active|scatterer px py pz ox oy oz length radius".
void write_geometry(std::ostream& os, const DsaGeometry& g);
DsaGeometry read_geometry(std::istream& is);

}  // namespace dsa
