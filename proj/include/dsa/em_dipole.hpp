// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "dsa/types.hpp"

namespace dsa {

struct PhysicalConstants {
  double eta = 377.0;          // free-space impedance [Ohm]
  double c = 299792458.0;      // speed of light [m/s]
  double eps0 = 1.0 / (377.0 * 299792458.0);  // [F/m]

  double wavelength(double f0) const { return c / f0; }
  void validate() const;
};

/// One Hertzian dipole. Orientation is a Cartesian unit vector.
struct Dipole {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::UnitY();
  double length = 0.0;
  double radius = 0.0;

  // Checks unit orientation and 0 < l, r < lambda/10.
  void validate(double lambda) const;

  // Orientation from elevation phi (from +z) and azimuth psi.
  static Dipole from_angles(const Vec3& position, double phi, double psi,
                            double length, double radius);
};

inline double wavenumber(double lambda) { return 2.0 * kPi / lambda; }

CMat3 green_dyadic(const Vec3& r, double lambda,
                   const PhysicalConstants& k = {});

// Radiative-only part. Warns when |r| < 10 lambda.
CMat3 green_farfield(const Vec3& r, double lambda,
                     const PhysicalConstants& k = {});

// Open-circuit voltage at b per unit current on a (full dyadic).
Complex mutual_impedance(const Dipole& a, const Dipole& b, double lambda,
                         const PhysicalConstants& k = {});

Complex self_impedance(const Dipole& d, double f0,
                       const PhysicalConstants& k = {});

std::vector<CVec3> efield_at(std::span<const Vec3> points,
                             std::span<const Dipole> dipoles,
                             const CVector& currents, double lambda,
                             const PhysicalConstants& k = {});

}  // namespace dsa
