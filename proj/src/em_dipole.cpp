// SPDX-License-Identifier: Apache-2.0
#include "dsa/em_dipole.hpp"

#include <cmath>
#include <sstream>

#include "dsa/diagnostics.hpp"
#include "dsa/errors.hpp"

namespace dsa {

void PhysicalConstants::validate() const {
  if (!(eta > 0.0) || !(c > 0.0) || !(eps0 > 0.0)) {
    throw DomainError("physical constants must be strictly positive");
  }
  const double expect = 1.0 / (eta * c);
  if (std::abs(eps0 - expect) > 1e-6 * expect) {
    throw DomainError("eps0 must equal 1/(eta*c)");
  }
}

void Dipole::validate(double lambda) const {
  if (std::abs(orientation.norm() - 1.0) > 1e-12) {
    throw DomainError("dipole orientation is not a unit vector");
  }
  if (!(length > 0.0) || !(radius > 0.0)) {
    throw DomainError("dipole length and radius must be positive");
  }
  if (!(length < lambda / 10.0) || !(radius < lambda / 10.0)) {
    throw DomainError("dipole dimensions must stay below lambda/10");
  }
  if (!position.allFinite()) throw DomainError("dipole position not finite");
}

Dipole Dipole::from_angles(const Vec3& position, double phi, double psi,
                           double length, double radius) {
  Dipole d;
  d.position = position;
  d.orientation = Vec3(std::sin(phi) * std::cos(psi),
                       std::sin(phi) * std::sin(psi), std::cos(phi));
  d.length = length;
  d.radius = radius;
  return d;
}

CMat3 green_dyadic(const Vec3& r, double lambda, const PhysicalConstants& k) {
  const double d = r.norm();
  if (!(d > 0.0)) throw DomainError("green_dyadic: zero-length displacement");
  const Vec3 rh = r / d;
  const Eigen::Matrix3d P = rh * rh.transpose();
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d T = I - 3.0 * P;
  const double u = lambda / (2.0 * kPi * d);
  const double kd = wavenumber(lambda) * d;
  const Complex pre =
      -kJ * k.eta * std::exp(-kJ * kd) / (2.0 * lambda * d);
  // (I - P) - j u (I - 3P) - u^2 (I - 3P)
  CMat3 g = (I - P).cast<Complex>();
  g += (-kJ * u - u * u) * T.cast<Complex>();
  return pre * g;
}

CMat3 green_farfield(const Vec3& r, double lambda, const PhysicalConstants& k) {
  const double d = r.norm();
  if (!(d > 0.0)) throw DomainError("green_farfield: zero-length displacement");
  if (d < 10.0 * lambda) {
    warn("green_farfield evaluated closer than 10 wavelengths");
  }
  const Vec3 rh = r / d;
  const Eigen::Matrix3d Pt = Eigen::Matrix3d::Identity() - rh * rh.transpose();
  const double kap = wavenumber(lambda);
  const Complex pre =
      -kJ * k.eta * kap / (4.0 * kPi * d) * std::exp(-kJ * kap * d);
  return pre * Pt.cast<Complex>();
}

Complex mutual_impedance(const Dipole& a, const Dipole& b, double lambda,
                         const PhysicalConstants& k) {
  const Vec3 r = b.position - a.position;
  const double d = r.norm();
  if (!(d > 0.0)) {
    throw DomainError("mutual_impedance: coincident dipole positions");
  }
  // Scalar contraction of the dyadic; every product is commutative so the
  // result is bitwise identical for (a, b) and (b, a).
  const Vec3 rh = r / d;
  const double ab = a.orientation.dot(b.orientation);
  const double pp = a.orientation.dot(rh) * b.orientation.dot(rh);
  const double u = lambda / (2.0 * kPi * d);
  const Complex pre = -kJ * k.eta * std::exp(-kJ * (wavenumber(lambda) * d)) /
                      (2.0 * lambda * d);
  const Complex e = pre * ((ab - pp) + (-kJ * u - u * u) * (ab - 3.0 * pp));
  // open-circuit voltage is minus the tangential field integrated along b
  return -(a.length * b.length) * e;
}

Complex self_impedance(const Dipole& d, double f0, const PhysicalConstants& k) {
  if (!(d.length > 0.0) || !(d.radius > 0.0) || !(f0 > 0.0)) {
    throw DomainError("self_impedance: nonpositive dimension or frequency");
  }
  if (d.length <= d.radius * std::exp(1.0)) {
    std::ostringstream os;
    os << "self_impedance: l/r = " << d.length / d.radius
       << " gives ln(l/r) <= 1";
    warn(os.str());
  }
  const double lambda = k.wavelength(f0);
  const double ratio = d.length / lambda;
  const double re = 2.0 / 3.0 * kPi * k.eta * ratio * ratio;
  const double x =
      std::log(d.length / d.radius) / (kPi * kPi * f0 * k.eps0 * d.length);
  return {re, -x};
}

std::vector<CVec3> efield_at(std::span<const Vec3> points,
                             std::span<const Dipole> dipoles,
                             const CVector& currents, double lambda,
                             const PhysicalConstants& k) {
  if (static_cast<std::size_t>(currents.size()) != dipoles.size()) {
    throw PreconditionError("efield_at: one current per dipole expected");
  }
  std::vector<CVec3> out(points.size(), CVec3::Zero());
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t n = 0; n < dipoles.size(); ++n) {
      const Vec3 r = points[p] - dipoles[n].position;
      if (!(r.norm() > 0.0)) {
        throw DomainError("efield_at: field point coincides with a dipole");
      }
      out[p] += dipoles[n].length * currents(static_cast<Eigen::Index>(n)) *
                (green_dyadic(r, lambda, k) *
                 dipoles[n].orientation.cast<Complex>());
    }
  }
  return out;
}

}  // namespace dsa
