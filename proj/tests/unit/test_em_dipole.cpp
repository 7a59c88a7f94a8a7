#include <doctest.h>

#include <cmath>

#include "dsa/em_dipole.hpp"
#include "dsa/errors.hpp"
#include "../test_util.hpp"

using namespace dsa;
using namespace dsa::test;

TEST_CASE("physical constants are consistent") {
  PhysicalConstants k;
  CHECK_NOTHROW(k.validate());
  CHECK(std::abs(k.eps0 * k.eta * k.c - 1.0) < 1e-12);
  PhysicalConstants bad = k;
  bad.eps0 *= 1.01;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = k;
  bad.eta = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("dipole validation") {
  Dipole d = ydip(Vec3::Zero());
  CHECK_NOTHROW(d.validate(lam()));
  d.orientation = Vec3(0.0, 1.0 + 1e-9, 0.0);
  CHECK_THROWS_AS(d.validate(lam()), DomainError);
  d = ydip(Vec3::Zero());
  d.length = lam() / 5.0;
  CHECK_THROWS_AS(d.validate(lam()), DomainError);
  d = ydip(Vec3::Zero());
  d.radius = 0.0;
  CHECK_THROWS_AS(d.validate(lam()), DomainError);
  const Dipole a = Dipole::from_angles(Vec3::Zero(), kPi / 2, kPi / 2, 1e-4, 5e-5);
  CHECK((a.orientation - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("green dyadic is even and symmetric") {
  const Vec3 r(0.3 * lam(), 0.1 * lam(), -0.2 * lam());
  const CMat3 g = green_dyadic(r, lam());
  const CMat3 gm = green_dyadic(-r, lam());
  CHECK((g - gm).norm() == 0.0);
  CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
  CHECK_THROWS_AS(green_dyadic(Vec3::Zero(), lam()), DomainError);
}

TEST_CASE("far-field dyadic") {
  const Vec3 r = Vec3(0.3, -0.7, 0.2).normalized() * 100.0 * lam();
  const CMat3 full = green_dyadic(r, lam());
  const CMat3 ff = green_farfield(r, lam());
  // the radial 1/r^2 term is outside the transverse block, so the full
  // Frobenius ratio approaches sqrt(3) u rather than u
  const double u = lam() / (2 * kPi * r.norm());
  CHECK((full - ff).norm() / ff.norm() < std::sqrt(3.0) * u * 1.01);
  const Eigen::Matrix3d tp = Eigen::Matrix3d::Identity() - r.normalized() * r.normalized().transpose();
  const CMat3 tr = tp.cast<Complex>() * full * tp.cast<Complex>();
  CHECK((tr - ff).norm() / ff.norm() < 2e-3);
  CHECK((ff * r.normalized().cast<Complex>()).norm() < 1e-12 * ff.norm());
  // transverse entry for r along z: |G_xx| = eta kappa / (4 pi d)
  const double d = 50.0;
  const CMat3 fz = green_farfield(Vec3(0, 0, d), lam());
  CHECK(std::abs(std::abs(fz(0, 0)) - 377.0 * wavenumber(lam()) / (4 * kPi * d)) <
        1e-12 * std::abs(fz(0, 0)));
  CHECK_THROWS_AS(green_farfield(Vec3::Zero(), lam()), DomainError);
}

TEST_CASE("far-field dyadic warns inside 10 wavelengths") {
  WarningCapture cap;
  green_farfield(Vec3(0, 0, 2 * lam()), lam());
  green_farfield(Vec3(0, 0, 3 * lam()), lam());
  CHECK(cap.messages.size() == 1);
  green_farfield(Vec3(0, 0, 20 * lam()), lam());
  CHECK(cap.messages.size() == 1);
}

TEST_CASE("far-field error decreases with distance") {
  const Vec3 u = Vec3(1.0, 2.0, -0.5).normalized();
  double prev = 1e9;
  for (double m : {10.0, 100.0, 1000.0}) {
    const Vec3 r = u * m * lam();
    const CMat3 ff = green_farfield(r, lam());
    const double e = (green_dyadic(r, lam()) - ff).norm() / ff.norm();
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("mutual impedance reciprocity and polarization null") {
  const Dipole a = ydip(Vec3(0.01, 0.002, -0.003));
  Dipole b = ydip(Vec3(-0.004, 0.001, 0.006));
  b.orientation = Vec3(0.3, 0.4, 0.5).normalized();
  CHECK(mutual_impedance(a, b, lam()) == mutual_impedance(b, a, lam()));

  Dipole x = ydip(Vec3::Zero());
  x.orientation = Vec3::UnitX();
  const Dipole y = ydip(Vec3(0, 0, 0.3 * lam()));
  CHECK(mutual_impedance(x, y, lam()) == Complex(0.0, 0.0));
  Dipole xb = x;
  xb.position = Vec3(0.0, 0.0, 0.3 * lam());
  Dipole yb = ydip(Vec3::Zero());
  CHECK(std::abs(mutual_impedance(xb, yb, lam())) < 1e-15);
  CHECK_THROWS_AS(mutual_impedance(a, a, lam()), DomainError);
}

TEST_CASE("mutual impedance matches the expanded scalar formula") {
  // parallel y dipoles, spacing lambda/4 along x: both dyads reduce to 1
  const double L = lam(), d = L / 4, l = L / 50, eta = 377.0;
  const Dipole a = ydip(Vec3::Zero());
  const Dipole b = ydip(Vec3(d, 0, 0));
  const double u = L / (2 * kPi * d);
  const double kd = 2 * kPi / L * d;
  const Complex pre = Complex(0, -eta) *
                      Complex(std::cos(kd), -std::sin(kd)) / (2 * L * d);
  const Complex expect = -l * l * pre * Complex(1.0 - u * u, -u);
  CHECK(rel(mutual_impedance(a, b, L), expect) < 1e-12);
}

TEST_CASE("self impedance") {
  const Dipole d = ydip(Vec3::Zero());
  WarningCapture cap;
  const Complex z = self_impedance(d, carrier().f0);
  CHECK(std::abs(z.real() - 2.0 / 3.0 * kPi * 377.0 * 0.02 * 0.02) < 1e-12);
  CHECK(std::abs(z.real() - 0.3158) < 1e-4);
  CHECK(z.imag() < 0.0);
  Dipole d2 = d;
  d2.length *= 2.0;
  const Complex z2 = self_impedance(d2, carrier().f0);
  CHECK(z2.real() == 4.0 * z.real());
  CHECK(z2.imag() < 0.0);
  // l/r = 2 < e: warned once for the same ratio
  CHECK(cap.messages.size() == 1);
  self_impedance(d, carrier().f0);
  CHECK(cap.messages.size() == 1);
  Dipole bad = d;
  bad.radius = -1.0;
  CHECK_THROWS_AS(self_impedance(bad, carrier().f0), DomainError);
  CHECK_THROWS_AS(self_impedance(d, 0.0), DomainError);
}

TEST_CASE("efield superposition and polarization") {
  const std::vector<Dipole> two{ydip(Vec3::Zero()), ydip(Vec3(0.003, 0, 0.001))};
  const std::vector<Vec3> pts{Vec3(200 * lam(), 0, 0), Vec3(0.1, 0.2, 0.3)};
  CVector zero = CVector::Zero(2);
  for (const CVec3& e : efield_at(pts, two, zero, lam())) CHECK(e.norm() == 0.0);

  const std::vector<Dipole> one{two[0]};
  CVector i1(1);
  i1 << Complex(1.0, 0.0);
  const CVec3 e = efield_at(pts, one, i1, lam())[0];
  CHECK(std::abs(e(0)) < 1e-12 * e.norm());
  CHECK(std::abs(e(2)) < 1e-12 * e.norm());

  CVector i2(2);
  i2 << Complex(0.3, -1.0), Complex(2.0, 0.5);
  const auto both = efield_at(pts, two, i2, lam());
  const auto a = efield_at(pts, std::vector<Dipole>{two[0]}, i2.head(1), lam());
  const auto b = efield_at(pts, std::vector<Dipole>{two[1]}, i2.tail(1), lam());
  for (std::size_t p = 0; p < pts.size(); ++p) {
    CHECK((both[p] - a[p] - b[p]).norm() <= 1e-14 * both[p].norm());
  }
  const std::vector<Vec3> on{Vec3::Zero()};
  CHECK_THROWS_AS(efield_at(on, one, i1, lam()), DomainError);
  CHECK_THROWS_AS(efield_at(pts, one, i2, lam()), PreconditionError);
}
