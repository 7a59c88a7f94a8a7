#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/geometry.hpp"
#include "../test_util.hpp"

using namespace dsa;
using namespace dsa::test;

namespace {
std::size_t cylinder_ns(double delta_over_lambda, int layers,
                        RingPopulation pop = RingPopulation::Calibrated) {
  CylinderSpec s;
  s.delta_l = delta_over_lambda * lam();
  s.rings = 5;
  s.layers = layers;
  s.population = pop;
  return build_cylinder_dsa(s, carrier()).ns();
}
}  // namespace

TEST_CASE("cylinder scatterer counts are locked to the reference table") {
  CHECK(cylinder_ns(1.0 / 8, 1) == 89);
  CHECK(cylinder_ns(1.0 / 6, 1) == 100);
  CHECK(cylinder_ns(1.0 / 4, 1) == 121);
  CHECK(cylinder_ns(1.0 / 2, 1) == 184);
  CHECK(cylinder_ns(1.0, 1) == 310);
  CHECK(cylinder_ns(1.0 / 4, 3) == 363);
}

TEST_CASE("half-wavelength arc rule does not reproduce the table") {
  // documents why the calibrated population is the default
  CHECK(cylinder_ns(1.0 / 4, 1, RingPopulation::HalfWavelengthArc) == 47);
  CHECK(cylinder_ns(1.0, 1, RingPopulation::HalfWavelengthArc) == 189);
  CHECK(ring_element_count(1e-6, lam(), RingPopulation::HalfWavelengthArc) == 1);
}

TEST_CASE("cylinder layout") {
  CylinderSpec s;
  s.delta_l = lam() / 4;
  s.layers = 3;
  s.na = 2;
  const DsaGeometry g = build_cylinder_dsa(s, carrier());
  CHECK(g.na() == 2);
  CHECK(std::abs(g.active[0].position.y() + lam() / 4) < 1e-15);
  CHECK(std::abs(g.active[1].position.y() - lam() / 4) < 1e-15);
  for (const Dipole& d : g.scatterers) {
    CHECK(d.orientation == Vec3::UnitY());
    const double rho = std::hypot(d.position.x(), d.position.z());
    const double ring = rho / (lam() / 4);
    CHECK(std::abs(ring - std::round(ring)) < 1e-9);
    const double layer = d.position.y() / (lam() / 2);
    CHECK(std::abs(layer - std::round(layer)) < 1e-9);
  }
  CHECK(g.elements().size() == g.n());
  CHECK(&g.element(0) == &g.active[0]);
  CHECK(&g.element(2) == &g.scatterers[0]);
  s.delta_l = -1;
  CHECK_THROWS_AS(build_cylinder_dsa(s, carrier()), DomainError);
}

TEST_CASE("center-ring active placement") {
  CylinderSpec s;
  s.delta_l = lam() / 4;
  s.na = 4;
  s.placement = ActivePlacement::CenterRing;
  const DsaGeometry g = build_cylinder_dsa(s, carrier());
  for (const Dipole& d : g.active) {
    CHECK(std::abs(d.position.norm() - lam() / 8) < 1e-15);
    CHECK(d.position.y() == 0.0);
  }
  // a single active stays at the origin
  s.na = 1;
  CHECK(build_cylinder_dsa(s, carrier()).active[0].position.norm() == 0.0);
}

TEST_CASE("random disk") {
  const DsaGeometry a = build_random_disk_dsa(121, 0.032, carrier(), 1, 42);
  const DsaGeometry b = build_random_disk_dsa(121, 0.032, carrier(), 1, 42);
  const DsaGeometry c = build_random_disk_dsa(121, 0.032, carrier(), 1, 43);
  REQUIRE(a.ns() == 121);
  bool differs = false;
  for (std::size_t i = 0; i < a.ns(); ++i) {
    CHECK(a.scatterers[i].position == b.scatterers[i].position);
    differs = differs || a.scatterers[i].position != c.scatterers[i].position;
    const Vec3& p = a.scatterers[i].position;
    CHECK(std::hypot(p.x(), p.z()) <= 0.016);
    CHECK(p.y() == 0.0);
  }
  CHECK(differs);
  CHECK_THROWS_AS(build_random_disk_dsa(0, 0.032, carrier(), 1, 1), DomainError);
}

TEST_CASE("ULA and UCA baselines") {
  const DsaGeometry u = build_ula(6, 0.032 / 6, carrier());
  REQUIRE(u.na() == 6);
  CHECK(u.ns() == 0);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(u.active[i].position.z() + u.active[5 - i].position.z()) < 1e-16);
    CHECK(u.active[i].position.x() == 0.0);
  }
  CHECK(std::abs(u.active[5].position.z() - u.active[0].position.z() - 5 * 0.032 / 6) < 1e-15);
  const DsaGeometry c = build_uca(36, 0.032, carrier());
  for (const Dipole& d : c.active) {
    CHECK(std::abs(d.position.norm() - 0.016) < 1e-15);
    CHECK(d.orientation == Vec3::UnitY());
  }
  CHECK_THROWS_AS(build_ula(1, 0.01, carrier()), DomainError);
  CHECK_THROWS_AS(build_uca(1, 0.01, carrier()), DomainError);
}

TEST_CASE("test ring") {
  const TestPointSet t = build_test_ring(108, 100.0, carrier());
  REQUIRE(t.size() == 108);
  CHECK(t.points[0] == Vec3(0, 0, 100.0));
  for (const Vec3& p : t.points) CHECK(std::abs(p.norm() - 100.0) < 1e-12 * 100.0);
  CHECK(t.rx_orientations[5] == Vec3::UnitY());
  CHECK(std::abs(t.points[27].x() - 100.0) < 1e-12);
  WarningCapture cap;
  build_test_ring(4, 5 * lam(), carrier());
  CHECK(cap.messages.size() == 1);
}

TEST_CASE("geometry text round trip") {
  const DsaGeometry g = build_random_disk_dsa(20, 0.032, carrier(), 2, 9);
  std::stringstream ss;
  write_geometry(ss, g);
  const DsaGeometry r = read_geometry(ss);
  REQUIRE(r.n() == g.n());
  CHECK(r.na() == 2);
  CHECK(r.lambda == g.lambda);
  CHECK(r.f0 == g.f0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(r.element(i).position == g.element(i).position);
    CHECK(r.element(i).orientation == g.element(i).orientation);
    CHECK(r.element(i).length == g.element(i).length);
    CHECK(r.element(i).radius == g.element(i).radius);
  }
}

TEST_CASE("geometry reader diagnostics") {
  std::stringstream dup;
  dup << "lambda 0.0107068735\nf0 28e9\n"
      << "active 0 0 0 0 1 0 0.0002 0.0001\n"
      << "scatterer 0 0 0 0 1 0 0.0002 0.0001\n";
  CHECK_THROWS_AS(read_geometry(dup), ConstructionError);
  std::stringstream bad;
  bad << "lambda 0.01\nfoo 1 2 3\n";
  try {
    read_geometry(bad);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
