#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "dsa/channel.hpp"
#include "dsa/errors.hpp"
#include "../test_util.hpp"

using namespace dsa;
using namespace dsa::test;

namespace {

DsaGeometry single() {
  DsaGeometry g;
  g.lambda = lam();
  g.f0 = carrier().f0;
  g.active.push_back(ydip(Vec3::Zero()));
  return g;
}

CMatrix matched(const NetworkState&, Eigen::Index na) {
  return std::sqrt(50.0) * CMatrix::Identity(na, na);
}

}  // namespace

TEST_CASE("far-field transimpedance polarization and distance") {
  WarningCapture cap;
  const DsaGeometry g = single();
  TestPointSet tp = build_test_points_deg({0.0, 30.0}, 100.0, carrier());
  const Transimpedance h = transimpedance_farfield(g, tp);
  REQUIRE(h.rows() == 2);
  REQUIRE(h.cols() == 1);

  tp.rx_orientations[0] = Vec3::UnitX();
  CHECK(transimpedance_farfield(g, tp).Hc(0, 0) == Complex(0.0, 0.0));

  const TestPointSet far = build_test_points_deg({0.0, 30.0}, 200.0, carrier());
  const CMatrix h2 = transimpedance_farfield(g, far).Hc;
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(std::abs(h2(i, 0)) * 2.0 - std::abs(h.Hc(i, 0))) <
          1e-12 * std::abs(h.Hc(i, 0)));
  }
  const TestPointSet close = build_test_points_deg({0.0}, 5 * lam(), carrier());
  CHECK_THROWS_AS(transimpedance_farfield(g, close), PreconditionError);
  TestPointSet broken = tp;
  broken.rx_orientations.pop_back();
  CHECK_THROWS_AS(transimpedance_farfield(g, broken), PreconditionError);
  CHECK(!h.description.empty());
}

TEST_CASE("single dipole gain is 3/2 in the equatorial plane") {
  WarningCapture cap;
  const DsaGeometry g = single();
  const AssembledImpedance z = assemble_impedance(g);
  const NetworkState s(z.partition, LoadVector::zeros(0), 50.0);
  const auto pat = gain_pattern(s, g, matched(s, 1), degree_grid(10.0), 100.0);
  REQUIRE(pat.size() == 36);
  for (const PatternSample& p : pat) {
    CHECK(std::abs(p.gain_db - 10.0 * std::log10(1.5)) < 1e-9);
  }
  CHECK(pat[3].angle_deg == 30.0);
}

TEST_CASE("gain pattern 1/d law") {
  WarningCapture cap;
  const auto grid = degree_grid(1.0);
  {
    const DsaGeometry g = single();
    const AssembledImpedance z = assemble_impedance(g);
    const NetworkState s(z.partition, LoadVector::zeros(0), 50.0);
    const auto a = gain_pattern(s, g, matched(s, 1), grid, 100.0);
    const auto b = gain_pattern(s, g, matched(s, 1), grid, 1000.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(a[i].gain_db - b[i].gain_db) < 1e-6);
    }
  }
  // Extended aperture: exact element distances keep a Fresnel phase term of
  // order kappa D^2 / (8 d), so the pattern converges as 1/d instead.
  const DsaGeometry g = build_ula(6, 0.032 / 6, carrier());
  const AssembledImpedance z = assemble_impedance(g);
  const NetworkState s(z.partition, LoadVector::zeros(0), 50.0);
  CMatrix wd = CMatrix::Zero(6, 1);
  wd(0, 0) = Complex(1.0, 0.5);
  wd(3, 0) = Complex(-0.2, 1.0);
  std::vector<double> lobe;
  for (double d : {100.0, 1000.0, 1e4}) {
    const auto a = gain_pattern(s, g, wd, grid, d);
    const auto b = gain_pattern(s, g, wd, grid, 10 * d);
    double peak = -1e9, e = 0.0;
    for (const auto& x : a) peak = std::max(peak, x.gain_db);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (a[i].gain_db > peak - 10.0) e = std::max(e, std::abs(a[i].gain_db - b[i].gain_db));
    }
    lobe.push_back(e);
  }
  CHECK(lobe[0] < 1e-2);
  CHECK(lobe[2] < 1e-4);
  CHECK(lobe[1] < 0.2 * lobe[0]);
  CHECK(lobe[2] < 0.2 * lobe[1]);
}

TEST_CASE("gain pattern is independent of thread count") {
  WarningCapture cap;
  const DsaGeometry g = build_random_disk_dsa(30, 0.032, carrier(), 1, 8);
  const AssembledImpedance z = assemble_impedance(g);
  Rng rng(8);
  const NetworkState s(z.partition, LoadVector(random_theta(rng, 30, 500.0)), 50.0);
  const CMatrix wd = CMatrix::Constant(1, 1, Complex(std::sqrt(50.0), 0.0));
  const auto grid = degree_grid(1.0);
  const auto a = gain_pattern(s, g, wd, grid, 100.0, 1);
  const auto c = gain_pattern(s, g, wd, grid, 100.0, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a[i].gain_db == c[i].gain_db);
  CHECK_THROWS_AS(gain_pattern(s, g, wd, grid, 5 * lam()), PreconditionError);
}

TEST_CASE("gain averages to one over the sphere") {
  WarningCapture cap;
  Rng rng(31);
  const DsaGeometry g = build_random_disk_dsa(15, 0.02, carrier(), 2, 4);
  const AssembledImpedance z = assemble_impedance(g);
  const NetworkState s(z.partition, LoadVector(random_theta(rng, 15, 800.0)), 50.0);
  const CMatrix wd = random_cmatrix(rng, 2, 1);
  const double m = mean_gain_over_sphere(s, g, wd, 1000 * lam(), 90, 180);
  CHECK(std::abs(m - 1.0) < 0.02);
}

TEST_CASE("sphere flux of a single dipole") {
  WarningCapture cap;
  const DsaGeometry g = single();
  CVector i(1);
  i << Complex(1.0, 0.0);
  // |I|^2 Re Zself is the radiated power of a Hertzian dipole
  const double flux = sphere_flux(g.elements(), i, lam(), 1000 * lam(), 90, 180);
  const double expect = self_impedance(g.active[0], g.f0).real();
  CHECK(std::abs(flux / expect - 1.0) < 1e-3);
  CHECK_THROWS_AS(sphere_flux(g.elements(), i, lam(), 1.0, 0, 3), PreconditionError);
}

TEST_CASE("end-to-end channel") {
  Rng rng(2);
  const CMatrix hc = random_cmatrix(rng, 4, 7);
  const CMatrix wem = random_cmatrix(rng, 7, 2);
  const CMatrix wd = random_cmatrix(rng, 2, 3);
  const CMatrix h = end_to_end(hc, wem, wd);
  CHECK((h - (hc * wem) * wd).norm() < 1e-12 * h.norm());
  CHECK(end_to_end(hc, wem, CMatrix::Zero(2, 3)).norm() == 0.0);
  CHECK_THROWS_AS(end_to_end(hc, wem, wd.transpose()), PreconditionError);
}

TEST_CASE("friis factor and gains from channel") {
  CHECK(std::abs(friis_factor(100.0, 0.01, 1.0) - std::pow(4 * kPi * 1e4, 2)) < 1e-3);
  CHECK(friis_factor(100.0, 0.01, 2.0) == 0.5 * friis_factor(100.0, 0.01, 1.0));
  const TestPointSet tp = build_test_points_deg({0.0, 90.0}, 100.0, carrier());
  CMatrix h(2, 1);
  h << Complex(1e-6, 0), Complex(0, 2e-6);
  CMatrix wd = CMatrix::Constant(1, 1, Complex(3.0, 0.0));
  const RVector g = gain_from_channel(h, wd, 50.0, tp, lam());
  CHECK(std::abs(g(1) / g(0) - 4.0) < 1e-12);
  const RMatrix sg = stream_gain_from_channel(h, wd, 50.0, tp, lam());
  CHECK(std::abs(sg(0, 0) - g(0)) < 1e-12 * g(0));
  CHECK_THROWS_AS(gain_from_channel(h, CMatrix::Zero(1, 1), 50.0, tp, lam()), PreconditionError);
  CHECK_THROWS_AS(gain_from_channel(h.topRows(1), wd, 50.0, tp, lam()), PreconditionError);
  CHECK_THROWS_AS(stream_gain_from_channel(h, CMatrix::Ones(1, 2), 50.0, tp, lam()),
                  PreconditionError);
}

TEST_CASE("degree grid") {
  const auto g = degree_grid(1.0);
  CHECK(g.size() == 360);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 359.0);
  CHECK(degree_grid(0.5).size() == 720);
}

TEST_CASE("NLOS transimpedance") {
  WarningCapture cap;
  CylinderSpec cs;
  cs.delta_l = lam() / 4;
  cs.rings = 2;
  cs.na = 1;
  const DsaGeometry g = build_cylinder_dsa(cs, carrier());
  NlosScene scene = reference_nlos_scene(carrier());
  REQUIRE(scene.scatter_points.size() == 5);
  REQUIRE(scene.rx_array.size() == 20);
  for (const Vec3& p : scene.rx_array.points) {
    CHECK(std::abs(p.norm() - 10.0) < 1e-3);
  }
  const CMatrix all = transimpedance_nlos(g, scene).Hc;
  CMatrix sum = CMatrix::Zero(all.rows(), all.cols());
  for (std::size_t s = 0; s < 5; ++s) sum += transimpedance_nlos_path(g, scene, s).Hc;
  CHECK(sum == all);

  // coplanar array and single reflector: one transverse direction, rank 1
  const CMatrix one = transimpedance_nlos_path(g, scene, 2).Hc;
  Eigen::JacobiSVD<CMatrix> svd(one);
  const RVector sv = svd.singularValues();
  CHECK(sv(1) / sv(0) < 1e-10);

  NlosScene dark = scene;
  for (Complex& c : dark.reflection_coeffs) c = 0.0;
  CHECK(transimpedance_nlos(g, dark).Hc.norm() == 0.0);

  NlosScene empty = scene;
  empty.scatter_points.clear();
  empty.reflection_coeffs.clear();
  CHECK_THROWS_AS(transimpedance_nlos(g, empty), PreconditionError);
  NlosScene near = scene;
  near.scatter_points[0] = Vec3(0, 0, 3 * lam());
  CHECK_THROWS_AS(transimpedance_nlos(g, near), PreconditionError);
  CHECK_THROWS_AS(transimpedance_nlos_path(g, scene, 5), PreconditionError);
  NlosReferenceSpec bad;
  bad.align_first = bad.align_second;
  CHECK_THROWS_AS(reference_nlos_scene(carrier(), bad), DomainError);
}

TEST_CASE("receive ULA") {
  RxUlaSpec s;
  s.center = Vec3(0, 0, 10);
  s.elements = 4;
  const TestPointSet t = make_rx_ula(s, carrier());
  REQUIRE(t.size() == 4);
  CHECK(std::abs((t.points[1] - t.points[0]).norm() - lam() / 2) < 1e-15);
  CHECK(std::abs((t.points[0] + t.points[3]).z() / 2 - 10.0) < 1e-15);
  s.elements = 0;
  CHECK_THROWS_AS(make_rx_ula(s, carrier()), DomainError);
}
