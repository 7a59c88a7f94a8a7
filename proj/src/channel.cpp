// SPDX-License-Identifier: Apache-2.0
#include "dsa/channel.hpp"

#include <cmath>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/parallel.hpp"

namespace dsa {

namespace {

// Omega_rx^T (I - r r^T) Omega_tx
double transverse(const Vec3& rx, const Vec3& rh, const Vec3& tx) {
  return rx.dot(tx) - rx.dot(rh) * tx.dot(rh);
}

double rx_normalization(double lambda, double rx_gain,
                        const PhysicalConstants& k) {
  return std::sqrt(lambda * lambda * rx_gain / (4.0 * kPi * k.eta));
}

}  // namespace

Transimpedance transimpedance_farfield(const DsaGeometry& g,
                                       const TestPointSet& tp,
                                       const PhysicalConstants& k) {
  if (tp.rx_orientations.size() != tp.points.size()) {
    throw PreconditionError("test points need one receive orientation each");
  }
  const std::size_t K = tp.size(), N = g.n();
  const double lambda = g.lambda;
  const double kap = wavenumber(lambda);
  const double norm = rx_normalization(lambda, tp.rx_gain, k);
  Transimpedance out;
  out.Hc.resize(K, N);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t n = 0; n < N; ++n) {
      const Dipole& d = g.element(n);
      const Vec3 r = tp.points[i] - d.position;
      const double dist = r.norm();
      if (!(dist >= 10.0 * lambda)) {
        std::ostringstream os;
        os << "test point " << i << " is " << dist / lambda
           << " wavelengths from element " << n << " (need >= 10)";
        throw PreconditionError(os.str());
      }
      const Vec3 rh = r / dist;
      // l * Omega^T G_ff Omega, G_ff = -j eta kap/(4 pi d) e^{-j kap d}(I - rr)
      const Complex gff = -kJ * k.eta * kap / (4.0 * kPi * dist) *
                          std::exp(-kJ * (kap * dist));
      out.Hc(i, n) = norm * d.length * gff *
                     transverse(tp.rx_orientations[i], rh, d.orientation);
    }
  }
  std::ostringstream os;
  os << "far-field, " << K << " test points";
  out.description = os.str();
  return out;
}

void NlosScene::validate(const DsaGeometry& g) const {
  if (scatter_points.empty()) throw PreconditionError("NLOS scene has no paths");
  if (reflection_coeffs.size() != scatter_points.size()) {
    throw PreconditionError("one reflection coefficient per reflector");
  }
  if (rx_array.points.empty() ||
      rx_array.rx_orientations.size() != rx_array.points.size()) {
    throw PreconditionError("NLOS scene needs a receive array");
  }
  const double lim = 10.0 * g.lambda;
  for (std::size_t s = 0; s < scatter_points.size(); ++s) {
    for (std::size_t n = 0; n < g.n(); ++n) {
      if ((scatter_points[s] - g.element(n).position).norm() < lim) {
        throw PreconditionError("reflector closer than 10 lambda to the array");
      }
    }
    for (const Vec3& t : rx_array.points) {
      if ((scatter_points[s] - t).norm() < lim) {
        throw PreconditionError("reflector closer than 10 lambda to receiver");
      }
    }
  }
}

TestPointSet make_rx_ula(const RxUlaSpec& spec, const Carrier& carrier) {
  if (spec.elements < 1) throw DomainError("receive ULA needs elements");
  const double sp = spec.spacing > 0.0 ? spec.spacing : carrier.lambda / 2.0;
  const Vec3 u = spec.axis.normalized();
  TestPointSet t;
  t.rx_gain = spec.rx_gain;
  for (int i = 0; i < spec.elements; ++i) {
    t.points.push_back(spec.center + (i - 0.5 * (spec.elements - 1)) * sp * u);
    t.rx_orientations.push_back(spec.orientation.normalized());
  }
  return t;
}

NlosScene reference_nlos_scene(const Carrier& carrier,
                               const NlosReferenceSpec& spec) {
  NlosScene scene;
  for (double deg : spec.scatter_angles_deg) {
    const double a = deg * kPi / 180.0;
    scene.scatter_points.emplace_back(spec.scatter_distance * std::sin(a), 0.0,
                                      spec.scatter_distance * std::cos(a));
    scene.reflection_coeffs.emplace_back(1.0, 0.0);
  }
  const int n = static_cast<int>(scene.scatter_points.size());
  if (spec.align_first < 0 || spec.align_first >= n || spec.align_second < 0 ||
      spec.align_second >= n || spec.align_first == spec.align_second) {
    throw DomainError("reference scene: bad alignment indices");
  }
  // Intersect the line s1 + t (s2 - s1), t < 0, with the circle |p| = rx.
  const Vec3 s1 = scene.scatter_points[spec.align_first];
  const Vec3 dir = scene.scatter_points[spec.align_second] - s1;
  const double a = dir.squaredNorm();
  const double b = 2.0 * s1.dot(dir);
  const double c = s1.squaredNorm() - spec.rx_distance * spec.rx_distance;
  const double disc = b * b - 4.0 * a * c;
  if (!(disc > 0.0) || !(c < 0.0)) {
    throw DomainError("reference scene: receiver circle must enclose reflectors");
  }
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  const Vec3 center = s1 + t * dir;
  const double phi = std::atan2(center.x(), center.z());
  RxUlaSpec rx;
  rx.center = center;
  rx.axis = Vec3(std::cos(phi), 0.0, -std::sin(phi));
  rx.elements = spec.rx_elements;
  scene.rx_array = make_rx_ula(rx, carrier);
  return scene;
}

namespace {

void add_path(CMatrix& hc, const DsaGeometry& g, const NlosScene& scene,
              std::size_t s, const PhysicalConstants& k) {
  const double lambda = g.lambda;
  const double kap = wavenumber(lambda);
  const double norm = rx_normalization(lambda, scene.rx_array.rx_gain, k);
  const Vec3& sp = scene.scatter_points[s];
  const Complex gamma = scene.reflection_coeffs[s];
  const std::size_t N = g.n(), K = scene.rx_array.size();
  // first hop: field at the reflector per unit element current
  std::vector<CVec3> e1(N);
  for (std::size_t n = 0; n < N; ++n) {
    const Dipole& d = g.element(n);
    const Vec3 r = sp - d.position;
    const double dist = r.norm();
    const Vec3 rh = r / dist;
    const Complex pre = -kJ * k.eta * kap / (4.0 * kPi * dist) *
                        std::exp(-kJ * (kap * dist));
    const Vec3 tr = d.orientation - rh * rh.dot(d.orientation);
    e1[n] = d.length * pre * tr.cast<Complex>();
  }
  // second hop: isotropic re-radiation of the transverse field
  for (std::size_t i = 0; i < K; ++i) {
    const Vec3 r = scene.rx_array.points[i] - sp;
    const double dist = r.norm();
    const Vec3 rh = r / dist;
    const Vec3& o = scene.rx_array.rx_orientations[i];
    const Vec3 ot = o - rh * rh.dot(o);
    const Complex hop =
        gamma * lambda / (4.0 * kPi * dist) * std::exp(-kJ * (kap * dist));
    for (std::size_t n = 0; n < N; ++n) {
      hc(i, n) += norm * hop * ot.cast<Complex>().dot(e1[n]);
    }
  }
}

}  // namespace

Transimpedance transimpedance_nlos(const DsaGeometry& g, const NlosScene& scene,
                                   const PhysicalConstants& k) {
  scene.validate(g);
  Transimpedance out;
  out.Hc = CMatrix::Zero(scene.rx_array.size(), g.n());
  for (std::size_t s = 0; s < scene.scatter_points.size(); ++s) {
    add_path(out.Hc, g, scene, s, k);
  }
  std::ostringstream os;
  os << "NLOS, " << scene.scatter_points.size() << " reflectors, "
     << scene.rx_array.size() << "-element receiver";
  out.description = os.str();
  return out;
}

Transimpedance transimpedance_nlos_path(const DsaGeometry& g,
                                        const NlosScene& scene,
                                        std::size_t path,
                                        const PhysicalConstants& k) {
  scene.validate(g);
  if (path >= scene.scatter_points.size()) {
    throw PreconditionError("NLOS path index out of range");
  }
  Transimpedance out;
  out.Hc = CMatrix::Zero(scene.rx_array.size(), g.n());
  add_path(out.Hc, g, scene, path, k);
  out.description = "NLOS single path";
  return out;
}

CMatrix end_to_end(const CMatrix& hc, const CMatrix& wem, const CMatrix& wd) {
  if (hc.cols() != wem.rows() || wem.cols() != wd.rows()) {
    throw PreconditionError("end_to_end: dimension mismatch");
  }
  return hc * (wem * wd);
}

double friis_factor(double distance, double lambda, double rx_gain) {
  const double f = 4.0 * kPi * distance / lambda;
  return f * f / rx_gain;
}

RVector gain_from_channel(const CMatrix& h, const CMatrix& wd, double R,
                          const TestPointSet& tp, double lambda) {
  if (h.rows() != static_cast<Eigen::Index>(tp.size())) {
    throw PreconditionError("gain: one channel row per test point");
  }
  const double wn = wd.squaredNorm();
  if (!(wn > 0.0)) throw PreconditionError("gain: zero precoder");
  RVector g(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    g(i) = R * h.row(i).squaredNorm() / wn *
           friis_factor(tp.points[i].norm(), lambda, tp.rx_gain);
  }
  return g;
}

RMatrix stream_gain_from_channel(const CMatrix& h, const CMatrix& wd, double R,
                                 const TestPointSet& tp, double lambda) {
  if (h.rows() != static_cast<Eigen::Index>(tp.size()) ||
      h.cols() != wd.cols()) {
    throw PreconditionError("stream gain: dimension mismatch");
  }
  RMatrix g(h.rows(), h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    const double wn = wd.col(j).squaredNorm();
    if (!(wn > 0.0)) throw PreconditionError("stream gain: zero column");
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      g(i, j) = R * std::norm(h(i, j)) / wn *
                friis_factor(tp.points[i].norm(), lambda, tp.rx_gain);
    }
  }
  return g;
}

RVector gain_at_points(const NetworkState& s, const DsaGeometry& g,
                       const CMatrix& wd, const TestPointSet& tp,
                       const PhysicalConstants& k) {
  const Transimpedance t = transimpedance_farfield(g, tp, k);
  return gain_from_channel(end_to_end(t.Hc, s.Wem(), wd), wd, s.R(), tp,
                           g.lambda);
}

std::vector<double> degree_grid(double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor(360.0 / step + 1e-9));
  for (int i = 0; i < n; ++i) out.push_back(i * step);
  return out;
}

namespace {

template <typename Fn>
void for_angle_blocks(std::size_t n, int threads, Fn&& fn) {
  // Pattern rows are independent; blocks of 16 angles keep overhead low.
  const std::size_t block = 16;
  const std::size_t nb = (n + block - 1) / block;
  parallel_for(nb, threads, [&](std::size_t b) {
    fn(b * block, std::min(n, (b + 1) * block));
  });
}

}  // namespace

std::vector<PatternSample> gain_pattern(const NetworkState& s,
                                        const DsaGeometry& g,
                                        const CMatrix& wd,
                                        const std::vector<double>& angles_deg,
                                        double d, int threads, double rx_gain,
                                        const PhysicalConstants& k) {
  if (d < 10.0 * g.lambda) {
    throw PreconditionError("gain_pattern: distance below 10 wavelengths");
  }
  std::vector<PatternSample> out(angles_deg.size());
  const CMatrix b = s.Wem() * wd;
  for_angle_blocks(angles_deg.size(), threads, [&](std::size_t lo,
                                                   std::size_t hi) {
    std::vector<double> sub(angles_deg.begin() + lo, angles_deg.begin() + hi);
    const TestPointSet tp =
        build_test_points_deg(sub, d, Carrier{g.f0, g.lambda}, rx_gain);
    const Transimpedance t = transimpedance_farfield(g, tp, k);
    const RVector gl = gain_from_channel(t.Hc * b, wd, s.R(), tp, g.lambda);
    for (std::size_t i = lo; i < hi; ++i) {
      out[i].angle_deg = angles_deg[i];
      out[i].gain_db = to_db_power(gl(i - lo));
    }
  });
  return out;
}

std::vector<PatternSample> gain_pattern(const DsaGeometry& g,
                                        const LoadVector& loads,
                                        const CMatrix& wd,
                                        const std::vector<double>& angles_deg,
                                        double d, double R, int threads) {
  const AssembledImpedance z = assemble_impedance(g);
  const NetworkState s(z.partition, loads, R);
  return gain_pattern(s, g, wd, angles_deg, d, threads);
}

std::vector<std::vector<PatternSample>> stream_patterns(
    const NetworkState& s, const DsaGeometry& g, const CMatrix& wd,
    const std::vector<double>& angles_deg, double d, int threads,
    double rx_gain) {
  if (d < 10.0 * g.lambda) {
    throw PreconditionError("stream_patterns: distance below 10 wavelengths");
  }
  const Eigen::Index m = wd.cols();
  std::vector<std::vector<PatternSample>> out(
      m, std::vector<PatternSample>(angles_deg.size()));
  const CMatrix b = s.Wem() * wd;
  for_angle_blocks(angles_deg.size(), threads, [&](std::size_t lo,
                                                   std::size_t hi) {
    std::vector<double> sub(angles_deg.begin() + lo, angles_deg.begin() + hi);
    const TestPointSet tp =
        build_test_points_deg(sub, d, Carrier{g.f0, g.lambda}, rx_gain);
    const Transimpedance t = transimpedance_farfield(g, tp);
    const RMatrix gl =
        stream_gain_from_channel(t.Hc * b, wd, s.R(), tp, g.lambda);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (std::size_t i = lo; i < hi; ++i) {
        out[j][i].angle_deg = angles_deg[i];
        out[j][i].gain_db = to_db_power(gl(i - lo, j));
      }
    }
  });
  return out;
}

double sphere_flux(const std::vector<Dipole>& elements, const CVector& currents,
                   double lambda, double radius, int n_theta, int n_phi,
                   const PhysicalConstants& k) {
  if (n_theta < 1 || n_phi < 1 || !(radius > 0.0)) {
    throw PreconditionError("sphere_flux: bad quadrature");
  }
  const double dth = kPi / n_theta, dph = 2.0 * kPi / n_phi;
  double total = 0.0;
  std::vector<Vec3> ring(n_phi);
  for (int it = 0; it < n_theta; ++it) {
    const double th = (it + 0.5) * dth;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double ph = (ip + 0.5) * dph;
      ring[ip] = radius * Vec3(std::sin(th) * std::cos(ph),
                               std::sin(th) * std::sin(ph), std::cos(th));
    }
    const std::vector<CVec3> e = efield_at(ring, elements, currents, lambda, k);
    double row = 0.0;
    for (const CVec3& v : e) row += v.squaredNorm();
    total += row / k.eta * radius * radius * std::sin(th) * dth * dph;
  }
  return total;
}

double mean_gain_over_sphere(const NetworkState& s, const DsaGeometry& g,
                             const CMatrix& wd, double radius, int n_theta,
                             int n_phi, const PhysicalConstants& k) {
  const double dth = kPi / n_theta, dph = 2.0 * kPi / n_phi;
  const CMatrix b = s.Wem() * wd;
  double total = 0.0;
  for (int it = 0; it < n_theta; ++it) {
    const double th = (it + 0.5) * dth;
    TestPointSet tp;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double ph = (ip + 0.5) * dph;
      const Vec3 rh(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                    std::cos(th));
      const Vec3 eth(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
                     -std::sin(th));
      const Vec3 eph(-std::sin(ph), std::cos(ph), 0.0);
      tp.points.push_back(radius * rh);
      tp.rx_orientations.push_back(eth);
      tp.points.push_back(radius * rh);
      tp.rx_orientations.push_back(eph);
    }
    const Transimpedance t = transimpedance_farfield(g, tp, k);
    const RVector gl = gain_from_channel(t.Hc * b, wd, s.R(), tp, g.lambda);
    double row = 0.0;
    for (Eigen::Index i = 0; i < gl.size(); ++i) row += gl(i);
    total += row * std::sin(th) * dth * dph;
  }
  return total / (4.0 * kPi);
}

}  // namespace dsa
