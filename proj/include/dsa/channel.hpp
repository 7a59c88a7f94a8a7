// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dsa/em_dipole.hpp"
#include "dsa/geometry.hpp"
#include "dsa/network.hpp"
#include "dsa/types.hpp"

namespace dsa {

struct Transimpedance {
  CMatrix Hc;  // K x N, receive normalization folded in
  std::string description;

  Eigen::Index rows() const { return Hc.rows(); }
  Eigen::Index cols() const { return Hc.cols(); }
};

// Far-field transimpedance. Throws PreconditionError for test points closer
// than 10 lambda to any element.
Transimpedance transimpedance_farfield(const DsaGeometry& g,
                                       const TestPointSet& tp,
                                       const PhysicalConstants& k = {});

/// Point reflectors between the array and a receive ULA.
struct NlosScene {
  std::vector<Vec3> scatter_points;
  std::vector<Complex> reflection_coeffs;
  TestPointSet rx_array;

  void validate(const DsaGeometry& g) const;
};

struct RxUlaSpec {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  int elements = 20;
  double spacing = 0.0;  // 0: lambda/2
  Vec3 orientation = Vec3::UnitY();
  double rx_gain = 1.0;
};

TestPointSet make_rx_ula(const RxUlaSpec& spec, const Carrier& carrier);

struct NlosReferenceSpec {
  std::vector<double> scatter_angles_deg{-43.0, -14.0, 14.0, 43.0, 72.0};
  double scatter_distance = 5.0;
  double rx_distance = 10.0;
  int rx_elements = 20;
  // Receiver placed on the line through these two reflectors (indices into
  // scatter_angles_deg), on the far side of the first one.
  int align_first = 3;
  int align_second = 4;
};

// Reflectors in the x-z plane at the given angles; receive ULA centered
// rx_distance from the origin, axis perpendicular to its line of sight.
NlosScene reference_nlos_scene(const Carrier& carrier,
                               const NlosReferenceSpec& spec = {});

// Sum over paths in scene order.
Transimpedance transimpedance_nlos(const DsaGeometry& g, const NlosScene& scene,
                                   const PhysicalConstants& k = {});
// Contribution of a single reflector.
Transimpedance transimpedance_nlos_path(const DsaGeometry& g,
                                        const NlosScene& scene,
                                        std::size_t path,
                                        const PhysicalConstants& k = {});

CMatrix end_to_end(const CMatrix& hc, const CMatrix& wem, const CMatrix& wd);

// (4 pi d / lambda)^2 / G_r
double friis_factor(double distance, double lambda, double rx_gain);

// Linear gain per test point for precoder Wd, E[x x^H] = (Ptx/N_a) I, Ptx
// normalized by ||Wd||_F^2 / R.
RVector gain_from_channel(const CMatrix& h, const CMatrix& wd, double R,
                          const TestPointSet& tp, double lambda);
// Per-stream variant: entry (k, j) uses column j of H and Wd only.
RMatrix stream_gain_from_channel(const CMatrix& h, const CMatrix& wd, double R,
                                 const TestPointSet& tp, double lambda);

RVector gain_at_points(const NetworkState& s, const DsaGeometry& g,
                       const CMatrix& wd, const TestPointSet& tp,
                       const PhysicalConstants& k = {});

struct PatternSample {
  double angle_deg = 0.0;
  double gain_db = 0.0;
};

// Evaluates the x-z ring pattern. Angles are split across `threads`
// workers; output order always follows `angles_deg`.
std::vector<PatternSample> gain_pattern(const NetworkState& s,
                                        const DsaGeometry& g,
                                        const CMatrix& wd,
                                        const std::vector<double>& angles_deg,
                                        double d, int threads = 1,
                                        double rx_gain = 1.0,
                                        const PhysicalConstants& k = {});
std::vector<PatternSample> gain_pattern(const DsaGeometry& g,
                                        const LoadVector& loads,
                                        const CMatrix& wd,
                                        const std::vector<double>& angles_deg,
                                        double d, double R = 50.0,
                                        int threads = 1);

// Per-stream patterns, one vector per column of Wd.
std::vector<std::vector<PatternSample>> stream_patterns(
    const NetworkState& s, const DsaGeometry& g, const CMatrix& wd,
    const std::vector<double>& angles_deg, double d, int threads = 1,
    double rx_gain = 1.0);

// 0.0, 1.0, ..., 359.0
std::vector<double> degree_grid(double step = 1.0);

// Radiated power from the far field on a sphere of the given radius,
// midpoint rule with n_theta x n_phi cells: sum |E|^2 / eta dA.
double sphere_flux(const std::vector<Dipole>& elements, const CVector& currents,
                   double lambda, double radius, int n_theta, int n_phi,
                   const PhysicalConstants& k = {});

// Integral of the gain over the sphere divided by 4 pi.
double mean_gain_over_sphere(const NetworkState& s, const DsaGeometry& g,
                             const CMatrix& wd, double radius, int n_theta,
                             int n_phi, const PhysicalConstants& k = {});

}  // namespace dsa
