// SPDX-License-Identifier: Apache-2.0
#include "dsa/geometry.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "dsa/diagnostics.hpp"
#include "dsa/errors.hpp"
#include "dsa/random.hpp"

namespace dsa {

Carrier Carrier::from_frequency(double f0, const PhysicalConstants& k) {
  if (!(f0 > 0.0)) throw DomainError("carrier frequency must be positive");
  return Carrier{f0, k.wavelength(f0)};
}

DipoleDims DipoleDims::defaults(double lambda) {
  return DipoleDims{lambda / 50.0, lambda / 100.0};
}

std::vector<Dipole> DsaGeometry::elements() const {
  std::vector<Dipole> out(active);
  out.insert(out.end(), scatterers.begin(), scatterers.end());
  return out;
}

void DsaGeometry::validate() const {
  if (!(lambda > 0.0) || !(f0 > 0.0)) {
    throw DomainError("geometry wavelength and frequency must be positive");
  }
  const std::size_t total = n();
  for (std::size_t i = 0; i < total; ++i) element(i).validate(lambda);
  const double tol = 1e-9 * lambda;
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) {
      if ((element(i).position - element(j).position).norm() <= tol) {
        std::ostringstream os;
        os << "elements " << i << " and " << j << " coincide";
        throw ConstructionError(os.str());
      }
    }
  }
}

void TestPointSet::check_far_field(const DsaGeometry& g) const {
  for (const Vec3& t : points) {
    for (std::size_t n = 0; n < g.n(); ++n) {
      if ((t - g.element(n).position).norm() < 10.0 * g.lambda) {
        warn("test point closer than 10 wavelengths to an array element");
        return;
      }
    }
  }
}

int ring_element_count(double radius, double lambda, RingPopulation pop) {
  double n = 0.0;
  switch (pop) {
    case RingPopulation::Calibrated:
      n = std::floor(17.0 * radius / lambda + 11.35 + 0.5);
      break;
    case RingPopulation::HalfWavelengthArc:
      n = std::floor(2.0 * kPi * radius / (lambda / 2.0) + 0.5);
      break;
  }
  return std::max(1, static_cast<int>(n));
}

namespace {

Dipole ydipole(const Vec3& p, const DipoleDims& dims) {
  Dipole d;
  d.position = p;
  d.orientation = Vec3::UnitY();
  d.length = dims.length;
  d.radius = dims.radius;
  return d;
}

double centered(int index, int count, double spacing) {
  return (index - 0.5 * (count - 1)) * spacing;
}

DsaGeometry empty_geometry(const Carrier& carrier) {
  DsaGeometry g;
  g.lambda = carrier.lambda;
  g.f0 = carrier.f0;
  return g;
}

void add_actives(DsaGeometry& g, int na, const DipoleDims& dims,
                 ActivePlacement placement, double ring_radius) {
  if (placement == ActivePlacement::CenterRing && na > 1) {
    const double rho = ring_radius > 0.0 ? ring_radius : g.lambda / 8.0;
    for (int m = 0; m < na; ++m) {
      const double a = 2.0 * kPi * (m + 0.5) / na;
      g.active.push_back(
          ydipole(Vec3(rho * std::sin(a), 0.0, rho * std::cos(a)), dims));
    }
    return;
  }
  for (int m = 0; m < na; ++m) {
    g.active.push_back(
        ydipole(Vec3(0.0, centered(m, na, g.lambda / 2.0), 0.0), dims));
  }
}

}  // namespace

DsaGeometry build_cylinder_dsa(const CylinderSpec& spec, const Carrier& carrier,
                               const DipoleDims& dims) {
  if (!(spec.delta_l > 0.0) || spec.rings < 1 || spec.layers < 1 ||
      spec.na < 1) {
    throw DomainError("cylinder: need delta_l > 0, L >= 1, L_R >= 1, na >= 1");
  }
  DsaGeometry g = empty_geometry(carrier);
  add_actives(g, spec.na, dims, spec.placement, spec.active_ring_radius);
  for (int h = 0; h < spec.layers; ++h) {
    const double y = centered(h, spec.layers, carrier.lambda / 2.0);
    for (int l = 1; l <= spec.rings; ++l) {
      const double rho = l * spec.delta_l;
      const int count = ring_element_count(rho, carrier.lambda, spec.population);
      for (int m = 0; m < count; ++m) {
        const double a = 2.0 * kPi * m / count;
        g.scatterers.push_back(
            ydipole(Vec3(rho * std::sin(a), y, rho * std::cos(a)), dims));
      }
    }
  }
  g.validate();
  return g;
}

DsaGeometry build_cylinder_dsa(const CylinderSpec& spec,
                               const Carrier& carrier) {
  return build_cylinder_dsa(spec, carrier, DipoleDims::defaults(carrier.lambda));
}

DsaGeometry build_random_disk_dsa(int ns, double diameter,
                                  const Carrier& carrier, int na,
                                  std::uint64_t seed, const DipoleDims& dims,
                                  ActivePlacement placement,
                                  double active_ring_radius) {
  if (ns < 1 || !(diameter > 0.0) || na < 1) {
    throw DomainError("random disk: need ns >= 1, diameter > 0, na >= 1");
  }
  DsaGeometry g = empty_geometry(carrier);
  add_actives(g, na, dims, placement, active_ring_radius);
  Rng rng(seed);
  const double rmax = diameter / 2.0;
  while (static_cast<int>(g.scatterers.size()) < ns) {
    const double x = (2.0 * rng.uniform() - 1.0) * rmax;
    const double z = (2.0 * rng.uniform() - 1.0) * rmax;
    if (x * x + z * z > rmax * rmax) continue;
    g.scatterers.push_back(ydipole(Vec3(x, 0.0, z), dims));
  }
  g.validate();
  return g;
}

DsaGeometry build_random_disk_dsa(int ns, double diameter,
                                  const Carrier& carrier, int na,
                                  std::uint64_t seed) {
  return build_random_disk_dsa(ns, diameter, carrier, na, seed,
                               DipoleDims::defaults(carrier.lambda));
}

DsaGeometry build_ula(int na, double spacing, const Carrier& carrier,
                      const DipoleDims& dims) {
  if (na < 2 || !(spacing > 0.0)) {
    throw DomainError("ula: need na >= 2 and positive spacing");
  }
  DsaGeometry g = empty_geometry(carrier);
  for (int m = 0; m < na; ++m) {
    g.active.push_back(ydipole(Vec3(0.0, 0.0, centered(m, na, spacing)), dims));
  }
  g.validate();
  return g;
}

DsaGeometry build_ula(int na, double spacing, const Carrier& carrier) {
  return build_ula(na, spacing, carrier, DipoleDims::defaults(carrier.lambda));
}

DsaGeometry build_uca(int na, double diameter, const Carrier& carrier,
                      const DipoleDims& dims) {
  if (na < 2 || !(diameter > 0.0)) {
    throw DomainError("uca: need na >= 2 and positive diameter");
  }
  DsaGeometry g = empty_geometry(carrier);
  const double rho = diameter / 2.0;
  for (int m = 0; m < na; ++m) {
    const double a = 2.0 * kPi * m / na;
    g.active.push_back(
        ydipole(Vec3(rho * std::sin(a), 0.0, rho * std::cos(a)), dims));
  }
  g.validate();
  return g;
}

DsaGeometry build_uca(int na, double diameter, const Carrier& carrier) {
  return build_uca(na, diameter, carrier, DipoleDims::defaults(carrier.lambda));
}

DsaGeometry build_active_stack(int na, const Carrier& carrier,
                               const DipoleDims& dims,
                               ActivePlacement placement,
                               double active_ring_radius) {
  if (na < 1) throw DomainError("active stack: na >= 1");
  DsaGeometry g = empty_geometry(carrier);
  add_actives(g, na, dims, placement, active_ring_radius);
  g.validate();
  return g;
}

TestPointSet build_test_points_deg(const std::vector<double>& angles_deg,
                                   double d, const Carrier& carrier,
                                   double rx_gain) {
  if (!(d > 0.0)) throw DomainError("test points: distance must be positive");
  if (d < 10.0 * carrier.lambda) {
    warn("test points closer than 10 wavelengths");
  }
  TestPointSet t;
  t.rx_gain = rx_gain;
  for (double deg : angles_deg) {
    const double phi = deg * kPi / 180.0;
    t.points.emplace_back(d * std::sin(phi), 0.0, d * std::cos(phi));
    t.rx_orientations.push_back(Vec3::UnitY());
  }
  return t;
}

TestPointSet build_test_ring(int k, double d, const Carrier& carrier,
                             double rx_gain) {
  if (k < 1) throw DomainError("test ring: need k >= 1");
  std::vector<double> deg(k);
  for (int i = 0; i < k; ++i) deg[i] = 360.0 * i / k;
  return build_test_points_deg(deg, d, carrier, rx_gain);
}

void write_geometry(std::ostream& os, const DsaGeometry& g) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  os << "# role px py pz ox oy oz length radius\n";
  os << "lambda " << g.lambda << "\n";
  os << "f0 " << g.f0 << "\n";
  auto rec = [&](const char* role, const Dipole& d) {
    os << role << ' ' << d.position.x() << ' ' << d.position.y() << ' '
       << d.position.z() << ' ' << d.orientation.x() << ' '
       << d.orientation.y() << ' ' << d.orientation.z() << ' ' << d.length
       << ' ' << d.radius << '\n';
  };
  for (const Dipole& d : g.active) rec("active", d);
  for (const Dipole& d : g.scatterers) rec("scatterer", d);
  os.flags(flags);
  os.precision(prec);
}

DsaGeometry read_geometry(std::istream& is) {
  is.imbue(std::locale::classic());
  DsaGeometry g;
  std::string line;
  int lineno = 0;
  bool seen_scatterer = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string key;
    ls >> key;
    auto fail = [&](const std::string& why) {
      std::ostringstream os;
      os << "geometry line " << lineno << ": " << why;
      throw ConfigError(os.str());
    };
    if (key == "lambda") {
      if (!(ls >> g.lambda)) fail("bad lambda");
    } else if (key == "f0") {
      if (!(ls >> g.f0)) fail("bad f0");
    } else if (key == "active" || key == "scatterer") {
      Dipole d;
      if (!(ls >> d.position.x() >> d.position.y() >> d.position.z() >>
            d.orientation.x() >> d.orientation.y() >> d.orientation.z() >>
            d.length >> d.radius)) {
        fail("expected 8 numbers after role");
      }
      if (key == "active") {
        if (seen_scatterer) fail("active records must precede scatterers");
        g.active.push_back(d);
      } else {
        seen_scatterer = true;
        g.scatterers.push_back(d);
      }
    } else {
      fail("unknown record '" + key + "'");
    }
  }
  g.validate();
  return g;
}

}  // namespace dsa
