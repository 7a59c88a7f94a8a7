// SPDX-License-Identifier: Apache-2.0
#include "dsa/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dsa/errors.hpp"

namespace dsa {

using nlohmann::json;

namespace {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<GeometryKind> kGeometryKinds[] = {
    {GeometryKind::Cylinder, "cylinder"}, {GeometryKind::RandomDisk, "random_disk"},
    {GeometryKind::Ula, "ula"},           {GeometryKind::Uca, "uca"},
    {GeometryKind::Single, "single"},     {GeometryKind::File, "file"}};
constexpr EnumName<TargetKind> kTargetKinds[] = {
    {TargetKind::Beamsteer, "beamsteer"},
    {TargetKind::ZfMiso, "zf-miso"},
    {TargetKind::SvdMimo, "svd-mimo"}};
constexpr EnumName<ThetaInit> kInits[] = {{ThetaInit::Zeros, "zeros"},
                                          {ThetaInit::Random, "random"},
                                          {ThetaInit::Resonant, "resonant"}};
constexpr EnumName<ObjectiveVariant> kVariants[] = {
    {ObjectiveVariant::Direct, "direct"},
    {ObjectiveVariant::UProjected, "u-projected"}};
constexpr EnumName<SweepVariable> kSweepVars[] = {
    {SweepVariable::None, "none"},
    {SweepVariable::DeltaL, "delta_l"},
    {SweepVariable::Layers, "L_R"},
    {SweepVariable::Ns, "Ns"},
    {SweepVariable::SigmaRel, "sigma_rel"}};
constexpr EnumName<RingPopulation> kPopulations[] = {
    {RingPopulation::Calibrated, "calibrated"},
    {RingPopulation::HalfWavelengthArc, "half_wavelength_arc"}};
constexpr EnumName<ActivePlacement> kPlacements[] = {
    {ActivePlacement::AxisStack, "axis_stack"},
    {ActivePlacement::CenterRing, "center_ring"}};
constexpr EnumName<TableFormat> kFormats[] = {{TableFormat::Csv, "csv"},
                                              {TableFormat::Json, "json"}};

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

// Walks one JSON object, remembering which keys were consumed so unknown
// keys can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw ConfigError("config " + source_ + ": field '" + field + "': " + why);
  }

  std::string field(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out, bool positive = false,
              bool nonnegative = false) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(field(key), "must be finite");
      if (positive && !(out > 0.0)) fail(field(key), "must be > 0");
      if (nonnegative && out < 0.0) fail(field(key), "must be >= 0");
    }
  }

  void integer(const char* key, int& out, int min_value) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(field(key), "expected integer");
      const long long x = v->get<long long>();
      if (x < min_value || x > 1000000000LL) {
        fail(field(key), "must be >= " + std::to_string(min_value));
      }
      out = static_cast<int>(x);
    }
  }

  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        fail(field(key), "expected non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected string");
      out = v->get<std::string>();
    }
  }

  template <typename E, std::size_t N>
  void choice(const char* key, E& out, const EnumName<E> (&table)[N]) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected string");
      const std::string s = v->get<std::string>();
      for (const auto& e : table) {
        if (s == e.name) {
          out = e.value;
          return;
        }
      }
      std::string opts;
      for (const auto& e : table) opts += std::string(opts.empty() ? "" : ", ") + e.name;
      fail(field(key), "unknown value '" + s + "' (expected one of: " + opts + ")");
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(field(key), "expected array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(field(key), "expected array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void integers(const char* key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(field(key), "expected array of integers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number_integer()) fail(field(key), "expected array of integers");
        out.push_back(x.get<int>());
      }
    }
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    if (const json* v = find(key)) {
      Reader sub(*v, field(key), source_);
      fn(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(field(it.key().c_str()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

}  // namespace

const char* to_string(GeometryKind k) { return enum_name(kGeometryKinds, k); }
const char* to_string(SweepVariable v) { return enum_name(kSweepVars, v); }

Carrier ScenarioConfig::carrier() const {
  return Carrier::from_frequency(frequency_hz);
}

DipoleDims ScenarioConfig::dims() const {
  const double lambda = carrier().lambda;
  return DipoleDims{dipole_length_wavelengths * lambda,
                    dipole_radius_wavelengths * lambda};
}

double ScenarioConfig::rx_gain_linear() const {
  return std::pow(10.0, rx_gain_db / 10.0);
}

std::string ScenarioConfig::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["frequency_hz"] = frequency_hz;
  j["reference_resistance_ohm"] = reference_resistance_ohm;
  j["rx_gain_db"] = rx_gain_db;
  j["dipole"] = {{"length_wavelengths", dipole_length_wavelengths},
                 {"radius_wavelengths", dipole_radius_wavelengths}};
  j["polarization"] = polarization;
  const GeometryConfig& g = geometry;
  j["geometry"] = {{"kind", enum_name(kGeometryKinds, g.kind)},
                   {"na", g.na},
                   {"delta_l_wavelengths", g.delta_l_wavelengths},
                   {"rings", g.rings},
                   {"layers", g.layers},
                   {"population", enum_name(kPopulations, g.population)},
                   {"active_placement", enum_name(kPlacements, g.placement)},
                   {"active_ring_radius_wavelengths",
                    g.active_ring_radius_wavelengths},
                   {"ns", g.ns},
                   {"seed", g.seed},
                   {"diameter_m", g.diameter_m},
                   {"spacing_m", g.spacing_m},
                   {"aperture_m", g.aperture_m},
                   {"path", g.path}};
  const UseCaseConfig& u = usecase;
  j["usecase"] = {{"kind", enum_name(kTargetKinds, u.kind)},
                  {"steer_deg", u.steer_deg},
                  {"test_points", u.test_points},
                  {"prx_w", u.prx_w},
                  {"distance_m", u.distance_m},
                  {"users_deg", u.users_deg},
                  {"layers", u.layers},
                  {"scene",
                   {{"scatter_angles_deg", u.scene.scatter_angles_deg},
                    {"scatter_distance_m", u.scene.scatter_distance_m},
                    {"rx_distance_m", u.scene.rx_distance_m},
                    {"rx_elements", u.scene.rx_elements},
                    {"align", u.scene.align}}},
                  {"sigma_rel", u.sigma_rel}};
  const OptimizerConfig& o = optimizer;
  j["optimizer"] = {{"ni", o.ni},
                    {"nalt", o.nalt},
                    {"init", enum_name(kInits, o.init)},
                    {"seed", o.seed},
                    {"variant", enum_name(kVariants, o.variant)},
                    {"digital_precoding", o.digital_precoding}};
  j["sweep"] = {{"variable", enum_name(kSweepVars, sweep.variable)},
                {"values", sweep.values},
                {"trials", sweep.trials}};
  j["pattern"] = {{"step_deg", pattern.step_deg}};
  j["outputs"] = {{"directory", outputs.directory},
                  {"format", enum_name(kFormats, outputs.format)}};
  return j.dump(2);
}

std::uint64_t ScenarioConfig::hash() const { return fnv1a64(to_json()); }

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "config " << source << ":" << line << ":" << col
       << ": syntax error: " << e.what();
    throw ConfigError(os.str());
  }
  ScenarioConfig c;
  Reader r(root, "", source);
  r.string("name", c.name);
  r.number("frequency_hz", c.frequency_hz, true);
  r.number("reference_resistance_ohm", c.reference_resistance_ohm, true);
  r.number("rx_gain_db", c.rx_gain_db);
  r.object("dipole", [&](Reader& d) {
    d.number("length_wavelengths", c.dipole_length_wavelengths, true);
    d.number("radius_wavelengths", c.dipole_radius_wavelengths, true);
    if (c.dipole_length_wavelengths >= 0.1) {
      d.fail(d.field("length_wavelengths"), "must be below 0.1");
    }
    if (c.dipole_radius_wavelengths >= 0.1) {
      d.fail(d.field("radius_wavelengths"), "must be below 0.1");
    }
  });
  r.string("polarization", c.polarization);
  if (c.polarization != "vertical") {
    r.fail("polarization", "only 'vertical' (y-oriented dipoles) is supported");
  }
  r.object("geometry", [&](Reader& g) {
    GeometryConfig& x = c.geometry;
    g.choice("kind", x.kind, kGeometryKinds);
    g.integer("na", x.na, 1);
    g.number("delta_l_wavelengths", x.delta_l_wavelengths, true);
    g.integer("rings", x.rings, 1);
    g.integer("layers", x.layers, 1);
    g.choice("population", x.population, kPopulations);
    g.choice("active_placement", x.placement, kPlacements);
    g.number("active_ring_radius_wavelengths", x.active_ring_radius_wavelengths,
             true);
    g.integer("ns", x.ns, 1);
    g.u64("seed", x.seed);
    g.number("diameter_m", x.diameter_m, true);
    g.number("spacing_m", x.spacing_m, false, true);
    g.number("aperture_m", x.aperture_m, true);
    g.string("path", x.path);
    if (x.kind == GeometryKind::File && x.path.empty()) {
      g.fail(g.field("path"), "required when kind is 'file'");
    }
  });
  r.object("usecase", [&](Reader& u) {
    UseCaseConfig& x = c.usecase;
    u.choice("kind", x.kind, kTargetKinds);
    u.numbers("steer_deg", x.steer_deg);
    u.integer("test_points", x.test_points, 1);
    u.number("prx_w", x.prx_w, true);
    u.number("distance_m", x.distance_m, true);
    u.numbers("users_deg", x.users_deg);
    u.integer("layers", x.layers, 1);
    u.object("scene", [&](Reader& s) {
      s.numbers("scatter_angles_deg", x.scene.scatter_angles_deg);
      s.number("scatter_distance_m", x.scene.scatter_distance_m, true);
      s.number("rx_distance_m", x.scene.rx_distance_m, true);
      s.integer("rx_elements", x.scene.rx_elements, 1);
      s.integers("align", x.scene.align);
      if (x.scene.align.size() != 2) {
        s.fail(s.field("align"), "expected two reflector indices");
      }
      if (x.scene.scatter_angles_deg.empty()) {
        s.fail(s.field("scatter_angles_deg"), "at least one reflector needed");
      }
    });
    u.numbers("sigma_rel", x.sigma_rel);
    if (x.steer_deg.empty()) u.fail(u.field("steer_deg"), "must not be empty");
    for (double s : x.sigma_rel) {
      if (s < 0.0) u.fail(u.field("sigma_rel"), "entries must be >= 0");
    }
  });
  r.object("optimizer", [&](Reader& o) {
    OptimizerConfig& x = c.optimizer;
    o.integer("ni", x.ni, 1);
    o.integer("nalt", x.nalt, 1);
    o.choice("init", x.init, kInits);
    o.u64("seed", x.seed);
    o.choice("variant", x.variant, kVariants);
    o.boolean("digital_precoding", x.digital_precoding);
  });
  r.object("sweep", [&](Reader& s) {
    s.choice("variable", c.sweep.variable, kSweepVars);
    s.numbers("values", c.sweep.values);
    s.integer("trials", c.sweep.trials, 1);
  });
  r.object("pattern", [&](Reader& p) {
    p.number("step_deg", c.pattern.step_deg, true);
  });
  r.object("outputs", [&](Reader& o) {
    o.string("directory", c.outputs.directory);
    o.choice("format", c.outputs.format, kFormats);
  });
  r.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config " + path + ": cannot open file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

DsaGeometry build_geometry(const ScenarioConfig& cfg) {
  const Carrier car = cfg.carrier();
  const DipoleDims dims = cfg.dims();
  const GeometryConfig& g = cfg.geometry;
  switch (g.kind) {
    case GeometryKind::Cylinder: {
      CylinderSpec s;
      s.delta_l = g.delta_l_wavelengths * car.lambda;
      s.rings = g.rings;
      s.layers = g.layers;
      s.na = g.na;
      s.population = g.population;
      s.placement = g.placement;
      s.active_ring_radius = g.active_ring_radius_wavelengths * car.lambda;
      return build_cylinder_dsa(s, car, dims);
    }
    case GeometryKind::RandomDisk:
      return build_random_disk_dsa(g.ns, g.diameter_m, car, g.na, g.seed, dims,
                                   g.placement,
                                   g.active_ring_radius_wavelengths * car.lambda);
    case GeometryKind::Ula: {
      const double sp = g.spacing_m > 0.0 ? g.spacing_m : g.aperture_m / g.na;
      return build_ula(g.na, sp, car, dims);
    }
    case GeometryKind::Uca:
      return build_uca(g.na, g.diameter_m, car, dims);
    case GeometryKind::Single:
      return build_active_stack(g.na, car, dims, g.placement,
                                g.active_ring_radius_wavelengths * car.lambda);
    case GeometryKind::File: {
      std::ifstream f(g.path);
      if (!f) throw ConfigError("geometry file " + g.path + ": cannot open");
      return read_geometry(f);
    }
  }
  throw ConfigError("unknown geometry kind");
}

}  // namespace dsa
