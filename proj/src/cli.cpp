// SPDX-License-Identifier: Apache-2.0
#include "dsa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/io.hpp"
#include "dsa/linalg.hpp"
#include "dsa/random.hpp"
#include "dsa/scenario.hpp"

namespace dsa {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format;
};

struct Context {
  std::string command;
  ScenarioConfig cfg;
  Options opt;
  fs::path dir;
  TableFormat fmt = TableFormat::Csv;

  std::string stem(const std::string& name) const { return (dir / name).string(); }
};

Context make_context(const std::string& command, const Options& opt) {
  Context c;
  c.command = command;
  c.opt = opt;
  c.cfg = load_config(opt.config);
  if (opt.seed) c.cfg.optimizer.seed = *opt.seed;
  if (!opt.out.empty()) c.cfg.outputs.directory = opt.out;
  if (opt.format == "json") c.cfg.outputs.format = TableFormat::Json;
  if (opt.format == "csv") c.cfg.outputs.format = TableFormat::Csv;
  c.fmt = c.cfg.outputs.format;
  c.dir = c.cfg.outputs.directory;
  std::error_code ec;
  fs::create_directories(c.dir, ec);
  if (ec) throw Error("cannot create output directory " + c.dir.string());
  return c;
}

void write_json_file(const fs::path& path, const ojson& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << j.dump(2) << '\n';
}

ojson config_json(const ScenarioConfig& cfg) {
  return ojson::parse(cfg.to_json());
}

void write_manifest(const Context& c) {
  ojson m;
  m["tool"] = "dsa";
  m["version"] = kVersion;
  m["command"] = c.command;
  m["config_path"] = c.opt.config;
  m["config_hash"] = hex64(c.cfg.hash());
  m["seed"] = c.cfg.optimizer.seed;
  m["threads"] = c.opt.threads;
  m["config"] = config_json(c.cfg);
  write_json_file(c.dir / "manifest.json", m);
}

ojson complex_json(const CMatrix& m) {
  ojson re = ojson::array(), im = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson r = ojson::array(), q = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      q.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(q);
  }
  return ojson{{"re", re}, {"im", im}};
}

ojson solution_json(const OptSolution& s, const Context& c) {
  ojson j;
  j["theta_hat"] = std::vector<double>(s.theta_hat.data(),
                                       s.theta_hat.data() + s.theta_hat.size());
  j["Wd_hat"] = complex_json(s.Wd_hat);
  j["alpha_hat"] = s.alpha_hat;
  j["residual_history"] = s.residual_history;
  j["history_steps"] = s.history_steps;
  j["converged"] = s.converged;
  j["stop_reason"] = s.stop_reason;
  j["alternations"] = s.alternations;
  j["iterations"] = s.total_iterations;
  j["seed"] = c.cfg.optimizer.seed;
  j["config_hash"] = hex64(c.cfg.hash());
  j["config"] = config_json(c.cfg);
  return j;
}

ojson summary_header(const Context& c) {
  ojson j;
  j["command"] = c.command;
  j["name"] = c.cfg.name;
  j["config_hash"] = hex64(c.cfg.hash());
  j["seed"] = c.cfg.optimizer.seed;
  j["gain_reference"] = "radiated power (lossless elements)";
  return j;
}

Table pattern_table(const std::vector<PatternSample>& p) {
  Table t;
  t.header = {"angle_deg", "gain_db"};
  for (const PatternSample& s : p) t.add_row({s.angle_deg, s.gain_db});
  return t;
}

std::string angle_tag(double deg) {
  std::string s = format_number(deg, 6);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
    if (ch == '-') ch = 'm';
  }
  return s;
}

ojson beamsteer_json(const BeamsteerRun& r) {
  ojson j;
  j["steer_deg"] = r.steer_deg;
  j["k_star"] = r.k_star;
  j["baseline"] = r.baseline;
  j["peak_gain_db"] = r.peak_db;
  j["peak_angle_deg"] = r.peak_angle_deg;
  j["steer_gain_db"] = r.steer_gain_db;
  j["q_factor"] = r.power.q;
  j["radiated_power_w"] = r.power.radiated;
  j["alpha_hat"] = r.solution.alpha_hat;
  j["alpha_hat_sq"] = r.solution.alpha_hat * r.solution.alpha_hat;
  j["converged"] = r.solution.converged;
  j["stop_reason"] = r.solution.stop_reason;
  j["iterations"] = r.solution.total_iterations;
  return j;
}

void require_kind(const ScenarioConfig& cfg, TargetKind k) {
  if (cfg.usecase.kind != k) {
    throw ConfigError(std::string("config: field 'usecase.kind': this command "
                                  "needs '") +
                      to_string(k) + "'");
  }
}

int cmd_pattern(const Options& opt) {
  Context c = make_context("pattern", opt);
  require_kind(c.cfg, TargetKind::Beamsteer);
  write_manifest(c);
  const Scenario sc(c.cfg);
  ojson summary = summary_header(c);
  summary["ns"] = sc.geometry.ns();
  summary["na"] = sc.geometry.na();
  summary["runs"] = ojson::array();
  bool all_ok = true;
  for (double deg : c.cfg.usecase.steer_deg) {
    const BeamsteerRun r = run_beamsteer(sc, deg, opt.threads);
    const std::string tag = angle_tag(deg);
    write_table(pattern_table(r.pattern), c.stem("pattern_steer" + tag), c.fmt);
    write_json_file(c.dir / ("solution_steer" + tag + ".json"),
                    solution_json(r.solution, c));
    summary["runs"].push_back(beamsteer_json(r));
    all_ok = all_ok && r.solution.converged;
    std::cout << "steer " << format_number(deg, 6) << " deg: peak "
              << format_number(r.peak_db, 5) << " dB at "
              << format_number(r.peak_angle_deg, 6) << " deg, Q "
              << format_number(r.power.q, 5) << "\n";
  }
  summary["converged"] = all_ok;
  write_json_file(c.dir / "summary.json", summary);
  return all_ok ? kExitOk : kExitConvergence;
}

int cmd_sweep(const Options& opt) {
  Context c = make_context("sweep", opt);
  require_kind(c.cfg, TargetKind::Beamsteer);
  write_manifest(c);
  ojson summary = summary_header(c);
  summary["variable"] = to_string(c.cfg.sweep.variable);
  bool all_ok = true;
  if (c.cfg.sweep.variable == SweepVariable::SigmaRel) {
    const Scenario sc(c.cfg);
    const SensitivityRun r = run_sensitivity(sc, c.cfg.sweep.values,
                                             c.cfg.sweep.trials, opt.threads);
    Table t;
    t.header = {"sigma_rel", "trials",  "failed", "mean_gain_db",
                "mean_of_db", "std_db", "min_db", "max_db"};
    for (const PerturbationStats& s : r.stats) {
      t.add_row({s.sigma_rel, static_cast<long long>(s.trials),
                 static_cast<long long>(s.failed_trials), s.mean_gain_db,
                 s.mean_of_db, s.std_db, s.min_db, s.max_db});
    }
    write_table(t, c.stem("sensitivity"), c.fmt);
    write_json_file(c.dir / "solution.json", solution_json(r.base.solution, c));
    summary["base"] = beamsteer_json(r.base);
    all_ok = r.base.solution.converged;
    for (const PerturbationStats& s : r.stats) {
      std::cout << "sigma " << format_number(s.sigma_rel, 4) << ": mean gain "
                << format_number(s.mean_gain_db, 5) << " dB\n";
    }
  } else {
    const std::vector<SweepRow> rows = run_geometry_sweep(c.cfg, opt.threads);
    Table t;
    t.header = {"variable",       "value",         "ns",       "peak_gain_db",
                "peak_angle_deg", "steer_gain_db", "q_factor", "converged"};
    summary["rows"] = ojson::array();
    for (const SweepRow& r : rows) {
      t.add_row({std::string(to_string(c.cfg.sweep.variable)), r.value,
                 static_cast<long long>(r.ns), r.run.peak_db,
                 r.run.peak_angle_deg, r.run.steer_gain_db, r.run.power.q,
                 static_cast<long long>(r.run.solution.converged)});
      ojson row = beamsteer_json(r.run);
      row["value"] = r.value;
      row["ns"] = r.ns;
      summary["rows"].push_back(row);
      all_ok = all_ok && r.run.solution.converged;
      std::cout << to_string(c.cfg.sweep.variable) << " = "
                << format_number(r.value, 6) << " (N_s " << r.ns << "): peak "
                << format_number(r.run.peak_db, 5) << " dB, Q "
                << format_number(r.run.power.q, 5) << "\n";
    }
    write_table(t, c.stem("sweep"), c.fmt);
  }
  summary["converged"] = all_ok;
  write_json_file(c.dir / "summary.json", summary);
  return all_ok ? kExitOk : kExitConvergence;
}

int cmd_miso(const Options& opt) {
  Context c = make_context("miso", opt);
  require_kind(c.cfg, TargetKind::ZfMiso);
  write_manifest(c);
  const Scenario sc(c.cfg);
  const MisoRun r = run_miso(sc, opt.threads);
  Table t;
  t.header = {"user", "stream", "coupling_db"};
  double worst = -1e300;
  for (Eigen::Index i = 0; i < r.coupling.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.coupling.cols(); ++j) {
      t.add_row({static_cast<long long>(i), static_cast<long long>(j),
                 r.coupling(i, j)});
      if (i != j) worst = std::max(worst, r.coupling(i, j));
    }
  }
  write_table(t, c.stem("coupling"), c.fmt);
  for (std::size_t j = 0; j < r.stream_patterns.size(); ++j) {
    write_table(pattern_table(r.stream_patterns[j]),
                c.stem("pattern_stream" + std::to_string(j)), c.fmt);
  }
  write_json_file(c.dir / "solution.json", solution_json(r.solution, c));
  ojson summary = summary_header(c);
  summary["users_deg"] = c.cfg.usecase.users_deg;
  summary["max_offdiag_coupling_db"] = worst;
  summary["beta"] = r.target.beta;
  summary["alpha_hat_sq"] = r.solution.alpha_hat * r.solution.alpha_hat;
  summary["converged"] = r.solution.converged;
  summary["stop_reason"] = r.solution.stop_reason;
  write_json_file(c.dir / "summary.json", summary);
  std::cout << "max off-diagonal coupling " << format_number(worst, 5)
            << " dB\n";
  return r.solution.converged ? kExitOk : kExitConvergence;
}

Table layer_table(const LayerMatrix& l) {
  Table t;
  t.header = {"row", "col", "re", "im", "magnitude_db"};
  for (Eigen::Index i = 0; i < l.db.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.db.cols(); ++j) {
      t.add_row({static_cast<long long>(i), static_cast<long long>(j),
                 l.lambda_hat(i, j).real(), l.lambda_hat(i, j).imag(),
                 l.db(i, j)});
    }
  }
  return t;
}

int cmd_mimo(const Options& opt) {
  Context c = make_context("mimo", opt);
  require_kind(c.cfg, TargetKind::SvdMimo);
  write_manifest(c);
  const Scenario sc(c.cfg);
  const MimoRun r = run_mimo(sc);
  Table sv;
  sv.header = {"index", "sigma", "sigma_db"};
  const RVector& s = r.target.singular_values;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    sv.add_row({static_cast<long long>(i), s(i), to_db_amplitude(s(i))});
  }
  write_table(sv, c.stem("singular_values"), c.fmt);
  write_table(layer_table(r.layers), c.stem("lambda_hat"), c.fmt);
  Table loss;
  loss.header = {"layer", "lambda_db", "lambda_hat_db", "loss_db"};
  for (Eigen::Index i = 0; i < r.layers.db.rows(); ++i) {
    const double ld = to_db_amplitude(s(i));
    loss.add_row({static_cast<long long>(i), ld, r.layers.db(i, i),
                  ld - r.layers.db(i, i)});
  }
  write_table(loss, c.stem("layer_loss"), c.fmt);
  ojson summary = summary_header(c);
  summary["perturbed"] = ojson::array();
  for (std::size_t i = 0; i < r.sigmas.size(); ++i) {
    write_table(layer_table(r.perturbed[i]),
                c.stem("lambda_hat_sigma" + angle_tag(r.sigmas[i])), c.fmt);
    summary["perturbed"].push_back(
        {{"sigma_rel", r.sigmas[i]},
         {"min_separation_db", min_row_separation_db(r.perturbed[i].db)}});
  }
  write_json_file(c.dir / "solution.json", solution_json(r.solution, c));
  const Eigen::Index na = static_cast<Eigen::Index>(sc.geometry.na());
  if (s.size() > na) {
    summary["rank_gap_db"] =
        to_db_amplitude(s(na - 1)) - to_db_amplitude(s(na));
  }
  summary["min_separation_db"] = min_row_separation_db(r.layers.db);
  summary["alpha_hat_sq"] = r.solution.alpha_hat * r.solution.alpha_hat;
  summary["converged"] = r.solution.converged;
  summary["stop_reason"] = r.solution.stop_reason;
  write_json_file(c.dir / "summary.json", summary);
  std::cout << "min diagonal/off-diagonal separation "
            << format_number(min_row_separation_db(r.layers.db), 5) << " dB\n";
  return r.solution.converged ? kExitOk : kExitConvergence;
}

int cmd_validate(const Options& opt) {
  Context c = make_context("validate", opt);
  write_manifest(c);
  const Scenario sc(c.cfg);
  const DsaGeometry& g = sc.geometry;
  const double R = c.cfg.reference_resistance_ohm;
  ojson checks = ojson::array();
  bool all = true;
  auto check = [&](const std::string& name, bool ok, double value,
                   const std::string& detail) {
    checks.push_back(
        {{"check", name}, {"pass", ok}, {"value", value}, {"detail", detail}});
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all = all && ok;
  };
  check("geometry", true, static_cast<double>(g.n()),
        std::to_string(g.na()) + " active, " + std::to_string(g.ns()) +
            " scatterers, distinct positions");
  const CMatrix& z = sc.impedance.full;
  const double sym = relative_error(z.transpose(), z);
  check("impedance_symmetry", sym < 1e-10, sym,
        "max |Z - Z^T| / max |Z| = " + format_number(sym, 3));
  double min_eig = 0.0;
  try {
    min_eig = psd_sqrt(z.real(), false).min_eigenvalue;
    check("re_z_psd", true, min_eig,
          "min eigenvalue of Re{Z} = " + format_number(min_eig, 3));
  } catch (const ModelViolation& e) {
    check("re_z_psd", false, min_eig, e.what());
  }
  OptProblem p;
  p.partition = sc.impedance.partition;
  p.init = c.cfg.optimizer.init;
  p.seed = c.cfg.optimizer.seed;
  const LoadVector loads(initial_theta(p));
  const NetworkState s(sc.impedance.partition, loads, R);
  {
    const Eigen::Index na = s.na();
    const CMatrix zm = s.Zm();
    // Input impedance seen at the matching-network input with Za attached.
    const CMatrix zt = zm.topLeftCorner(na, na) -
                       zm.topRightCorner(na, na) *
                           (s.Za() + zm.bottomRightCorner(na, na)).inverse() *
                           zm.bottomLeftCorner(na, na);
    const double err =
        relative_error(zt, R * CMatrix::Identity(na, na).eval());
    check("zt_identity", err < 1e-10, err,
          "Zt = R I relative error " + format_number(err, 3));
  }
  Rng rng(derive_seed(c.cfg.optimizer.seed, 99));
  CVector vt(s.na());
  for (Eigen::Index i = 0; i < vt.size(); ++i) {
    vt(i) = Complex(rng.normal(), rng.normal());
  }
  const CVector i_em = s.currents(vt);
  if (g.n() <= 600) {
    const CircuitSolution cs = oracle_solve(z, s.na(), loads, vt, R);
    const double e = relative_error(i_em, cs.i);
    check("oracle_equivalence", e < 1e-10, e,
          "precoder vs circuit solve relative error " + format_number(e, 3));
  }
  {
    const double pin = vt.squaredNorm() / R;
    const double flux = sphere_flux(g.elements(), i_em, g.lambda,
                                    1000.0 * g.lambda, 180, 360);
    const double e = std::abs(flux - pin) / pin;
    check("power_conservation", e < 0.01, e,
          "sphere flux vs input power relative error " + format_number(e, 3));
  }
  {
    std::ofstream fz(c.dir / "Z.txt"), fa(c.dir / "Za.txt"),
        fw(c.dir / "Wem.txt");
    write_complex_matrix(fz, z);
    write_complex_matrix(fa, s.Za());
    write_complex_matrix(fw, s.Wem());
  }
  ojson summary = summary_header(c);
  summary["checks"] = checks;
  summary["pass"] = all;
  write_json_file(c.dir / "validate.json", summary);
  return all ? kExitOk : kExitModel;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Dynamic scattering array simulation and optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options opt;
  std::string chosen;
  struct Verb {
    const char* name;
    const char* help;
  };
  const Verb verbs[] = {
      {"pattern", "optimize a beam-steering scenario and export its pattern"},
      {"sweep", "sweep delta_l, L_R, Ns or sigma_rel"},
      {"miso", "zero-forcing multi-user precoding"},
      {"mimo", "SVD multi-layer precoding over the NLOS scene"},
      {"validate", "run the invariant suite on a scenario geometry"}};
  for (const Verb& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.help);
    sub->add_option("--config", opt.config, "scenario JSON file")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "optimizer / Monte-Carlo seed");
    sub->add_option("--threads", opt.threads, "worker threads")
        ->check(CLI::Range(1, 1024));
    sub->add_option("--format", opt.format, "table format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&chosen, name = std::string(v.name)] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (chosen == "pattern") return cmd_pattern(opt);
    if (chosen == "sweep") return cmd_sweep(opt);
    if (chosen == "miso") return cmd_miso(opt);
    if (chosen == "mimo") return cmd_mimo(opt);
    if (chosen == "validate") return cmd_validate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResonanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const ModelViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const RankError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

}  // namespace dsa
