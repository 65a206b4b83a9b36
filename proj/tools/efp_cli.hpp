#pragma once

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"

#include "efp/efp.hpp"

namespace efp::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kConfig = 1, kNumeric = 2, kIo = 3 };

struct SolveOptions {
  std::string scheme = "st-efp";
  std::string potential;
  long n = 256;
  double tau = 1e-4;
  double t_final = 1.0;
  double beta = 1.0;
  double sigma = 1.0;
  long m = 0;
  std::string fswq_splitting = "lie";
  std::string fswq_init = "flowed";
  double amplitude = 1.0;
  long stride = 0;
  double tol = kDefaultQuadratureTolerance;
  std::string out = "solve_out";
  bool dump_nodal = false;
};

struct StudyOptions {
  std::string scheme = "st-efp";
  std::string potential;
  std::vector<std::string> norms{"l2", "h1"};
  std::vector<long> grids{128, 256, 512, 1024};
  double tau = 1e-5;
  std::vector<std::string> couplings{"0.2:2"};
  double t_final = 0.5;
  double beta = 1.0;
  double sigma = 1.0;
  long n_ref = 4096;
  double tau_ref = 1e-5;
  long m = 0;
  long m_ratio = 1;
  std::string fswq_splitting = "strang";
  std::string fswq_init = "flowed";
  double amplitude = 1.0;
  bool theorem_regime = false;
  int jobs = 1;
  bool no_timing = false;
  double floor_factor = 10.0;
  double tol = kDefaultQuadratureTolerance;
  std::string out = "study_out";
  std::string cache_dir;
};

struct CoeffOptions {
  std::string potential;
  double tau = 0.01;
  long n = 128;
  double tol = kDefaultQuadratureTolerance;
  std::string out;
};

struct ReferenceOptions {
  std::string potential;
  double beta = 1.0;
  double sigma = 1.0;
  double t_final = 0.5;
  long n_ref = 4096;
  double tau_ref = 1e-5;
  double amplitude = 1.0;
  double tol = kDefaultQuadratureTolerance;
  std::string cache_dir;
  std::string out;
};

inline Splitting parse_splitting(const std::string& s) {
  if (s == "lie") return Splitting::kLie;
  if (s == "strang") return Splitting::kStrang;
  throw ConfigError("unknown splitting '" + s + "' (expected lie or strang)");
}

inline FswqInit parse_init(const std::string& s) {
  if (s == "flowed") return FswqInit::kFlowed;
  if (s == "plain") return FswqInit::kPlain;
  throw ConfigError("unknown fswq-init '" + s + "' (expected flowed or plain)");
}

inline std::filesystem::path cache_dir_from(const std::string& flag) {
  if (!flag.empty()) return flag;
  return resolve_cache_dir();
}

/// Top-level options that may be typed after the subcommand name.
inline constexpr std::string_view kGlobalOptions[] = {"--config", "--dump-config", "--seed"};

/// Moves global options (and their values) in front of the subcommand so the
/// top-level parser sees them wherever they were typed.
inline std::vector<std::string> hoist_global_options(std::vector<std::string> args) {
  std::vector<std::string> front, rest;
  for (size_t i = 0; i < args.size(); ++i) {
    bool moved = false;
    for (std::string_view opt : kGlobalOptions) {
      if (args[i] == opt && i + 1 < args.size()) {
        front.push_back(args[i]);
        front.push_back(args[++i]);
        moved = true;
      } else if (args[i].rfind(std::string(opt) + "=", 0) == 0) {
        front.push_back(args[i]);
        moved = true;
      }
      if (moved) break;
    }
    if (!moved) rest.push_back(args[i]);
  }
  front.insert(front.end(), rest.begin(), rest.end());
  return front;
}

/// Minimal TOML writer for --dump-config: flat `subcommand.option = value`
/// lines, readable again through --config.
class TomlTable {
 public:
  TomlTable(std::ostream& os, std::string_view name) : os_(os), prefix_(std::string(name) + ".") {}

  void put(std::string_view key, const std::string& v) { os_ << prefix_ << key << " = " << quote(v) << '\n'; }
  void put(std::string_view key, const char* v) { put(key, std::string(v)); }
  void put(std::string_view key, bool v) { os_ << prefix_ << key << " = " << (v ? "true" : "false") << '\n'; }
  void put(std::string_view key, long v) { os_ << prefix_ << key << " = " << v << '\n'; }
  void put(std::string_view key, int v) { os_ << prefix_ << key << " = " << v << '\n'; }
  void put(std::string_view key, double v) { os_ << prefix_ << key << " = " << io::format_double(v) << '\n'; }
  template <typename T>
  void put(std::string_view key, const std::vector<T>& v) {
    os_ << prefix_ << key << " = [";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) os_ << ", ";
      if constexpr (std::is_same_v<T, std::string>) {
        os_ << quote(v[i]);
      } else {
        os_ << v[i];
      }
    }
    os_ << "]\n";
  }

 private:
  static std::string quote(const std::string& v) {
    std::string out = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }
  std::ostream& os_;
  std::string prefix_;
};

inline void dump_options(std::ostream& os, const SolveOptions& o) {
  TomlTable t(os, "solve");
  t.put("scheme", o.scheme);
  t.put("potential", o.potential);
  t.put("n", o.n);
  t.put("tau", o.tau);
  t.put("t", o.t_final);
  t.put("beta", o.beta);
  t.put("sigma", o.sigma);
  t.put("m", o.m);
  t.put("fswq-splitting", o.fswq_splitting);
  t.put("fswq-init", o.fswq_init);
  t.put("amplitude", o.amplitude);
  t.put("stride", o.stride);
  t.put("tol", o.tol);
  t.put("out", o.out);
  t.put("dump-nodal", o.dump_nodal);
}

inline void dump_options(std::ostream& os, const StudyOptions& o, bool temporal) {
  TomlTable t(os, temporal ? "temporal-study" : "spatial-study");
  t.put("scheme", o.scheme);
  t.put("potential", o.potential);
  t.put("norms", o.norms);
  t.put("grids", o.grids);
  if (temporal) {
    t.put("coupling", o.couplings);
  } else {
    t.put("tau", o.tau);
  }
  t.put("t", o.t_final);
  t.put("beta", o.beta);
  t.put("sigma", o.sigma);
  t.put("n-ref", o.n_ref);
  t.put("tau-ref", o.tau_ref);
  t.put("m", o.m);
  t.put("m-ratio", o.m_ratio);
  t.put("fswq-splitting", o.fswq_splitting);
  t.put("fswq-init", o.fswq_init);
  t.put("amplitude", o.amplitude);
  t.put("theorem-regime", o.theorem_regime);
  t.put("jobs", o.jobs);
  t.put("no-timing", o.no_timing);
  t.put("floor-factor", o.floor_factor);
  t.put("tol", o.tol);
  t.put("out", o.out);
  t.put("cache-dir", o.cache_dir);
}

inline void dump_options(std::ostream& os, const CoeffOptions& o) {
  TomlTable t(os, "potential-coeffs");
  t.put("potential", o.potential);
  t.put("tau", o.tau);
  t.put("n", o.n);
  t.put("tol", o.tol);
  t.put("out", o.out);
}

inline void dump_options(std::ostream& os, const ReferenceOptions& o) {
  TomlTable t(os, "reference");
  t.put("potential", o.potential);
  t.put("beta", o.beta);
  t.put("sigma", o.sigma);
  t.put("t", o.t_final);
  t.put("n-ref", o.n_ref);
  t.put("tau-ref", o.tau_ref);
  t.put("amplitude", o.amplitude);
  t.put("tol", o.tol);
  t.put("cache-dir", o.cache_dir);
  t.put("out", o.out);
}

inline void print_norms(std::ostream& out, const SpectralField& u) {
  out << "final L2 norm: " << io::format_double(sobolev_norm(u, 0)) << '\n'
      << "final H1 norm: " << io::format_double(sobolev_norm(u, 1)) << '\n';
}

inline int cmd_solve(const SolveOptions& o, std::ostream& out) {
  SchemeConfig cfg;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.potential = PotentialSpec::named(o.potential);
  cfg.domain = cfg.potential.domain();
  cfg.n = o.n;
  cfg.tau = o.tau;
  cfg.t_final = o.t_final;
  cfg.beta = o.beta;
  cfg.sigma = o.sigma;
  cfg.fswq_m = o.m;
  cfg.fswq_splitting = parse_splitting(o.fswq_splitting);
  cfg.fswq_init = parse_init(o.fswq_init);
  cfg.quad_tol = o.tol;
  cfg.validate();
  if (o.stride < 0) throw ConfigError("stride must be non-negative");

  const InitialDatum psi0 = InitialDatum::gaussian(o.amplitude);
  const Stepper stepper(cfg);
  SolverState state = stepper.initial_state(psi0);
  Trajectory traj;
  traj.snapshots.push_back({0, 0.0, state.spectral});
  const auto total = cfg.steps();
  advance_to_end(stepper, state, [&](const SolverState& s) {
    if (s.step == total || (o.stride > 0 && s.step % o.stride == 0)) {
      traj.snapshots.push_back({s.step, s.time, s.spectral});
    }
  });
  write_trajectory(traj, o.out);
  if (o.dump_nodal) {
    io::write_file(std::filesystem::path(o.out) / "final_nodal.csv",
                   [&](std::ostream& os) { io::write_nodal_csv(os, state.nodal); });
  }
  out << "scheme " << to_string(cfg.scheme) << ", potential " << cfg.potential.name() << ", N " << cfg.n
      << ", steps " << total << '\n';
  print_norms(out, state.spectral);
  return kOk;
}

inline StudyConfig study_config(const StudyOptions& o, StudyKind kind) {
  StudyConfig cfg;
  cfg.kind = kind;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.potential = PotentialSpec::named(o.potential);
  cfg.norms.clear();
  for (const auto& n : o.norms) cfg.norms.push_back(parse_norm(n));
  cfg.grids = o.grids;
  cfg.tau = o.tau;
  if (kind == StudyKind::kTemporal) {
    for (const auto& c : o.couplings) cfg.couplings.push_back(parse_coupling(c));
  }
  cfg.t_final = o.t_final;
  cfg.beta = o.beta;
  cfg.sigma = o.sigma;
  cfg.n_ref = o.n_ref;
  cfg.tau_ref = o.tau_ref;
  cfg.fswq_m = o.m;
  cfg.fswq_ratio = o.m_ratio;
  if (o.m_ratio < 1) throw ConfigError("m-ratio must be >= 1");
  cfg.fswq_splitting = parse_splitting(o.fswq_splitting);
  cfg.fswq_init = parse_init(o.fswq_init);
  cfg.psi0 = InitialDatum::gaussian(o.amplitude);
  cfg.theorem_regime = o.theorem_regime;
  cfg.jobs = o.jobs;
  cfg.record_wall_time = !o.no_timing;
  cfg.floor_factor = o.floor_factor;
  cfg.quad_tol = o.tol;
  cfg.cache_dir = cache_dir_from(o.cache_dir);
  return cfg;
}

inline int cmd_study(const StudyOptions& o, StudyKind kind, std::ostream& out) {
  const StudyConfig cfg = study_config(o, kind);
  const ErrorReport report = run_study(cfg);
  emit_report(report, o.out);
  for (const auto& fit : report.orders) {
    out << to_string(fit.norm);
    if (!fit.coupling.empty()) out << " (tau = " << fit.coupling << ")";
    out << " slope: " << (fit.slope ? io::format_double(*fit.slope) : std::string("n/a"))
        << ", residual: " << (fit.residual ? io::format_double(*fit.residual) : std::string("n/a"))
        << ", points: " << fit.points_used << '\n';
  }
  out << "wrote " << (std::filesystem::path(o.out) / "errors.csv").string() << '\n';
  return kOk;
}

inline int cmd_potential_coeffs(const CoeffOptions& o, std::ostream& out) {
  const PotentialSpec spec = PotentialSpec::named(o.potential);
  const PhaseFactorTable table = phase_projection(spec, o.tau, o.n, o.tol);
  const std::string stem =
      o.out.empty() ? "phase_" + spec.name() + "_N" + std::to_string(o.n) + "_tau" + io::format_double(o.tau)
                    : o.out;
  write_phase_table(table, stem);
  out << "provenance: " << to_string(table.provenance) << '\n'
      << "achieved tolerance: " << io::format_double(table.achieved_tolerance) << '\n'
      << "wrote " << stem << ".csv and " << stem << ".json\n";
  return kOk;
}

inline int cmd_reference(const ReferenceOptions& o, std::ostream& out) {
  ReferenceSpec spec;
  spec.potential = PotentialSpec::named(o.potential);
  spec.beta = o.beta;
  spec.sigma = o.sigma;
  spec.t_final = o.t_final;
  spec.n_ref = o.n_ref;
  spec.tau_ref = o.tau_ref;
  spec.psi0 = InitialDatum::gaussian(o.amplitude);
  spec.quad_tol = o.tol;
  const auto dir = cache_dir_from(o.cache_dir);
  const SpectralField ref = reference_solution(spec, dir);
  out << "reference " << (dir / (spec.key() + ".csv")).string() << '\n';
  if (!o.out.empty()) {
    io::write_file(o.out, [&](std::ostream& os) { io::write_spectral_csv(os, ref); });
    out << "wrote " << o.out << '\n';
  }
  print_norms(out, ref);
  return kOk;
}

inline void add_study_options(CLI::App* sub, StudyOptions& o, bool temporal) {
  sub->add_option("--scheme", o.scheme, "lt-efp, st-efp or fswq")->capture_default_str();
  sub->add_option("--potential", o.potential, "v1, v2, v3, v4 or zero")->required();
  sub->add_option("--norms", o.norms, "comma separated: l2,h1")->delimiter(',')->capture_default_str();
  sub->add_option("--grids", o.grids, "comma separated grid sizes N")->delimiter(',')->capture_default_str();
  if (temporal) {
    sub->add_option("--coupling", o.couplings, "tau = C*h^gamma given as C:gamma (repeatable)")
        ->delimiter(',')
        ->capture_default_str();
  } else {
    sub->add_option("--tau", o.tau, "time step")->capture_default_str();
  }
  sub->add_option("--t", o.t_final, "final time")->capture_default_str();
  sub->add_option("--beta", o.beta)->capture_default_str();
  sub->add_option("--sigma", o.sigma)->capture_default_str();
  sub->add_option("--n-ref", o.n_ref, "reference grid size")->capture_default_str();
  sub->add_option("--tau-ref", o.tau_ref, "reference time step")->capture_default_str();
  sub->add_option("--m", o.m, "FSwQ quadrature points (0: use --m-ratio)")->capture_default_str();
  sub->add_option("--m-ratio", o.m_ratio, "FSwQ M = ratio * N")->capture_default_str();
  sub->add_option("--fswq-splitting", o.fswq_splitting, "lie or strang")->capture_default_str();
  sub->add_option("--fswq-init", o.fswq_init, "flowed or plain")->capture_default_str();
  sub->add_option("--amplitude", o.amplitude, "Gaussian amplitude")->capture_default_str();
  sub->add_flag("--theorem-regime", o.theorem_regime, "require tau <= h^2/pi on every run");
  sub->add_option("--jobs", o.jobs, "parallel runs")->capture_default_str();
  sub->add_flag("--no-timing", o.no_timing, "write wall_ms = 0 for byte-stable output");
  sub->add_option("--floor-factor", o.floor_factor, "reference floor multiplier")->capture_default_str();
  sub->add_option("--tol", o.tol, "phase projection tolerance")->capture_default_str();
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--cache-dir", o.cache_dir, "reference cache (default $EFP_CACHE_DIR or .efp_cache)");
}

/// Parses and runs one command line. Never throws.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended Fourier pseudospectral solver for the 1D Gross-Pitaevskii equation", "efp"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML file");
  std::string dump_path;
  std::vector<std::string> seed;
  app.add_option("--dump-config", dump_path, "write the effective options to a TOML file")->configurable(false);
  app.add_option("--seed", seed, "not supported: every command is deterministic")->configurable(false);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "run one scheme and write a trajectory");
  s->add_option("--scheme", solve.scheme, "lt-efp, st-efp or fswq")->capture_default_str();
  s->add_option("--potential", solve.potential, "v1, v2, v3, v4 or zero")->required();
  s->add_option("--n", solve.n, "grid size N")->capture_default_str();
  s->add_option("--tau", solve.tau, "time step")->capture_default_str();
  s->add_option("--t", solve.t_final, "final time")->capture_default_str();
  s->add_option("--beta", solve.beta)->capture_default_str();
  s->add_option("--sigma", solve.sigma)->capture_default_str();
  s->add_option("--m", solve.m, "FSwQ quadrature points (0: M = N)")->capture_default_str();
  s->add_option("--fswq-splitting", solve.fswq_splitting, "lie or strang")->capture_default_str();
  s->add_option("--fswq-init", solve.fswq_init, "flowed or plain")->capture_default_str();
  s->add_option("--amplitude", solve.amplitude, "Gaussian amplitude")->capture_default_str();
  s->add_option("--stride", solve.stride, "snapshot every k steps (0: initial and final)")->capture_default_str();
  s->add_option("--tol", solve.tol, "phase projection tolerance")->capture_default_str();
  s->add_option("--out", solve.out, "output directory")->capture_default_str();
  s->add_flag("--dump-nodal", solve.dump_nodal, "also write final_nodal.csv");

  StudyOptions spatial;
  auto* sp = app.add_subcommand("spatial-study", "error vs N at fixed tau");
  add_study_options(sp, spatial, false);

  StudyOptions temporal;
  temporal.grids = {128, 256, 512, 1024};
  auto* tp = app.add_subcommand("temporal-study", "error vs tau under tau = C h^gamma");
  add_study_options(tp, temporal, true);

  CoeffOptions coeffs;
  auto* pc = app.add_subcommand("potential-coeffs", "write P_2N(exp(-i tau V)) and its sidecar");
  pc->add_option("--potential", coeffs.potential, "v1, v2, v3, v4 or zero")->required();
  pc->add_option("--tau", coeffs.tau)->capture_default_str();
  pc->add_option("--n", coeffs.n, "N (the table has 2N coefficients)")->capture_default_str();
  pc->add_option("--tol", coeffs.tol, "quadrature tolerance")->capture_default_str();
  pc->add_option("--out", coeffs.out, "output stem (writes <stem>.csv and <stem>.json)");

  ReferenceOptions ref;
  auto* rf = app.add_subcommand("reference", "compute or look up a cached STeFP reference");
  rf->add_option("--potential", ref.potential, "v1, v2, v3, v4 or zero")->required();
  rf->add_option("--beta", ref.beta)->capture_default_str();
  rf->add_option("--sigma", ref.sigma)->capture_default_str();
  rf->add_option("--t", ref.t_final)->capture_default_str();
  rf->add_option("--n-ref", ref.n_ref)->capture_default_str();
  rf->add_option("--tau-ref", ref.tau_ref)->capture_default_str();
  rf->add_option("--amplitude", ref.amplitude)->capture_default_str();
  rf->add_option("--tol", ref.tol)->capture_default_str();
  rf->add_option("--cache-dir", ref.cache_dir);
  rf->add_option("--out", ref.out, "also copy the reference to this CSV");

  args = hoist_global_options(std::move(args));
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kConfig;
  }

  try {
    if (!seed.empty()) throw ConfigError("--seed is not accepted: no command has a stochastic component");
    if (!dump_path.empty()) {
      io::write_file(dump_path, [&](std::ostream& os) {
        if (s->parsed()) dump_options(os, solve);
        if (sp->parsed()) dump_options(os, spatial, false);
        if (tp->parsed()) dump_options(os, temporal, true);
        if (pc->parsed()) dump_options(os, coeffs);
        if (rf->parsed()) dump_options(os, ref);
      });
    }
    if (s->parsed()) return cmd_solve(solve, out);
    if (sp->parsed()) return cmd_study(spatial, StudyKind::kSpatial, out);
    if (tp->parsed()) return cmd_study(temporal, StudyKind::kTemporal, out);
    if (pc->parsed()) return cmd_potential_coeffs(coeffs, out);
    if (rf->parsed()) return cmd_reference(ref, out);
    return kConfig;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericError& e) {
    err << "numeric abort at step " << e.step() << ": " << e.what() << '\n';
    return kNumeric;
  } catch (const QuadratureError& e) {
    err << "quadrature failed: " << e.what() << '\n';
    return kNumeric;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
}

}  // namespace efp::cli
