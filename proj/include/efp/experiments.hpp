#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efp/errors.hpp"
#include "efp/propagators.hpp"
#include "efp/reference.hpp"

namespace efp {

enum class StudyKind { kSpatial, kTemporal };
enum class Norm { kL2, kH1 };

inline int sobolev_order(Norm n) { return n == Norm::kL2 ? 0 : 1; }
inline std::string_view to_string(Norm n) { return n == Norm::kL2 ? "L2" : "H1"; }
inline std::string_view to_string(StudyKind k) { return k == StudyKind::kSpatial ? "spatial" : "temporal"; }

inline Norm parse_norm(std::string_view s) {
  if (s == "l2" || s == "L2") return Norm::kL2;
  if (s == "h1" || s == "H1") return Norm::kH1;
  throw ConfigError("unknown norm '" + std::string(s) + "' (expected l2 or h1)");
}

/// tau = c * h^gamma.
struct Coupling {
  double c = 0.2;
  double gamma = 2.0;

  std::string label() const { return io::format_double(c) + ":" + io::format_double(gamma); }
};

inline Coupling parse_coupling(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ConfigError("coupling must look like C:gamma");
  try {
    Coupling c{std::stod(std::string(s.substr(0, colon))), std::stod(std::string(s.substr(colon + 1)))};
    if (!(c.c > 0.0) || !(c.gamma > 0.0)) throw ConfigError("coupling constants must be positive");
    return c;
  } catch (const std::logic_error&) {
    throw ConfigError("coupling must look like C:gamma, got '" + std::string(s) + "'");
  }
}

/// Relative error level treated as round-off when detecting the reference floor.
inline constexpr double kRoundoffFloor = 1e-12;

struct StudyConfig {
  StudyKind kind = StudyKind::kSpatial;
  Scheme scheme = Scheme::kSTeFP;
  PotentialSpec potential = PotentialSpec::named("v1");
  std::vector<Norm> norms{Norm::kL2, Norm::kH1};
  std::vector<long> grids{128, 256, 512, 1024};
  double tau = 1e-5;                 // spatial studies
  std::vector<Coupling> couplings;   // temporal studies
  double t_final = 0.5;
  double beta = 1.0;
  double sigma = 1.0;
  long n_ref = 4096;
  double tau_ref = 1e-5;
  bool theorem_regime = false;       // enforce tau <= h^2/pi on every run
  long fswq_m = 0;                   // fixed M; 0 means M = fswq_ratio * N
  long fswq_ratio = 1;
  Splitting fswq_splitting = Splitting::kStrang;
  FswqInit fswq_init = FswqInit::kFlowed;
  double quad_tol = kDefaultQuadratureTolerance;
  int jobs = 1;
  bool record_wall_time = true;
  double floor_factor = 10.0;
  std::filesystem::path cache_dir;   // empty: references are not cached on disk
  InitialDatum psi0 = InitialDatum::gaussian();

  std::string scheme_label() const {
    if (scheme != Scheme::kFSwQ) return std::string(to_string(scheme));
    if (fswq_m > 0) return "fswq-M" + std::to_string(fswq_m);
    return "fswq-" + std::to_string(fswq_ratio) + "N";
  }
};

struct ReferenceEstimate {
  double error;  // estimated error of the reference
  double order;  // observed convergence order of the reference family
};

struct ErrorRow {
  long n;
  double h;
  double tau;
  std::string coupling;  // empty for spatial studies
  double error_l2;
  double error_h1;
  double wall_ms;

  double error(Norm norm) const { return norm == Norm::kL2 ? error_l2 : error_h1; }
};

struct OrderFit {
  Norm norm;
  std::string coupling;
  std::optional<double> slope;
  std::optional<double> residual;
  int points_used = 0;
  int points_floored = 0;
};

struct ErrorReport {
  StudyKind kind = StudyKind::kSpatial;
  std::string scheme;
  std::string potential;
  std::string reference_key;
  std::vector<Norm> norms;
  std::vector<ErrorRow> rows;
  std::vector<OrderFit> orders;
  ReferenceEstimate reference_l2{0.0, 0.0};
  ReferenceEstimate reference_h1{0.0, 0.0};

  double reference_estimate(Norm n) const { return n == Norm::kL2 ? reference_l2.error : reference_h1.error; }
  const OrderFit* order(Norm norm, std::string_view coupling = {}) const {
    for (const auto& o : orders) {
      if (o.norm == norm && o.coupling == coupling) return &o;
    }
    return nullptr;
  }
  /// Rows of one coupling in refinement order.
  std::vector<ErrorRow> series(std::string_view coupling = {}) const {
    std::vector<ErrorRow> out;
    for (const auto& r : rows) {
      if (r.coupling == coupling) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.n < y.n; });
    return out;
  }
};

struct FitResult {
  double slope;
  double residual;  // max |log10 e - fit| over the points used
  int used;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log10(e) against log10(x). Non-positive errors are
/// dropped with a warning; fewer than three usable points is an error.
inline FitResult fit_order(std::span<const double> xs, std::span<const double> errors) {
  if (xs.size() != errors.size()) throw ConfigError("fit_order: size mismatch");
  FitResult out{0.0, 0.0, 0, {}};
  std::vector<double> lx, le;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw ConfigError("fit_order: abscissae must be positive");
    if (!(errors[i] > 0.0)) {
      out.warnings.push_back("excluded non-positive error at x = " + io::format_double(xs[i]));
      continue;
    }
    lx.push_back(std::log10(xs[i]));
    le.push_back(std::log10(errors[i]));
  }
  if (lx.size() < 3) throw ConfigError("fit_order: need at least 3 positive points");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, me = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    me += le[i];
  }
  mx /= n;
  me /= n;
  double sxx = 0.0, sxe = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxe += (lx[i] - mx) * (le[i] - me);
  }
  if (sxx == 0.0) throw ConfigError("fit_order: abscissae must not all coincide");
  out.slope = sxe / sxx;
  const double intercept = me - out.slope * mx;
  for (size_t i = 0; i < lx.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(le[i] - (intercept + out.slope * lx[i])));
  }
  out.used = static_cast<int>(lx.size());
  return out;
}

namespace detail {

struct RunPlan {
  long n;
  double tau;
  std::string coupling;
};

inline SchemeConfig scheme_for(const StudyConfig& cfg, const RunPlan& plan) {
  SchemeConfig s;
  s.scheme = cfg.scheme;
  s.n = plan.n;
  s.tau = plan.tau;
  s.t_final = cfg.t_final;
  s.beta = cfg.beta;
  s.sigma = cfg.sigma;
  s.potential = cfg.potential;
  s.domain = cfg.potential.domain();
  s.fswq_m = cfg.fswq_m > 0 ? cfg.fswq_m : cfg.fswq_ratio * plan.n;
  s.fswq_splitting = cfg.fswq_splitting;
  s.fswq_init = cfg.fswq_init;
  s.quad_tol = cfg.quad_tol;
  return s;
}

inline std::vector<RunPlan> plan_runs(const StudyConfig& cfg) {
  if (cfg.grids.empty()) throw ConfigError("study needs at least one grid size");
  const double length = cfg.potential.domain().length();
  std::vector<RunPlan> plans;
  for (long n : cfg.grids) {
    require_even_size(n, "N");
    const double h = length / static_cast<double>(n);
    if (cfg.kind == StudyKind::kSpatial) {
      plans.push_back({n, cfg.tau, {}});
    } else {
      if (cfg.couplings.empty()) throw ConfigError("temporal study needs at least one coupling");
      for (const auto& c : cfg.couplings) {
        // Largest tau <= C h^gamma that divides T.
        const double nominal = c.c * std::pow(h, c.gamma);
        const auto steps = static_cast<std::int64_t>(std::ceil(cfg.t_final / nominal - 1e-9));
        plans.push_back({n, cfg.t_final / static_cast<double>(std::max<std::int64_t>(steps, 1)), c.label()});
      }
    }
  }
  if (cfg.theorem_regime) {
    for (const auto& p : plans) {
      const double h = length / static_cast<double>(p.n);
      if (p.tau > h * h / std::numbers::pi) {
        throw ConfigError("theorem regime requires tau <= h^2/pi; violated at N = " + std::to_string(p.n) +
                          ", tau = " + io::format_double(p.tau));
      }
    }
  }
  return plans;
}

/// Error of the finest of three nested references r0 (finest), r1, r2 in
/// Sobolev order m. The observed order p = log2(|r2 - r1| / |r1 - r0|) turns the
/// r1/r0 difference into |r1 - r0| / (2^p - 1); p is clamped to [0.5, 8].
inline ReferenceEstimate richardson_estimate(const SpectralField& r0, const SpectralField& r1,
                                             const SpectralField& r2, int m) {
  const double d10 = diff_norm(r1, r0, m);
  const double d21 = diff_norm(r2, r1, m);
  if (d10 == 0.0) return {0.0, 0.0};
  const double p = std::clamp(std::log2(d21 / d10), 0.5, 8.0);
  return {d10 / (std::pow(2.0, p) - 1.0), p};
}

}  // namespace detail

/// Reference run and its half-resolution companion for a study.
inline ReferenceSpec reference_spec(const StudyConfig& cfg) {
  ReferenceSpec r;
  r.potential = cfg.potential;
  r.beta = cfg.beta;
  r.sigma = cfg.sigma;
  r.t_final = cfg.t_final;
  r.n_ref = cfg.n_ref;
  r.tau_ref = cfg.tau_ref;
  r.psi0 = cfg.psi0;
  r.quad_tol = cfg.quad_tol;
  return r;
}

/// The reference refined `levels` times less: N_ref / 2^levels, and tau_ref
/// doubled at each level while that still divides T and satisfies tau <= h^2/pi.
inline ReferenceSpec coarse_reference_spec(const StudyConfig& cfg, int levels = 1) {
  ReferenceSpec r = reference_spec(cfg);
  for (int i = 0; i < levels; ++i) {
    r.n_ref /= 2;
    const double doubled = 2.0 * r.tau_ref;
    const double steps = std::round(cfg.t_final / doubled);
    const double h = cfg.potential.domain().length() / static_cast<double>(r.n_ref);
    if (std::abs(steps * doubled - cfg.t_final) <= 1e-9 * cfg.t_final && doubled <= h * h / std::numbers::pi) {
      r.tau_ref = doubled;
    }
  }
  return r;
}

/// Runs every (N, tau) of the study, measures errors against the reference
/// in each requested norm and fits convergence orders.
inline ErrorReport run_study(const StudyConfig& cfg) {
  const auto plans = detail::plan_runs(cfg);
  const long finest = *std::max_element(cfg.grids.begin(), cfg.grids.end());
  if (cfg.n_ref < finest) throw ConfigError("reference grid is coarser than the finest study grid");
  if (cfg.norms.empty()) throw ConfigError("study needs at least one norm");

  if (cfg.n_ref % 8 != 0) throw ConfigError("reference grid size must be a multiple of 8");

  const ReferenceSpec ref_spec = reference_spec(cfg);
  const SpectralField reference = reference_solution(ref_spec, cfg.cache_dir);
  const SpectralField coarse = reference_solution(coarse_reference_spec(cfg, 1), cfg.cache_dir);
  const SpectralField coarser = reference_solution(coarse_reference_spec(cfg, 2), cfg.cache_dir);

  ErrorReport report;
  report.kind = cfg.kind;
  report.scheme = cfg.scheme_label();
  report.potential = cfg.potential.name();
  report.reference_key = ref_spec.key();
  report.norms = cfg.norms;
  report.reference_l2 = detail::richardson_estimate(reference, coarse, coarser, 0);
  report.reference_h1 = detail::richardson_estimate(reference, coarse, coarser, 1);

  auto execute = [&](const detail::RunPlan& plan) {
    const SchemeConfig scfg = detail::scheme_for(cfg, plan);
    const auto start = std::chrono::steady_clock::now();
    const SpectralField u = run_final(scfg, cfg.psi0);
    const auto stop = std::chrono::steady_clock::now();
    const double wall = cfg.record_wall_time
                            ? std::chrono::duration<double, std::milli>(stop - start).count()
                            : 0.0;
    return ErrorRow{plan.n, scfg.h(), plan.tau, plan.coupling, diff_norm(u, reference, 0),
                    diff_norm(u, reference, 1), wall};
  };

  std::vector<ErrorRow> rows;
  if (cfg.jobs <= 1) {
    for (const auto& p : plans) rows.push_back(execute(p));
  } else {
    std::vector<std::future<ErrorRow>> pending;
    size_t next = 0;
    while (next < plans.size() || !pending.empty()) {
      while (next < plans.size() && pending.size() < static_cast<size_t>(cfg.jobs)) {
        pending.push_back(std::async(std::launch::async, execute, plans[next++]));
      }
      // Drain in submission order so the result vector matches `plans`.
      rows.push_back(pending.front().get());
      pending.erase(pending.begin());
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ErrorRow& x, const ErrorRow& y) {
    return x.n != y.n ? x.n < y.n : x.tau < y.tau;
  });
  report.rows = std::move(rows);

  std::vector<std::string> groups;
  if (cfg.kind == StudyKind::kSpatial) {
    groups.emplace_back();
  } else {
    for (const auto& c : cfg.couplings) groups.push_back(c.label());
  }
  for (Norm norm : cfg.norms) {
    // Errors at the level of accumulated round-off are floored as well.
    const double floor = std::max(cfg.floor_factor * report.reference_estimate(norm),
                                  kRoundoffFloor * sobolev_norm(reference, sobolev_order(norm)));
    for (const auto& group : groups) {
      OrderFit fit{norm, group, std::nullopt, std::nullopt, 0, 0};
      std::vector<double> xs, es;
      for (const auto& r : report.series(group)) {
        if (r.error(norm) < floor) {
          ++fit.points_floored;
          continue;
        }
        xs.push_back(cfg.kind == StudyKind::kSpatial ? r.h : r.tau);
        es.push_back(r.error(norm));
      }
      fit.points_used = static_cast<int>(xs.size());
      if (xs.size() >= 3) {
        const FitResult f = fit_order(xs, es);
        fit.slope = f.slope;
        fit.residual = f.residual;
        fit.points_used = f.used;
      }
      report.orders.push_back(fit);
    }
  }
  return report;
}

inline ErrorReport spatial_study(StudyConfig cfg) {
  cfg.kind = StudyKind::kSpatial;
  return run_study(cfg);
}

inline ErrorReport temporal_study(StudyConfig cfg) {
  cfg.kind = StudyKind::kTemporal;
  return run_study(cfg);
}

}  // namespace efp
