#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "efp/errors.hpp"
#include "efp/potentials.hpp"
#include "efp/spectral.hpp"

namespace efp {

enum class Scheme { kLTeFP, kSTeFP, kFSwQ };
enum class Splitting { kLie, kStrang };

/// Initial coefficients of the quadrature scheme: `kFlowed` applies the
/// exp(-i tau mu_l^2) factor to the M-point coefficients of psi0, `kPlain`
/// uses those coefficients directly.
enum class FswqInit { kFlowed, kPlain };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kLTeFP: return "lt-efp";
    case Scheme::kSTeFP: return "st-efp";
    case Scheme::kFSwQ: return "fswq";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "lt-efp") return Scheme::kLTeFP;
  if (s == "st-efp") return Scheme::kSTeFP;
  if (s == "fswq") return Scheme::kFSwQ;
  throw ConfigError("unknown scheme '" + std::string(s) + "' (expected lt-efp, st-efp or fswq)");
}

/// Everything that defines a single time-splitting run.
struct SchemeConfig {
  Scheme scheme = Scheme::kSTeFP;
  long n = 256;
  double tau = 1e-4;
  double t_final = 1.0;
  double beta = 1.0;
  double sigma = 1.0;  // nonlinearity f(rho) = beta * rho^sigma
  PotentialSpec potential = PotentialSpec::named("zero");
  Domain domain{-16.0, 16.0};
  long fswq_m = 0;  // quadrature points M for FSwQ; 0 means M = N
  Splitting fswq_splitting = Splitting::kLie;
  FswqInit fswq_init = FswqInit::kFlowed;
  double quad_tol = kDefaultQuadratureTolerance;

  long quadrature_points() const noexcept { return fswq_m == 0 ? n : fswq_m; }
  double h() const noexcept { return domain.length() / static_cast<double>(n); }

  /// round(T / tau); validate() guarantees it reproduces T.
  std::int64_t steps() const { return std::llround(t_final / tau); }

  void validate() const {
    require_even_size(n, "N");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("final time must be non-negative");
    if (!std::isfinite(beta)) throw ConfigError("beta must be finite");
    if (!(sigma >= 1.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 1");
    if (!(potential.domain() == domain)) throw ConfigError("potential and scheme domains differ");
    const double count = static_cast<double>(steps());
    if (std::abs(count * tau - t_final) > 1e-9 * t_final) {
      throw ConfigError("T/tau is not an integer: T = " + io::format_double(t_final) +
                        ", tau = " + io::format_double(tau));
    }
    if (scheme == Scheme::kFSwQ) {
      require_even_size(quadrature_points(), "quadrature points M");
      if (quadrature_points() < n) throw ConfigError("FSwQ requires M >= N");
    }
    if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  }
};

/// Closed-form initial datum psi0(x).
struct InitialDatum {
  std::string key;
  std::function<complex(double)> fn;

  /// amplitude * exp(-x^2 / 2).
  static InitialDatum gaussian(double amplitude = 1.0) {
    std::string key = amplitude == 1.0 ? "gauss" : "gauss_" + io::format_double(amplitude);
    return {key, [amplitude](double x) { return complex(amplitude * std::exp(-0.5 * x * x), 0.0); }};
  }

  complex operator()(double x) const { return fn(x); }
};

/// Grid values psi^n on the N grid and their interpolant I_N psi^n.
struct SolverState {
  std::int64_t step = 0;
  double time = 0.0;
  NodalField nodal;
  SpectralField spectral;
};

/// Exact flow of i psi_t = beta |psi|^{2 sigma} psi at each node:
/// v_j exp(-i tau beta |v_j|^{2 sigma}).
inline NodalField nonlinear_nodal_step(const NodalField& v, double tau, double beta, double sigma) {
  std::vector<complex> out(v.periodic_values().begin(), v.periodic_values().end());
  for (auto& x : out) {
    const double rho = std::norm(x);
    const double f = sigma == 1.0 ? beta * rho : beta * std::pow(rho, sigma);
    x *= std::polar(1.0, -tau * f);
  }
  return NodalField(v.grid(), std::move(out));
}

/// P_N(P_{2N}(exp(-i tau V)) * I_N(nonlinear factor)): the combined
/// potential and nonlinear sub-step of the eFP schemes, returned as
/// coefficients before the free flow.
inline SpectralField efp_phase_block(const NodalField& nodal, const PhaseFactorTable& table, double tau,
                                     double beta, double sigma) {
  const SpectralField g = interpolate(nonlinear_nodal_step(nodal, tau, beta, sigma));
  return extended_product(table.window, g);
}

namespace detail {

inline void check_table(const SchemeConfig& cfg, const PhaseFactorTable& table) {
  if (table.n != cfg.n || table.tau != cfg.tau || table.potential_key != cfg.potential.key()) {
    throw ConfigError("phase factor table does not match (potential, tau, N) of the scheme");
  }
}

inline SolverState make_state(std::int64_t step, double tau, SpectralField u, long n) {
  NodalField nodal = evaluate_on_grid(u, n);
  return SolverState{step, static_cast<double>(step) * tau, std::move(nodal), std::move(u)};
}

}  // namespace detail

/// Precomputed data for repeated steps of one scheme: free-flow multipliers,
/// the phase table (eFP) or the sampled potential phase (FSwQ).
class Stepper {
 public:
  explicit Stepper(const SchemeConfig& cfg, std::shared_ptr<const PhaseFactorTable> table = nullptr)
      : cfg_(cfg), table_(std::move(table)) {
    cfg_.validate();
    full_flow_ = free_flow_multipliers(cfg_.domain, cfg_.n, cfg_.tau);
    half_flow_ = free_flow_multipliers(cfg_.domain, cfg_.n, 0.5 * cfg_.tau);
    if (cfg_.scheme == Scheme::kFSwQ) {
      const long m = cfg_.quadrature_points();
      const UniformGrid grid(cfg_.domain, m);
      potential_phase_.resize(static_cast<size_t>(m));
      for (long j = 0; j < m; ++j) {
        potential_phase_[static_cast<size_t>(j)] =
            std::polar(1.0, -cfg_.tau * eval_potential(cfg_.potential, grid.node(j)));
      }
    } else {
      if (!table_) table_ = phase_factor_cache(cfg_.potential, cfg_.tau, cfg_.n, cfg_.quad_tol);
      detail::check_table(cfg_, *table_);
    }
  }

  const SchemeConfig& config() const noexcept { return cfg_; }
  const std::shared_ptr<const PhaseFactorTable>& table() const noexcept { return table_; }

  /// eFP: psi_j^0 = psi0(x_j). FSwQ: M-point coefficients of psi0 kept on
  /// T_N, with the free-flow factor when fswq_init is kFlowed.
  SolverState initial_state(const InitialDatum& psi0) const {
    const UniformGrid grid(cfg_.domain, cfg_.n);
    if (cfg_.scheme != Scheme::kFSwQ) {
      NodalField nodal = NodalField::sample(grid, psi0.fn);
      SpectralField spectral = interpolate(nodal);
      return SolverState{0, 0.0, std::move(nodal), std::move(spectral)};
    }
    const UniformGrid fine(cfg_.domain, cfg_.quadrature_points());
    SpectralField u = truncate(interpolate(NodalField::sample(fine, psi0.fn)), cfg_.n);
    if (cfg_.fswq_init == FswqInit::kFlowed) apply_diagonal(u, full_flow_);
    return detail::make_state(0, cfg_.tau, std::move(u), cfg_.n);
  }

  void advance(SolverState& state) const {
    switch (cfg_.scheme) {
      case Scheme::kLTeFP: lie_efp(state); break;
      case Scheme::kSTeFP: strang_efp(state); break;
      case Scheme::kFSwQ:
        if (cfg_.fswq_splitting == Splitting::kLie) {
          lie_fswq(state);
        } else {
          strang_fswq(state);
        }
        break;
    }
  }

  void lie_efp(SolverState& state) const {
    SpectralField u = efp_phase_block(state.nodal, *table_, cfg_.tau, cfg_.beta, cfg_.sigma);
    apply_diagonal(u, full_flow_);
    state = detail::make_state(state.step + 1, cfg_.tau, std::move(u), cfg_.n);
  }

  void strang_efp(SolverState& state) const {
    SpectralField u = interpolate(state.nodal);
    apply_diagonal(u, half_flow_);
    const NodalField half = evaluate_on_grid(u, cfg_.n);
    u = efp_phase_block(half, *table_, cfg_.tau, cfg_.beta, cfg_.sigma);
    apply_diagonal(u, half_flow_);
    state = detail::make_state(state.step + 1, cfg_.tau, std::move(u), cfg_.n);
  }

  void lie_fswq(SolverState& state) const {
    SpectralField u = quadrature_block(state.spectral);
    apply_diagonal(u, full_flow_);
    state = detail::make_state(state.step + 1, cfg_.tau, std::move(u), cfg_.n);
  }

  void strang_fswq(SolverState& state) const {
    SpectralField u = state.spectral;
    apply_diagonal(u, half_flow_);
    u = quadrature_block(u);
    apply_diagonal(u, half_flow_);
    state = detail::make_state(state.step + 1, cfg_.tau, std::move(u), cfg_.n);
  }

  /// Coefficients on T_N of exp(-i tau (V + f(|u|^2))) u by the M-point rule.
  SpectralField quadrature_block(const SpectralField& u) const {
    const NodalField w = evaluate_on_grid(u, cfg_.quadrature_points());
    std::vector<complex> values(w.periodic_values().begin(), w.periodic_values().end());
    for (size_t j = 0; j < values.size(); ++j) {
      const double rho = std::norm(values[j]);
      const double f = cfg_.sigma == 1.0 ? cfg_.beta * rho : cfg_.beta * std::pow(rho, cfg_.sigma);
      values[j] *= potential_phase_[j] * std::polar(1.0, -cfg_.tau * f);
    }
    return truncate(interpolate(NodalField(w.grid(), std::move(values))), cfg_.n);
  }

 private:
  SchemeConfig cfg_;
  std::shared_ptr<const PhaseFactorTable> table_;
  std::vector<complex> full_flow_;
  std::vector<complex> half_flow_;
  std::vector<complex> potential_phase_;
};

/// One Lie-Trotter eFP step.
inline SolverState lt_efp_step(SolverState state, const SchemeConfig& cfg, const PhaseFactorTable& table) {
  detail::check_table(cfg, table);
  SpectralField u = efp_phase_block(state.nodal, table, cfg.tau, cfg.beta, cfg.sigma);
  u = free_flow(std::move(u), cfg.tau);
  return detail::make_state(state.step + 1, cfg.tau, std::move(u), cfg.n);
}

/// One Strang eFP step: half free flow, phase block, half free flow.
inline SolverState st_efp_step(SolverState state, const SchemeConfig& cfg, const PhaseFactorTable& table) {
  detail::check_table(cfg, table);
  SpectralField u = free_flow(interpolate(state.nodal), 0.5 * cfg.tau);
  const NodalField half = evaluate_on_grid(u, cfg.n);
  u = efp_phase_block(half, table, cfg.tau, cfg.beta, cfg.sigma);
  u = free_flow(std::move(u), 0.5 * cfg.tau);
  return detail::make_state(state.step + 1, cfg.tau, std::move(u), cfg.n);
}

/// One Lie-Trotter step of the Fourier spectral method with M-point quadrature.
inline SolverState lt_fswq_step(SolverState state, const SchemeConfig& cfg) {
  SchemeConfig c = cfg;
  c.scheme = Scheme::kFSwQ;
  c.fswq_splitting = Splitting::kLie;
  Stepper(c).lie_fswq(state);
  return state;
}

/// Strang variant of lt_fswq_step.
inline SolverState st_fswq_step(SolverState state, const SchemeConfig& cfg) {
  SchemeConfig c = cfg;
  c.scheme = Scheme::kFSwQ;
  c.fswq_splitting = Splitting::kStrang;
  Stepper(c).strang_fswq(state);
  return state;
}

/// Snapshots (t_n, I_N psi^n) in increasing time; the final state is always last.
struct Trajectory {
  struct Snapshot {
    std::int64_t step;
    double time;
    SpectralField field;
  };
  std::vector<Snapshot> snapshots;

  const Snapshot& final() const { return snapshots.back(); }
};

inline bool all_finite(const NodalField& v) {
  for (const auto& x : v.values()) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  }
  return true;
}

/// Advances `state` to the final time, calling `observe` after every step.
/// Throws NumericError carrying the step index if a non-finite value appears.
template <typename Observer>
void advance_to_end(const Stepper& stepper, SolverState& state, Observer&& observe) {
  const std::int64_t total = stepper.config().steps();
  if (!all_finite(state.nodal)) throw NumericError("non-finite initial data", 0);
  while (state.step < total) {
    stepper.advance(state);
    if (!all_finite(state.nodal)) throw NumericError("non-finite solution values", state.step);
    observe(state);
  }
}

/// Runs cfg from psi0. Snapshots are taken every `stride` steps (stride 0
/// records only the initial and final fields).
inline Trajectory run(const SchemeConfig& cfg, const InitialDatum& psi0, std::int64_t stride = 0) {
  const Stepper stepper(cfg);
  SolverState state = stepper.initial_state(psi0);
  Trajectory traj;
  traj.snapshots.push_back({0, 0.0, state.spectral});
  const std::int64_t total = cfg.steps();
  advance_to_end(stepper, state, [&](const SolverState& s) {
    if (s.step == total || (stride > 0 && s.step % stride == 0)) {
      traj.snapshots.push_back({s.step, s.time, s.spectral});
    }
  });
  return traj;
}

/// Final I_N psi^n of a run, without intermediate snapshots.
inline SpectralField run_final(const SchemeConfig& cfg, const InitialDatum& psi0) {
  const Stepper stepper(cfg);
  SolverState state = stepper.initial_state(psi0);
  advance_to_end(stepper, state, [](const SolverState&) {});
  return state.spectral;
}

}  // namespace efp
