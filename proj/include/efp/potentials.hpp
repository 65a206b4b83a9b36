#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "efp/errors.hpp"
#include "efp/field_io.hpp"
#include "efp/grid.hpp"
#include "efp/quadrature.hpp"
#include "efp/spectral.hpp"

namespace efp {

/// 0 on the open interval (left, right), `outside` elsewhere.
struct SquareWell {
  double left = -4.0;
  double right = 4.0;
  double outside = 10.0;
};

/// |x|^alpha.
struct PowerLaw {
  double alpha = 1.0;
};

/// |x|^alpha (1 - x^2/radius^2)^window_power.
struct WindowedPowerLaw {
  double alpha = 1.0;
  int window_power = 1;
  double radius = 16.0;
};

struct ZeroPotential {};

/// Arbitrary real potential. Points where it is discontinuous or has a kink
/// should be listed so the quadrature can split there.
struct TabulatedPotential {
  std::string name;
  std::function<double(double)> fn;
  std::vector<double> breakpoints;
};

/// A real potential on a Domain.
class PotentialSpec {
 public:
  using Kind = std::variant<SquareWell, PowerLaw, WindowedPowerLaw, ZeroPotential, TabulatedPotential>;

  PotentialSpec(Kind kind, Domain domain, std::string label = {})
      : kind_(std::move(kind)), domain_(domain), label_(std::move(label)) {
    if (const auto* sw = std::get_if<SquareWell>(&kind_)) {
      if (!(sw->left < sw->right) || !(sw->left > domain.a) || !(sw->right < domain.b)) {
        throw ConfigError("square well interval must lie strictly inside the domain");
      }
    } else if (const auto* pl = std::get_if<PowerLaw>(&kind_)) {
      if (!(pl->alpha > 0.0)) throw ConfigError("power-law exponent must be positive");
    } else if (const auto* wp = std::get_if<WindowedPowerLaw>(&kind_)) {
      if (!(wp->alpha > 0.0) || wp->window_power < 0 || !(wp->radius > 0.0)) {
        throw ConfigError("invalid windowed power-law parameters");
      }
    } else if (const auto* tab = std::get_if<TabulatedPotential>(&kind_)) {
      if (!tab->fn || tab->name.empty()) throw ConfigError("tabulated potential needs a name and a callable");
    }
  }

  /// The catalog used in the convergence studies on (-16, 16):
  /// v1 square well, v2 = |x|^0.76, v3 = |x|^1.51 (1-x^2/256)^2,
  /// v4 = |x|^2.51 (1-x^2/256)^3, zero.
  static PotentialSpec named(std::string_view name, Domain domain = Domain(-16.0, 16.0)) {
    if (name == "v1") return {SquareWell{-4.0, 4.0, 10.0}, domain, "v1"};
    if (name == "v2") return {PowerLaw{0.76}, domain, "v2"};
    if (name == "v3") return {WindowedPowerLaw{1.51, 2, 16.0}, domain, "v3"};
    if (name == "v4") return {WindowedPowerLaw{2.51, 3, 16.0}, domain, "v4"};
    if (name == "zero") return {ZeroPotential{}, domain, "zero"};
    throw ConfigError("unknown potential '" + std::string(name) + "' (expected v1, v2, v3, v4 or zero)");
  }

  const Kind& kind() const noexcept { return kind_; }
  const Domain& domain() const noexcept { return domain_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroPotential>(kind_); }

  /// Short name for reports; falls back to the key.
  std::string name() const { return label_.empty() ? key() : label_; }

  /// Canonical identity of the potential, including the domain.
  std::string key() const {
    using io::format_double;
    std::string body = std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SquareWell>) {
            return "squarewell_" + format_double(k.left) + "_" + format_double(k.right) + "_" +
                   format_double(k.outside);
          } else if constexpr (std::is_same_v<T, PowerLaw>) {
            return "powerlaw_" + format_double(k.alpha);
          } else if constexpr (std::is_same_v<T, WindowedPowerLaw>) {
            return "windowed_" + format_double(k.alpha) + "_" + std::to_string(k.window_power) + "_" +
                   format_double(k.radius);
          } else if constexpr (std::is_same_v<T, ZeroPotential>) {
            return "zero";
          } else {
            return "tabulated_" + k.name;
          }
        },
        kind_);
    return body + "_on_" + format_double(domain_.a) + "_" + format_double(domain_.b);
  }

  /// Points where V or its derivatives jump.
  std::vector<double> breakpoints() const {
    return std::visit(
        [this](const auto& k) -> std::vector<double> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SquareWell>) {
            return {k.left, k.right};
          } else if constexpr (std::is_same_v<T, PowerLaw> || std::is_same_v<T, WindowedPowerLaw>) {
            if (domain_.a < 0.0 && domain_.b > 0.0) return {0.0};
            return {};
          } else if constexpr (std::is_same_v<T, TabulatedPotential>) {
            return k.breakpoints;
          } else {
            return {};
          }
        },
        kind_);
  }

  /// Pointwise value without the domain check, for hot loops over known nodes.
  double value_unchecked(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SquareWell>) {
            return (x > k.left && x < k.right) ? 0.0 : k.outside;
          } else if constexpr (std::is_same_v<T, PowerLaw>) {
            return std::pow(std::abs(x), k.alpha);
          } else if constexpr (std::is_same_v<T, WindowedPowerLaw>) {
            const double s = 1.0 - x * x / (k.radius * k.radius);
            return std::pow(std::abs(x), k.alpha) * std::pow(s, k.window_power);
          } else if constexpr (std::is_same_v<T, ZeroPotential>) {
            return 0.0;
          } else {
            return k.fn(x);
          }
        },
        kind_);
  }

 private:
  Kind kind_;
  Domain domain_;
  std::string label_;
};

/// V(x) for x in [a, b]. Square-well boundary points take the outside value.
inline double eval_potential(const PotentialSpec& spec, double x) {
  if (!spec.domain().contains(x)) {
    throw ConfigError("potential evaluated outside its domain at x = " + io::format_double(x));
  }
  return spec.value_unchecked(x);
}

enum class Provenance { kAnalytic, kQuadrature };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::kAnalytic ? "analytic" : "quadrature";
}

/// Fourier projection P_{2N}(exp(-i tau V)) together with its samples on the
/// 4N grid used by every extended product.
struct PhaseFactorTable {
  std::string potential_key;
  std::string potential_name;
  long n;
  double tau;
  SpectralField coeffs;  // bandwidth 2N
  Provenance provenance;
  double requested_tolerance;
  int levels = 0;                   // refinement levels used (quadrature only)
  double achieved_tolerance = 0.0;  // last level-to-level difference (quadrature only)
  ExtendedWindow window;

  PhaseFactorTable(std::string key, std::string name, long n_, double tau_, SpectralField c,
                   Provenance prov, double tol, int lv, double achieved)
      : potential_key(std::move(key)),
        potential_name(std::move(name)),
        n(n_),
        tau(tau_),
        coeffs(std::move(c)),
        provenance(prov),
        requested_tolerance(tol),
        levels(lv),
        achieved_tolerance(achieved),
        window(coeffs) {}
};

namespace detail {

/// (1/L) int_lo^hi exp(-i mu (x - a)) dx.
inline complex segment_coefficient(const Domain& d, long l, double lo, double hi) {
  if (l == 0) return complex((hi - lo) / d.length(), 0.0);
  const double mu = d.mu(l);
  const complex e_lo = std::polar(1.0, -mu * (lo - d.a));
  const complex e_hi = std::polar(1.0, -mu * (hi - d.a));
  return (e_lo - e_hi) / (complex(0.0, mu) * d.length());
}

}  // namespace detail

inline constexpr double kDefaultQuadratureTolerance = 1e-12;
inline constexpr int kMaxQuadratureLevels = 6;

/// Closed-form table for a square well (exp(-i tau V) is piecewise constant).
inline SpectralField square_well_phase_coefficients(const SquareWell& sw, const Domain& d, double tau,
                                                    long count) {
  SpectralField c(d, count);
  const complex outside = std::polar(1.0, -tau * sw.outside);
  const complex jump = complex(1.0, 0.0) - outside;
  for (long l = c.min_mode(); l <= c.max_mode(); ++l) {
    c[l] = jump * detail::segment_coefficient(d, l, sw.left, sw.right);
  }
  c[0] += outside;
  return c;
}

/// Certified quadrature for P_count(exp(-i tau V)): refines until two
/// successive levels agree to `tol` in the largest coefficient difference.
inline PhaseFactorTable quadrature_phase_projection(const PotentialSpec& spec, double tau, long n,
                                                    double tol) {
  const Domain& d = spec.domain();
  auto integrand = [&](double x) { return std::polar(1.0, -tau * spec.value_unchecked(x)); };
  std::vector<complex> previous =
      quad::fourier_coefficients(integrand, d, 2 * n, spec.breakpoints(), 0);
  double best = std::numeric_limits<double>::infinity();
  for (int level = 1; level < kMaxQuadratureLevels; ++level) {
    std::vector<complex> current =
        quad::fourier_coefficients(integrand, d, 2 * n, spec.breakpoints(), level);
    double diff = 0.0;
    for (size_t i = 0; i < current.size(); ++i) diff = std::max(diff, std::abs(current[i] - previous[i]));
    best = std::min(best, diff);
    if (diff <= tol) {
      return PhaseFactorTable(spec.key(), spec.name(), n, tau, SpectralField(d, std::move(current)),
                              Provenance::kQuadrature, tol, level + 1, diff);
    }
    previous = std::move(current);
  }
  throw QuadratureError("phase projection for " + spec.name() + " did not reach tolerance " +
                            io::format_double(tol) + "; best level difference " + io::format_double(best),
                        best);
}

/// P_{2N}(exp(-i tau V)): closed form for square wells and the zero
/// potential, certified adaptive quadrature otherwise.
inline PhaseFactorTable phase_projection(const PotentialSpec& spec, double tau, long n,
                                         double tol = kDefaultQuadratureTolerance) {
  require_even_size(n, "N");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("phase projection needs tau > 0");
  if (!(tol > 0.0)) throw ConfigError("phase projection needs tol > 0");
  const Domain& d = spec.domain();
  if (spec.is_zero()) {
    return PhaseFactorTable(spec.key(), spec.name(), n, tau,
                            SpectralField::single_mode(d, 2 * n, 0, 1.0), Provenance::kAnalytic, tol, 0,
                            0.0);
  }
  if (const auto* sw = std::get_if<SquareWell>(&spec.kind())) {
    return PhaseFactorTable(spec.key(), spec.name(), n, tau,
                            square_well_phase_coefficients(*sw, d, tau, 2 * n), Provenance::kAnalytic,
                            tol, 0, 0.0);
  }
  return quadrature_phase_projection(spec, tau, n, tol);
}

/// Memoizes phase_projection by (potential key, tau, N, tol). Lookups are
/// serialized; a table is computed at most once per key.
class PhaseFactorCache {
 public:
  static PhaseFactorCache& global() {
    static PhaseFactorCache cache;
    return cache;
  }

  std::shared_ptr<const PhaseFactorTable> get(const PotentialSpec& spec, double tau, long n,
                                              double tol = kDefaultQuadratureTolerance) {
    Key key{spec.key(), tau, n, tol};
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mutex_);
      auto& entry = slots_[key];
      if (!entry) entry = std::make_shared<Slot>();
      slot = entry;
    }
    std::lock_guard slot_lock(slot->mutex);
    if (!slot->table) {
      slot->table = std::make_shared<const PhaseFactorTable>(phase_projection(spec, tau, n, tol));
      std::lock_guard lock(mutex_);
      ++computations_;
    }
    return slot->table;
  }

  /// Number of phase_projection calls performed so far.
  std::int64_t computations() const {
    std::lock_guard lock(mutex_);
    return computations_;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    slots_.clear();
  }

 private:
  using Key = std::tuple<std::string, double, long, double>;
  struct Slot {
    std::mutex mutex;
    std::shared_ptr<const PhaseFactorTable> table;
  };

  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<Slot>> slots_;
  std::int64_t computations_ = 0;
};

inline std::shared_ptr<const PhaseFactorTable> phase_factor_cache(const PotentialSpec& spec, double tau,
                                                                  long n,
                                                                  double tol = kDefaultQuadratureTolerance) {
  return PhaseFactorCache::global().get(spec, tau, n, tol);
}

}  // namespace efp
