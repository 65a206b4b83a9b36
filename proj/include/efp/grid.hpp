#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "efp/errors.hpp"

namespace efp {

/// Periodic interval (a, b). Frequencies are mu_l = 2*pi*l / (b - a).
struct Domain {
  double a = -16.0;
  double b = 16.0;

  Domain() = default;
  Domain(double left, double right) : a(left), b(right) {
    if (!(right > left) || !std::isfinite(left) || !std::isfinite(right)) {
      throw ConfigError("domain requires finite a < b");
    }
  }

  double length() const noexcept { return b - a; }
  double mu(long l) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(l) / length();
  }
  bool contains(double x) const noexcept { return x >= a && x <= b; }

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Rejects bandwidths that cannot index the symmetric set {-K/2, ..., K/2-1}.
inline void require_even_size(long k, const char* what) {
  if (k < 2 || k % 2 != 0) {
    throw ConfigError(std::string(what) + " must be an even integer >= 2, got " +
                      std::to_string(k));
  }
}

/// K uniform cells on a Domain; nodes x_j = a + j*h for j = 0..K.
class UniformGrid {
 public:
  UniformGrid(Domain domain, long points) : domain_(domain), points_(points) {
    require_even_size(points, "grid size");
  }

  const Domain& domain() const noexcept { return domain_; }
  long size() const noexcept { return points_; }
  double spacing() const noexcept { return domain_.length() / static_cast<double>(points_); }

  /// Node j; node(size()) is exactly b.
  double node(long j) const noexcept {
    if (j == points_) return domain_.b;
    return domain_.a + static_cast<double>(j) * spacing();
  }

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

 private:
  Domain domain_;
  long points_;
};

}  // namespace efp
