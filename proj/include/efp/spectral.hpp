#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "efp/errors.hpp"
#include "efp/fft.hpp"
#include "efp/grid.hpp"

namespace efp {

using complex = std::complex<double>;

/// Trigonometric polynomial sum_{l in T_K} c_l exp(i mu_l (x - a)) with
/// T_K = {-K/2, ..., K/2 - 1}.
///
/// Coefficients are stored in natural frequency order, so storage index
/// i = l + K/2. Transform-native order (l mod K) only appears inside the
/// conversion routines below.
class SpectralField {
 public:
  SpectralField(Domain domain, long bandwidth)
      : domain_(domain), coeffs_(checked(bandwidth), complex{}) {}

  SpectralField(Domain domain, std::vector<complex> coeffs)
      : domain_(domain), coeffs_(std::move(coeffs)) {
    require_even_size(static_cast<long>(coeffs_.size()), "spectral bandwidth");
  }

  static SpectralField single_mode(Domain domain, long bandwidth, long l, complex value) {
    SpectralField u(domain, bandwidth);
    u.at(l) = value;
    return u;
  }

  const Domain& domain() const noexcept { return domain_; }
  long bandwidth() const noexcept { return static_cast<long>(coeffs_.size()); }
  long min_mode() const noexcept { return -bandwidth() / 2; }
  long max_mode() const noexcept { return bandwidth() / 2 - 1; }
  bool has_mode(long l) const noexcept { return l >= min_mode() && l <= max_mode(); }

  complex& operator[](long l) noexcept { return coeffs_[static_cast<size_t>(l - min_mode())]; }
  const complex& operator[](long l) const noexcept {
    return coeffs_[static_cast<size_t>(l - min_mode())];
  }

  complex& at(long l) {
    if (!has_mode(l)) throw ConfigError("mode " + std::to_string(l) + " outside T_K");
    return (*this)[l];
  }
  const complex& at(long l) const {
    if (!has_mode(l)) throw ConfigError("mode " + std::to_string(l) + " outside T_K");
    return (*this)[l];
  }

  std::span<complex> coefficients() noexcept { return coeffs_; }
  std::span<const complex> coefficients() const noexcept { return coeffs_; }

 private:
  static long checked(long k) {
    require_even_size(k, "spectral bandwidth");
    return k;
  }

  Domain domain_;
  std::vector<complex> coeffs_;
};

/// Samples v_0..v_K on a UniformGrid with the periodic closure v_K = v_0.
class NodalField {
 public:
  /// Accepts either K values (closure appended) or K+1 values whose last
  /// entry must equal the first exactly.
  NodalField(UniformGrid grid, std::vector<complex> values)
      : grid_(grid), values_(std::move(values)) {
    const auto k = static_cast<size_t>(grid_.size());
    if (values_.size() == k) {
      values_.push_back(values_.front());
    } else if (values_.size() != k + 1 || values_.back() != values_.front()) {
      throw ConfigError("nodal values must have K entries or K+1 with v_K == v_0");
    }
  }

  /// v_j = f(x_j) for j < K, closed periodically.
  template <typename F>
  static NodalField sample(UniformGrid grid, F&& f) {
    std::vector<complex> v(static_cast<size_t>(grid.size()));
    for (long j = 0; j < grid.size(); ++j) v[static_cast<size_t>(j)] = f(grid.node(j));
    return NodalField(grid, std::move(v));
  }

  const UniformGrid& grid() const noexcept { return grid_; }
  long size() const noexcept { return grid_.size(); }
  const complex& operator[](long j) const noexcept { return values_[static_cast<size_t>(j)]; }

  /// All K+1 values including the closure.
  std::span<const complex> values() const noexcept { return values_; }
  /// The K independent values v_0..v_{K-1}.
  std::span<const complex> periodic_values() const noexcept {
    return std::span<const complex>(values_).first(values_.size() - 1);
  }

 private:
  UniformGrid grid_;
  std::vector<complex> values_;
};

namespace detail {

inline size_t wrap(long l, long m) noexcept {
  return static_cast<size_t>(((l % m) + m) % m);
}

/// Writes the coefficients of u into a length-m buffer in transform order.
inline void scatter(const SpectralField& u, std::span<complex> buffer) {
  const long m = static_cast<long>(buffer.size());
  std::fill(buffer.begin(), buffer.end(), complex{});
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) buffer[wrap(l, m)] = u[l];
}

/// Reads modes of T_n from a forward-transformed length-m buffer and applies 1/m.
inline SpectralField gather(std::span<const complex> buffer, Domain domain, long n) {
  const long m = static_cast<long>(buffer.size());
  const double scale = 1.0 / static_cast<double>(m);
  SpectralField out(domain, n);
  for (long l = out.min_mode(); l <= out.max_mode(); ++l) out[l] = buffer[wrap(l, m)] * scale;
  return out;
}

inline NodalField close_on_grid(std::vector<complex> values, Domain domain) {
  const long m = static_cast<long>(values.size());
  return NodalField(UniformGrid(domain, m), std::move(values));
}

}  // namespace detail

/// Discrete Fourier interpolation I_K: c_l = (1/K) sum_{j<K} v_j exp(-i mu_l (x_j - a)).
inline SpectralField interpolate(const NodalField& v) {
  auto src = v.periodic_values();
  std::vector<complex> buffer(src.begin(), src.end());
  fft::forward(buffer);
  return detail::gather(buffer, v.grid().domain(), v.size());
}

/// Values of u at the m-point grid; m >= bandwidth so that the samples
/// re-interpolate to u without aliasing.
inline NodalField evaluate_on_grid(const SpectralField& u, long m) {
  require_even_size(m, "evaluation grid size");
  if (m < u.bandwidth()) {
    throw ConfigError("evaluate_on_grid: M = " + std::to_string(m) +
                      " is smaller than the bandwidth " + std::to_string(u.bandwidth()));
  }
  std::vector<complex> buffer(static_cast<size_t>(m));
  detail::scatter(u, buffer);
  fft::backward(buffer);
  return detail::close_on_grid(std::move(buffer), u.domain());
}

/// Keeps the modes of T_n.
inline SpectralField truncate(const SpectralField& u, long n) {
  require_even_size(n, "truncation bandwidth");
  if (n > u.bandwidth()) throw ConfigError("truncate: N exceeds the field bandwidth");
  SpectralField out(u.domain(), n);
  for (long l = out.min_mode(); l <= out.max_mode(); ++l) out[l] = u[l];
  return out;
}

/// Embeds u into a larger bandwidth k with zero high modes.
inline SpectralField zero_pad(const SpectralField& u, long k) {
  require_even_size(k, "padded bandwidth");
  if (k < u.bandwidth()) throw ConfigError("zero_pad: target bandwidth is smaller than the field");
  SpectralField out(u.domain(), k);
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) out[l] = u[l];
  return out;
}

/// exp(-i t mu_l^2) for l in T_K, natural order.
inline std::vector<complex> free_flow_multipliers(const Domain& domain, long k, double t) {
  require_even_size(k, "free flow bandwidth");
  std::vector<complex> out(static_cast<size_t>(k));
  for (long l = -k / 2; l < k / 2; ++l) {
    const double mu = domain.mu(l);
    out[static_cast<size_t>(l + k / 2)] = std::polar(1.0, -t * mu * mu);
  }
  return out;
}

/// Elementwise product with a diagonal in natural order.
inline void apply_diagonal(SpectralField& u, std::span<const complex> diagonal) {
  auto c = u.coefficients();
  if (diagonal.size() != c.size()) throw ConfigError("diagonal length does not match bandwidth");
  for (size_t i = 0; i < c.size(); ++i) c[i] *= diagonal[i];
}

/// Exact free Schroedinger flow exp(i t Laplacian) on X_K.
inline SpectralField free_flow(SpectralField u, double t) {
  apply_diagonal(u, free_flow_multipliers(u.domain(), u.bandwidth(), t));
  return u;
}

/// Samples of a bandwidth-2N factor on the 4N grid, reusable across many
/// extended products with the same factor.
class ExtendedWindow {
 public:
  explicit ExtendedWindow(const SpectralField& w)
      : domain_(w.domain()), n_(w.bandwidth() / 2) {
    if (w.bandwidth() % 4 != 0) {
      throw ConfigError("extended product needs a factor of bandwidth 2N with N even");
    }
    samples_.resize(static_cast<size_t>(4 * n_));
    detail::scatter(w, samples_);
    fft::backward(samples_);
  }

  long n() const noexcept { return n_; }
  const Domain& domain() const noexcept { return domain_; }
  std::span<const complex> samples() const noexcept { return samples_; }

 private:
  Domain domain_;
  long n_;
  std::vector<complex> samples_;
};

/// First N Fourier coefficients of W*g with W of bandwidth 2N and g of
/// bandwidth N. The product has modes in (-3N/2, 3N/2), so the 4N-point
/// transform below reproduces the coefficient convolution exactly.
inline SpectralField extended_product(const ExtendedWindow& window, const SpectralField& g) {
  const long n = window.n();
  if (g.bandwidth() != n) {
    throw ConfigError("extended product: factor bandwidths must be 2N and N (got " +
                      std::to_string(2 * n) + " and " + std::to_string(g.bandwidth()) + ")");
  }
  if (!(g.domain() == window.domain())) throw ConfigError("extended product: domain mismatch");
  std::vector<complex> buffer(static_cast<size_t>(4 * n));
  detail::scatter(g, buffer);
  fft::backward(buffer);
  auto w = window.samples();
  for (size_t j = 0; j < buffer.size(); ++j) buffer[j] *= w[j];
  fft::forward(buffer);
  return detail::gather(buffer, g.domain(), n);
}

inline SpectralField extended_product(const SpectralField& w, const SpectralField& g) {
  if (w.bandwidth() != 2 * g.bandwidth()) {
    throw ConfigError("extended product: factor bandwidths must be 2N and N (got " +
                      std::to_string(w.bandwidth()) + " and " + std::to_string(g.bandwidth()) +
                      ")");
  }
  return extended_product(ExtendedWindow(w), g);
}

/// (L * sum_l (1 + mu_l^2)^m |c_l|^2)^(1/2).
inline double sobolev_norm(const SpectralField& u, int m) {
  if (m < 0) throw ConfigError("sobolev_norm: order must be non-negative");
  double sum = 0.0;
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) {
    const double mu = u.domain().mu(l);
    sum += std::pow(1.0 + mu * mu, m) * std::norm(u[l]);
  }
  return std::sqrt(u.domain().length() * sum);
}

/// Sobolev norm of u - ref after zero-padding u to the reference bandwidth.
inline double diff_norm(const SpectralField& u, const SpectralField& ref, int m) {
  if (!(u.domain() == ref.domain())) throw ConfigError("diff_norm: fields live on different domains");
  if (ref.bandwidth() < u.bandwidth()) {
    throw ConfigError("diff_norm: reference bandwidth must be at least the field bandwidth");
  }
  SpectralField d = zero_pad(u, ref.bandwidth());
  auto dc = d.coefficients();
  auto rc = ref.coefficients();
  for (size_t i = 0; i < dc.size(); ++i) dc[i] -= rc[i];
  return sobolev_norm(d, m);
}

/// h * sum_{j<K} |v_j|^2, the discrete counterpart of the squared L2 norm.
inline double discrete_mass(const NodalField& v) {
  double sum = 0.0;
  for (const auto& x : v.periodic_values()) sum += std::norm(x);
  return v.grid().spacing() * sum;
}

}  // namespace efp
