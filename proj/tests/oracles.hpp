#pragma once

// Slow, independent reference implementations used by the unit and
// acceptance tests. None of these call the FFT layer.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "efp/efp.hpp"

namespace oracle {

using efp::complex;

inline std::vector<complex> random_vector(std::mt19937_64& rng, size_t n) {
  std::normal_distribution<double> d;
  std::vector<complex> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

inline efp::SpectralField random_field(std::mt19937_64& rng, efp::Domain domain, long k) {
  return efp::SpectralField(domain, random_vector(rng, static_cast<size_t>(k)));
}

/// c_l = (1/K) sum_j v_j exp(-i mu_l (x_j - a)), natural order.
inline std::vector<complex> direct_interpolation(const std::vector<complex>& v, efp::Domain d) {
  const long k = static_cast<long>(v.size());
  const double h = d.length() / static_cast<double>(k);
  std::vector<complex> c(v.size());
  for (long l = -k / 2; l < k / 2; ++l) {
    complex sum;
    for (long j = 0; j < k; ++j) sum += v[static_cast<size_t>(j)] * std::polar(1.0, -d.mu(l) * j * h);
    c[static_cast<size_t>(l + k / 2)] = sum / static_cast<double>(k);
  }
  return c;
}

/// sum_l c_l exp(i mu_l (x - a)) at x.
inline complex direct_evaluation(const efp::SpectralField& u, double x) {
  const auto& d = u.domain();
  complex sum;
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) sum += u[l] * std::polar(1.0, d.mu(l) * (x - d.a));
  return sum;
}

/// (W g)_l = sum_{k in T_N} W_{l-k} g_k for l in T_N.
inline efp::SpectralField direct_convolution(const efp::SpectralField& w, const efp::SpectralField& g) {
  const long n = g.bandwidth();
  efp::SpectralField out(g.domain(), n);
  for (long l = -n / 2; l < n / 2; ++l) {
    complex sum;
    for (long k = -n / 2; k < n / 2; ++k) sum += w[l - k] * g[k];
    out[l] = sum;
  }
  return out;
}

inline double relative_l2(std::span<const complex> a, std::span<const complex> b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / (den > 0.0 ? den : 1.0));
}

inline double max_abs_diff(std::span<const complex> a, std::span<const complex> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Fourier coefficients of exp(-i tau V) for a square well, written out from
/// the piecewise-constant integral (0 inside (left, right), `outside` elsewhere).
inline efp::SpectralField square_well_coefficients(efp::Domain d, double left, double right, double outside,
                                                   double tau, long count) {
  efp::SpectralField c(d, count);
  const double L = d.length();
  const complex e_out = std::exp(complex(0.0, -tau * outside));
  for (long l = -count / 2; l < count / 2; ++l) {
    auto piece = [&](double lo, double hi, complex value) -> complex {
      if (l == 0) return value * (hi - lo) / L;
      const double mu = d.mu(l);
      return value * (std::exp(complex(0.0, -mu * (hi - d.a))) - std::exp(complex(0.0, -mu * (lo - d.a)))) /
             (complex(0.0, -mu) * L);
    };
    c[l] = piece(d.a, left, e_out) + piece(left, right, 1.0) + piece(right, d.b, e_out);
  }
  return c;
}

/// Trapezoid rule on 2^p points, (1/M) sum_j w_j f(x_j) exp(-i mu_l (x_j - a)),
/// evaluated by direct summation with a root-of-unity table. `jumps` lists
/// nodes where f is discontinuous; there the mean of the one-sided values is used.
template <typename F>
std::vector<complex> oversampled_coefficients(F&& f, efp::Domain d, long count, int p,
                                              const std::vector<double>& jumps = {}) {
  const long m = 1L << p;
  const double h = d.length() / static_cast<double>(m);
  std::vector<complex> samples(static_cast<size_t>(m));
  for (long j = 0; j < m; ++j) samples[static_cast<size_t>(j)] = f(d.a + j * h);
  // Periodic endpoint: average of f(a) and f(b).
  samples[0] = 0.5 * (f(d.a) + f(d.b));
  for (double x : jumps) {
    const long j = std::lround((x - d.a) / h);
    const double eps = 1e-9 * h;
    samples[static_cast<size_t>(j)] = 0.5 * (f(x - eps) + f(x + eps));
  }
  std::vector<complex> roots(static_cast<size_t>(m));
  for (long j = 0; j < m; ++j) roots[static_cast<size_t>(j)] = std::polar(1.0, -2.0 * std::numbers::pi * j / m);
  std::vector<complex> c(static_cast<size_t>(count));
  for (long l = -count / 2; l < count / 2; ++l) {
    const long step = ((l % m) + m) % m;
    complex sum;
    long idx = 0;
    for (long j = 0; j < m; ++j) {
      sum += samples[static_cast<size_t>(j)] * roots[static_cast<size_t>(idx)];
      idx += step;
      if (idx >= m) idx -= m;
    }
    c[static_cast<size_t>(l + count / 2)] = sum / static_cast<double>(m);
  }
  return c;
}

/// One Lie eFP step written with O(N^2) sums: direct interpolation of the
/// nonlinear nodal factor, direct convolution with `w`, free-flow phase and
/// direct evaluation back on the grid. Returns the new coefficients.
inline efp::SpectralField lie_step(const std::vector<complex>& nodal, const efp::SpectralField& w, double tau,
                                   double beta) {
  const efp::Domain d = w.domain();
  std::vector<complex> v = nodal;
  for (auto& x : v) x *= std::exp(complex(0.0, -tau * beta * std::norm(x)));
  const efp::SpectralField g(d, direct_interpolation(v, d));
  efp::SpectralField u = direct_convolution(w, g);
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) {
    const double mu = d.mu(l);
    u[l] *= std::exp(complex(0.0, -tau * mu * mu));
  }
  return u;
}

inline std::vector<complex> direct_nodal(const efp::SpectralField& u, long k) {
  const efp::UniformGrid grid(u.domain(), k);
  std::vector<complex> v(static_cast<size_t>(k));
  for (long j = 0; j < k; ++j) v[static_cast<size_t>(j)] = direct_evaluation(u, grid.node(j));
  return v;
}

}  // namespace oracle
