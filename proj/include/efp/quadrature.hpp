#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "efp/fft.hpp"
#include "efp/grid.hpp"

namespace efp::quad {

using complex = std::complex<double>;

/// Quadrature node on an absolute interval.
struct Node {
  double x;
  double w;
};

/// 20-point Gauss-Legendre rule mapped to [0, 1], ascending.
inline const std::vector<Node>& unit_gauss_legendre() {
  static const std::vector<Node> rule = [] {
    using rule20 = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = rule20::abscissa();
    const auto& ws = rule20::weights();
    std::vector<Node> out;
    for (size_t i = xs.size(); i-- > 0;) out.push_back({0.5 * (1.0 - xs[i]), 0.5 * ws[i]});
    for (size_t i = 0; i < xs.size(); ++i) out.push_back({0.5 * (1.0 + xs[i]), 0.5 * ws[i]});
    return out;
  }();
  return rule;
}

inline void append_gauss(std::vector<Node>& nodes, double lo, double hi) {
  const double width = hi - lo;
  for (const auto& n : unit_gauss_legendre()) nodes.push_back({lo + width * n.x, width * n.w});
}

/// Geometric grading toward the singular end(s) of [lo, hi]: pieces shrink by
/// half at each of `depth` levels.
inline void append_graded(std::vector<Node>& nodes, double lo, double hi, bool singular_lo,
                          bool singular_hi, int depth) {
  if (singular_lo && singular_hi) {
    const double mid = 0.5 * (lo + hi);
    append_graded(nodes, lo, mid, true, false, depth);
    append_graded(nodes, mid, hi, false, true, depth);
    return;
  }
  if (!singular_lo && !singular_hi) {
    append_gauss(nodes, lo, hi);
    return;
  }
  const double width = hi - lo;
  double frac = 1.0;
  for (int k = 0; k < depth; ++k) {
    const double inner = 0.5 * frac;
    if (singular_lo) {
      append_gauss(nodes, lo + width * inner, lo + width * frac);
    } else {
      append_gauss(nodes, hi - width * frac, hi - width * inner);
    }
    frac = inner;
  }
  if (singular_lo) {
    append_gauss(nodes, lo, lo + width * frac);
  } else {
    append_gauss(nodes, hi - width * frac, hi);
  }
}

/// Fourier coefficients (1/L) int_a^b f(x) exp(-i mu_l (x - a)) dx for
/// l in {-count/2, ..., count/2 - 1}, natural order.
///
/// Composite Gauss-Legendre on P uniform panels. For panels free of
/// breakpoints the sum over panels at a fixed local node is a length-P DFT,
/// so all coefficients cost p FFTs of length P. Panels touching a breakpoint
/// are split there, graded geometrically toward it and summed directly.
/// `level` doubles P and deepens the grading.
template <typename F>
std::vector<complex> fourier_coefficients(F&& f, const Domain& domain, long count,
                                          std::vector<double> breakpoints, int level) {
  const double length = domain.length();
  const long panels = std::max<long>(64, count) << level;
  const double width = length / static_cast<double>(panels);
  const int depth = 16 + 8 * level;
  const double snap = 1e-12 * length;

  std::sort(breakpoints.begin(), breakpoints.end());
  std::erase_if(breakpoints, [&](double x) { return x <= domain.a + snap || x >= domain.b - snap; });

  // Panels that touch a breakpoint, with the breakpoints that fall inside them.
  std::vector<char> special(static_cast<size_t>(panels), 0);
  for (double x : breakpoints) {
    const double pos = (x - domain.a) / width;
    const long k = static_cast<long>(std::floor(pos));
    for (long p = k - 1; p <= k + 1; ++p) {
      if (p < 0 || p >= panels) continue;
      const double lo = domain.a + static_cast<double>(p) * width;
      if (x >= lo - snap && x <= lo + width + snap) special[static_cast<size_t>(p)] = 1;
    }
  }

  std::vector<complex> coeffs(static_cast<size_t>(count));
  const long half = count / 2;
  const auto& rule = unit_gauss_legendre();
  std::vector<complex> buffer(static_cast<size_t>(panels));
  for (const auto& q : rule) {
    for (long k = 0; k < panels; ++k) {
      buffer[static_cast<size_t>(k)] =
          special[static_cast<size_t>(k)]
              ? complex{}
              : f(domain.a + (static_cast<double>(k) + q.x) * width);
    }
    fft::forward(buffer);
    for (long l = -half; l < half; ++l) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(l) * q.x /
                           static_cast<double>(panels);
      const size_t idx = static_cast<size_t>(((l % panels) + panels) % panels);
      coeffs[static_cast<size_t>(l + half)] += q.w * std::polar(1.0, phase) * buffer[idx];
    }
  }
  const double bulk_scale = width / length;
  for (auto& c : coeffs) c *= bulk_scale;

  std::vector<Node> nodes;
  for (long p = 0; p < panels; ++p) {
    if (!special[static_cast<size_t>(p)]) continue;
    const double lo = domain.a + static_cast<double>(p) * width;
    const double hi = (p + 1 == panels) ? domain.b : lo + width;
    std::vector<double> cuts{lo};
    bool sing_lo = false, sing_hi = false;
    for (double x : breakpoints) {
      if (std::abs(x - lo) <= snap) {
        sing_lo = true;
      } else if (std::abs(x - hi) <= snap) {
        sing_hi = true;
      } else if (x > lo && x < hi) {
        cuts.push_back(x);
      }
    }
    cuts.push_back(hi);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const bool s_lo = (i == 0) ? sing_lo : true;
      const bool s_hi = (i + 2 == cuts.size()) ? sing_hi : true;
      append_graded(nodes, cuts[i], cuts[i + 1], s_lo, s_hi, depth);
    }
  }
  // exp(-i mu_l (x-a)) by recurrence in l, resynchronised every 64 modes.
  const double mu1 = domain.mu(1);
  for (const auto& node : nodes) {
    const complex value = f(node.x) * (node.w / length);
    const double arg = node.x - domain.a;
    const complex step = std::polar(1.0, -mu1 * arg);
    complex phase;
    for (long l = -half; l < half; ++l) {
      if ((l + half) % 64 == 0) phase = std::polar(1.0, -domain.mu(l) * arg);
      coeffs[static_cast<size_t>(l + half)] += value * phase;
      phase *= step;
    }
  }
  return coeffs;
}

}  // namespace efp::quad
