#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "efp/efp.hpp"
#include "oracles.hpp"

using efp::complex;
using efp::Domain;
using efp::NodalField;
using efp::SpectralField;
using efp::UniformGrid;

namespace {

const Domain kDomain{-16.0, 16.0};

NodalField random_nodal(std::mt19937_64& rng, long k) {
  return NodalField(UniformGrid(kDomain, k), oracle::random_vector(rng, static_cast<size_t>(k)));
}

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(UniformGrid(kDomain, 0), efp::ConfigError);
  EXPECT_THROW(UniformGrid(kDomain, 7), efp::ConfigError);
  EXPECT_NO_THROW(UniformGrid(kDomain, 2));
  EXPECT_THROW(Domain(1.0, 1.0), efp::ConfigError);
}

TEST(Grid, EndpointsAreExact) {
  const UniformGrid g(kDomain, 6);
  EXPECT_EQ(g.node(0), -16.0);
  EXPECT_EQ(g.node(6), 16.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 32.0 / 6.0);
}

TEST(Nodal, ClosureIsEnforced) {
  const UniformGrid g(kDomain, 4);
  const NodalField v(g, {1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(v.values().size(), 5u);
  EXPECT_EQ(v[4], v[0]);
  EXPECT_THROW(NodalField(g, {1.0, 2.0, 3.0, 4.0, 5.0}), efp::ConfigError);
  EXPECT_NO_THROW(NodalField(g, {1.0, 2.0, 3.0, 4.0, 1.0}));
}

TEST(Interpolate, ConstantGivesZeroMode) {
  const auto u = efp::interpolate(NodalField::sample(UniformGrid(kDomain, 16), [](double) { return complex(1.0); }));
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) {
    EXPECT_NEAR(std::abs(u[l] - complex(l == 0 ? 1.0 : 0.0)), 0.0, 1e-15) << "l = " << l;
  }
}

TEST(Interpolate, SingleModeIsResolved) {
  const auto u = efp::interpolate(NodalField::sample(
      UniformGrid(kDomain, 16), [](double x) { return std::polar(1.0, kDomain.mu(1) * (x - kDomain.a)); }));
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) {
    EXPECT_NEAR(std::abs(u[l] - complex(l == 1 ? 1.0 : 0.0)), 0.0, 1e-14) << "l = " << l;
  }
}

TEST(Interpolate, MatchesDirectSum) {
  std::mt19937_64 rng(1);
  for (long k : {2L, 8L, 10L, 64L}) {
    const auto v = oracle::random_vector(rng, static_cast<size_t>(k));
    const auto u = efp::interpolate(NodalField(UniformGrid(kDomain, k), v));
    const auto ref = oracle::direct_interpolation(v, kDomain);
    EXPECT_LE(oracle::relative_l2(u.coefficients(), ref), 1e-13) << "K = " << k;
  }
}

TEST(Evaluate, RefusesAliasingGrid) {
  const SpectralField u(kDomain, 16);
  EXPECT_THROW(efp::evaluate_on_grid(u, 8), efp::ConfigError);
  EXPECT_THROW(efp::evaluate_on_grid(u, 17), efp::ConfigError);
}

TEST(Evaluate, ConstantOnFinerGrid) {
  const auto u = SpectralField::single_mode(kDomain, 8, 0, 1.0);
  const auto v = efp::evaluate_on_grid(u, 16);
  for (const auto& x : v.values()) EXPECT_NEAR(std::abs(x - complex(1.0)), 0.0, 1e-15);
}

TEST(Evaluate, MatchesDirectEvaluation) {
  std::mt19937_64 rng(2);
  const auto u = oracle::random_field(rng, kDomain, 16);
  const auto v = efp::evaluate_on_grid(u, 48);
  const auto ref = oracle::direct_nodal(u, 48);
  EXPECT_LE(oracle::relative_l2(v.periodic_values(), ref), 1e-13);
}

TEST(Evaluate, HighestModeSurvivesFourfoldRoundTrip) {
  const long k = 16;
  const auto u = SpectralField::single_mode(kDomain, k, k / 2 - 1, complex(0.3, -0.7));
  const auto back = efp::interpolate(efp::evaluate_on_grid(u, 4 * k));
  for (long l = back.min_mode(); l <= back.max_mode(); ++l) {
    const complex expect = l == k / 2 - 1 ? complex(0.3, -0.7) : complex();
    EXPECT_NEAR(std::abs(back[l] - expect), 0.0, 1e-14) << "l = " << l;
  }
}

TEST(Evaluate, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  for (long k : {2L, 16L, 128L}) {
    const auto u = oracle::random_field(rng, kDomain, k);
    const auto back = efp::interpolate(efp::evaluate_on_grid(u, k));
    EXPECT_LE(oracle::relative_l2(back.coefficients(), u.coefficients()), 1e-14) << "K = " << k;
  }
}

TEST(Truncate, Basics) {
  std::mt19937_64 rng(4);
  const auto u = oracle::random_field(rng, kDomain, 32);
  const auto same = efp::truncate(u, 32);
  EXPECT_TRUE(std::equal(same.coefficients().begin(), same.coefficients().end(), u.coefficients().begin()));

  const auto edge = SpectralField::single_mode(kDomain, 32, 8, 1.0);
  const auto cut = efp::truncate(edge, 16);
  for (const auto& c : cut.coefficients()) EXPECT_EQ(c, complex());

  const auto a = efp::truncate(efp::truncate(u, 16), 8);
  const auto b = efp::truncate(u, 8);
  EXPECT_TRUE(std::equal(a.coefficients().begin(), a.coefficients().end(), b.coefficients().begin()));
  EXPECT_THROW(efp::truncate(u, 64), efp::ConfigError);
}

TEST(Truncate, NonExpansive) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = oracle::random_field(rng, kDomain, 64);
    for (int m : {0, 1, 2}) {
      EXPECT_LE(efp::sobolev_norm(efp::truncate(u, 16), m), efp::sobolev_norm(u, m));
    }
  }
}

TEST(FreeFlow, Trivial) {
  std::mt19937_64 rng(6);
  const auto u = oracle::random_field(rng, kDomain, 32);
  const auto same = efp::free_flow(u, 0.0);
  EXPECT_TRUE(std::equal(same.coefficients().begin(), same.coefficients().end(), u.coefficients().begin()));
  const auto c = efp::free_flow(SpectralField::single_mode(kDomain, 32, 0, 2.0), 123.0);
  EXPECT_EQ(c[0], complex(2.0));
}

TEST(FreeFlow, AdditiveAndUnitary) {
  std::mt19937_64 rng(7);
  const auto u = oracle::random_field(rng, kDomain, 64);
  const auto a = efp::free_flow(efp::free_flow(u, 0.013), 0.029);
  const auto b = efp::free_flow(u, 0.042);
  EXPECT_LE(oracle::max_abs_diff(a.coefficients(), b.coefficients()), 1e-14 * 4);
  for (int m : {0, 1, 2}) {
    const double before = efp::sobolev_norm(u, m);
    EXPECT_NEAR(efp::sobolev_norm(b, m), before, 1e-14 * before);
  }
}

TEST(ExtendedProduct, UnitFactorIsIdentity) {
  std::mt19937_64 rng(8);
  const auto g = oracle::random_field(rng, kDomain, 16);
  const auto out = efp::extended_product(SpectralField::single_mode(kDomain, 32, 0, 1.0), g);
  EXPECT_LE(oracle::max_abs_diff(out.coefficients(), g.coefficients()), 1e-14);
}

TEST(ExtendedProduct, FrequencyShift) {
  const auto w = SpectralField::single_mode(kDomain, 32, 1, complex(0.5, 0.25));
  const auto g = SpectralField::single_mode(kDomain, 16, 0, complex(2.0, -1.0));
  const auto out = efp::extended_product(w, g);
  for (long l = out.min_mode(); l <= out.max_mode(); ++l) {
    const complex expect = l == 1 ? complex(0.5, 0.25) * complex(2.0, -1.0) : complex();
    EXPECT_NEAR(std::abs(out[l] - expect), 0.0, 1e-15) << "l = " << l;
  }
}

TEST(ExtendedProduct, MatchesDirectConvolution) {
  std::mt19937_64 rng(9);
  for (long n : {4L, 8L, 16L, 32L}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = oracle::random_field(rng, kDomain, 2 * n);
      const auto g = oracle::random_field(rng, kDomain, n);
      const auto out = efp::extended_product(w, g);
      const auto ref = oracle::direct_convolution(w, g);
      EXPECT_LE(oracle::relative_l2(out.coefficients(), ref.coefficients()), 1e-12) << "N = " << n;
    }
  }
}

TEST(ExtendedProduct, RejectsBandwidthMismatch) {
  EXPECT_THROW(efp::extended_product(SpectralField(kDomain, 16), SpectralField(kDomain, 16)), efp::ConfigError);
  EXPECT_THROW(efp::extended_product(SpectralField(kDomain, 12), SpectralField(kDomain, 8)), efp::ConfigError);
}

TEST(Norms, Examples) {
  EXPECT_EQ(efp::sobolev_norm(SpectralField(kDomain, 8), 0), 0.0);
  EXPECT_NEAR(efp::sobolev_norm(SpectralField::single_mode(kDomain, 8, 0, 1.0), 0), std::sqrt(32.0), 1e-14);
  const double mu = 2.0 * std::numbers::pi / 32.0;
  EXPECT_NEAR(std::pow(efp::sobolev_norm(SpectralField::single_mode(kDomain, 8, 1, 1.0), 1), 2),
              32.0 * (1.0 + mu * mu), 1e-12);
}

TEST(Norms, DiffNorm) {
  std::mt19937_64 rng(10);
  const auto u = oracle::random_field(rng, kDomain, 8);
  EXPECT_EQ(efp::diff_norm(u, u, 1), 0.0);
  EXPECT_NEAR(efp::diff_norm(u, SpectralField(kDomain, 16), 1), efp::sobolev_norm(u, 1), 1e-14);

  const complex d(0.3, 0.4);
  const auto a = SpectralField::single_mode(kDomain, 8, 2, complex(1.0) + d);
  const auto b = SpectralField::single_mode(kDomain, 16, 2, complex(1.0));
  const double mu = kDomain.mu(2);
  for (int m : {0, 1}) {
    EXPECT_NEAR(efp::diff_norm(a, b, m), std::sqrt(32.0) * std::pow(1.0 + mu * mu, 0.5 * m) * std::abs(d), 1e-14);
  }
  EXPECT_THROW(efp::diff_norm(a, SpectralField(Domain(-8.0, 8.0), 16), 0), efp::ConfigError);
  EXPECT_THROW(efp::diff_norm(b, a, 0), efp::ConfigError);
}

TEST(Norms, DiscreteParsevalIdentity) {
  std::mt19937_64 rng(11);
  for (long k : {2L, 8L, 64L, 256L}) {
    const auto v = random_nodal(rng, k);
    const double lhs = std::pow(efp::sobolev_norm(efp::interpolate(v), 0), 2);
    EXPECT_NEAR(lhs, efp::discrete_mass(v), 1e-13 * lhs) << "K = " << k;
  }
}

TEST(Norms, ParsevalAgainstQuadrature) {
  // Resolved Gaussian: ||psi||^2 = int exp(-x^2) dx = sqrt(pi) up to negligible tails.
  const auto u = efp::interpolate(
      NodalField::sample(UniformGrid(kDomain, 128), [](double x) { return complex(std::exp(-0.5 * x * x)); }));
  EXPECT_NEAR(std::pow(efp::sobolev_norm(u, 0), 2), std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Fft, ConcurrentTransformsAreDeterministic) {
  std::mt19937_64 rng(12);
  const auto v = random_nodal(rng, 1024);
  const auto expect = efp::interpolate(v);
  std::vector<std::thread> pool;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      bool same = true;
      for (int i = 0; i < 20; ++i) {
        const auto u = efp::interpolate(v);
        same = same && std::equal(u.coefficients().begin(), u.coefficients().end(), expect.coefficients().begin());
      }
      ok[static_cast<size_t>(t)] = same;
    });
  }
  for (auto& th : pool) th.join();
  for (int x : ok) EXPECT_TRUE(x);
}

TEST(FieldIo, SpectralRoundTrip) {
  std::mt19937_64 rng(13);
  const auto u = oracle::random_field(rng, kDomain, 16);
  std::stringstream ss;
  efp::io::write_spectral_csv(ss, u);
  EXPECT_EQ(ss.str().substr(0, 8), "l,re,im\n");
  const auto back = efp::io::read_spectral_csv(ss, kDomain);
  EXPECT_TRUE(std::equal(back.coefficients().begin(), back.coefficients().end(), u.coefficients().begin()));
}

TEST(FieldIo, NodalCsvHasClosureRow) {
  const NodalField v(UniformGrid(kDomain, 4), {1.0, 2.0, 3.0, 4.0});
  std::stringstream ss;
  efp::io::write_nodal_csv(ss, v);
  EXPECT_EQ(ss.str(), "j,x,re,im\n0,-16,1,0\n1,-8,2,0\n2,0,3,0\n3,8,4,0\n4,16,1,0\n");
}
