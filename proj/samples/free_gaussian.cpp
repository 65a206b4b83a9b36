// Linear free Schrodinger flow of a Gaussian, compared with the closed form
//   psi(x, t) = (1 + 2it)^(-1/2) exp(-x^2 / (2 (1 + 2it))).
#include <complex>
#include <cstdio>

#include "efp/efp.hpp"

int main() {
  efp::SchemeConfig cfg;
  cfg.scheme = efp::Scheme::kSTeFP;
  cfg.potential = efp::PotentialSpec::named("zero");
  cfg.beta = 0.0;
  cfg.t_final = 1.0;
  cfg.tau = 1e-2;

  for (long n : {32, 64, 128, 256}) {
    cfg.n = n;
    const efp::SpectralField u = efp::run_final(cfg, efp::InitialDatum::gaussian());

    const double t = cfg.t_final;
    const efp::UniformGrid grid(cfg.domain, n);
    const auto exact = efp::interpolate(efp::NodalField::sample(grid, [t](double x) {
      const std::complex<double> d(1.0, 2.0 * t);
      return std::exp(-x * x / (2.0 * d)) / std::sqrt(d);
    }));
    std::printf("N = %4ld   L2 error %.3e   L2 norm %.15f\n", n, efp::diff_norm(u, exact, 0),
                efp::sobolev_norm(u, 0));
  }
}
