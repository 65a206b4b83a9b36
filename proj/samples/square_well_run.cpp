// Cubic GPE in the square well: compares LTeFP, STeFP and plain Fourier
// splitting at one resolution against a fine STeFP run.
#include <cstdio>

#include "efp/efp.hpp"

int main() {
  efp::SchemeConfig cfg;
  cfg.potential = efp::PotentialSpec::named("v1");
  cfg.t_final = 0.1;
  cfg.tau = 1e-3;
  cfg.n = 128;

  efp::SchemeConfig fine = cfg;
  fine.scheme = efp::Scheme::kSTeFP;
  fine.n = 1024;
  fine.tau = 1e-4;
  const auto psi0 = efp::InitialDatum::gaussian();
  const efp::SpectralField ref = efp::run_final(fine, psi0);

  for (efp::Scheme s : {efp::Scheme::kLTeFP, efp::Scheme::kSTeFP, efp::Scheme::kFSwQ}) {
    cfg.scheme = s;
    cfg.fswq_init = efp::FswqInit::kPlain;
    const efp::SpectralField u = efp::run_final(cfg, psi0);
    std::printf("%-7s  L2 %.3e  H1 %.3e\n", std::string(efp::to_string(s)).c_str(),
                efp::diff_norm(u, ref, 0), efp::diff_norm(u, ref, 1));
  }
}
