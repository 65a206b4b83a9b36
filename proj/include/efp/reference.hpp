#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "efp/errors.hpp"
#include "efp/field_io.hpp"
#include "efp/propagators.hpp"

namespace efp {

/// Parameters of a fine STeFP run used as the "exact" solution.
struct ReferenceSpec {
  PotentialSpec potential = PotentialSpec::named("zero");
  double beta = 1.0;
  double sigma = 1.0;
  double t_final = 1.0;
  long n_ref = 4096;
  double tau_ref = 1e-5;
  InitialDatum psi0 = InitialDatum::gaussian();
  double quad_tol = kDefaultQuadratureTolerance;

  SchemeConfig scheme() const {
    SchemeConfig cfg;
    cfg.scheme = Scheme::kSTeFP;
    cfg.n = n_ref;
    cfg.tau = tau_ref;
    cfg.t_final = t_final;
    cfg.beta = beta;
    cfg.sigma = sigma;
    cfg.potential = potential;
    cfg.domain = potential.domain();
    cfg.quad_tol = quad_tol;
    return cfg;
  }

  /// File-name-safe encoding of every parameter.
  std::string key() const {
    using io::format_double;
    std::string raw = "ref_" + potential.key() + "_beta" + format_double(beta) + "_sigma" +
                      format_double(sigma) + "_T" + format_double(t_final) + "_N" + std::to_string(n_ref) +
                      "_tau" + format_double(tau_ref) + "_" + psi0.key + "_tol" + format_double(quad_tol);
    for (auto& ch : raw) {
      const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                      ch == '.' || ch == '-' || ch == '_' || ch == '+';
      if (!ok) ch = '_';
    }
    return raw;
  }
};

/// Cache directory: the explicit argument, else $EFP_CACHE_DIR, else ".efp_cache".
inline std::filesystem::path resolve_cache_dir(const std::optional<std::filesystem::path>& explicit_dir = {}) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("EFP_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return ".efp_cache";
}

/// Final I_N psi of the STeFP reference run. With a non-empty cache_dir the
/// result is stored as `<key>.csv` and reused on later calls.
inline SpectralField reference_solution(const ReferenceSpec& spec, const std::filesystem::path& cache_dir) {
  const double h = spec.potential.domain().length() / static_cast<double>(spec.n_ref);
  if (spec.tau_ref > h * h / std::numbers::pi) {
    throw ConfigError("reference time step violates tau <= h^2/pi");
  }
  const SchemeConfig cfg = spec.scheme();
  cfg.validate();
  std::filesystem::path file;
  if (!cache_dir.empty()) {
    file = cache_dir / (spec.key() + ".csv");
    if (std::filesystem::exists(file)) return io::read_spectral_file(file, cfg.domain);
  }
  SpectralField result = run_final(cfg, spec.psi0);
  if (!file.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (ec) throw IoError("cannot create cache directory " + cache_dir.string() + ": " + ec.message());
    io::write_file_atomic(file, [&](std::ostream& os) { io::write_spectral_csv(os, result); });
  }
  return result;
}

}  // namespace efp
