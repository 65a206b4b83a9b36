#pragma once

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>

#include "json.hpp"

#include "efp/errors.hpp"
#include "efp/field_io.hpp"
#include "efp/potentials.hpp"
#include "efp/propagators.hpp"

namespace efp {

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

inline nlohmann::json phase_table_sidecar(const PhaseFactorTable& table) {
  nlohmann::json j;
  j["kind"] = table.potential_name;
  j["potential_key"] = table.potential_key;
  j["tau"] = io::format_double(table.tau);
  j["N"] = table.n;
  j["bandwidth"] = table.coeffs.bandwidth();
  j["tolerance"] = io::format_double(table.requested_tolerance);
  j["provenance"] = std::string(to_string(table.provenance));
  if (table.provenance == Provenance::kQuadrature) {
    j["levels"] = table.levels;
    j["achieved_tolerance"] = io::format_double(table.achieved_tolerance);
  }
  return j;
}

/// `<stem>.csv` (spectral CSV of the 2N coefficients) and `<stem>.json`.
inline void write_phase_table(const PhaseFactorTable& table, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) ensure_directory(stem.parent_path());
  auto csv = stem;
  csv += ".csv";
  auto json = stem;
  json += ".json";
  io::write_file(csv, [&](std::ostream& os) { io::write_spectral_csv(os, table.coeffs); });
  io::write_file(json, [&](std::ostream& os) { os << phase_table_sidecar(table).dump(2) << '\n'; });
}

inline std::string snapshot_name(std::int64_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%08lld.csv", static_cast<long long>(step));
  return buf;
}

/// One spectral CSV per snapshot plus manifest.csv with
/// `step,time,file,l2_norm,h1_norm`.
inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  ensure_directory(dir);
  for (const auto& s : traj.snapshots) {
    io::write_file(dir / snapshot_name(s.step), [&](std::ostream& os) { io::write_spectral_csv(os, s.field); });
  }
  io::write_file(dir / "manifest.csv", [&](std::ostream& os) {
    os << "step,time,file,l2_norm,h1_norm\n";
    for (const auto& s : traj.snapshots) {
      os << s.step << ',' << io::format_double(s.time) << ',' << snapshot_name(s.step) << ','
         << io::format_double(sobolev_norm(s.field, 0)) << ',' << io::format_double(sobolev_norm(s.field, 1))
         << '\n';
    }
  });
}

}  // namespace efp
