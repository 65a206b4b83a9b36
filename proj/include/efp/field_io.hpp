#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "efp/errors.hpp"
#include "efp/spectral.hpp"

namespace efp::io {

/// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// CSV `l,re,im`, one row per mode in ascending l.
inline void write_spectral_csv(std::ostream& os, const SpectralField& u) {
  os << "l,re,im\n";
  for (long l = u.min_mode(); l <= u.max_mode(); ++l) {
    os << l << ',' << format_double(u[l].real()) << ',' << format_double(u[l].imag()) << '\n';
  }
}

/// CSV `j,x,re,im` for j = 0..K (closure row included).
inline void write_nodal_csv(std::ostream& os, const NodalField& v) {
  os << "j,x,re,im\n";
  for (long j = 0; j <= v.size(); ++j) {
    os << j << ',' << format_double(v.grid().node(j)) << ',' << format_double(v[j].real()) << ','
       << format_double(v[j].imag()) << '\n';
  }
}

inline SpectralField read_spectral_csv(std::istream& is, Domain domain) {
  std::string line;
  if (!std::getline(is, line) || line != "l,re,im") throw IoError("spectral CSV: bad header");
  std::vector<long> modes;
  std::vector<complex> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string l, re, im;
    if (!std::getline(row, l, ',') || !std::getline(row, re, ',') || !std::getline(row, im)) {
      throw IoError("spectral CSV: malformed row '" + line + "'");
    }
    try {
      modes.push_back(std::stol(l));
      values.emplace_back(std::stod(re), std::stod(im));
    } catch (const std::exception&) {
      throw IoError("spectral CSV: malformed row '" + line + "'");
    }
  }
  const long k = static_cast<long>(values.size());
  if (k < 2 || k % 2 != 0) throw IoError("spectral CSV: row count must be even and >= 2");
  for (long i = 0; i < k; ++i) {
    if (modes[static_cast<size_t>(i)] != i - k / 2) throw IoError("spectral CSV: modes not sorted over T_K");
  }
  return SpectralField(domain, std::move(values));
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  writer(os);
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

/// Writes to a sibling temporary and renames, so concurrent readers never
/// observe a partial file.
template <typename Writer>
void write_file_atomic(const std::filesystem::path& path, Writer&& writer) {
  auto tmp = path;
  std::ostringstream suffix;
  suffix << ".tmp" << std::hash<std::thread::id>{}(std::this_thread::get_id());
  tmp += suffix.str();
  write_file(tmp, std::forward<Writer>(writer));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline SpectralField read_spectral_file(const std::filesystem::path& path, Domain domain) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_spectral_csv(is, domain);
}

}  // namespace efp::io
