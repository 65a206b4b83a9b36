#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "efp/experiments.hpp"
#include "efp/field_io.hpp"

namespace efp {

inline constexpr std::string_view kVersion = "1.0.0";

inline void write_errors_csv(std::ostream& os, const ErrorReport& report) {
  using io::format_double;
  os << "scheme,potential,norm,N,h,tau,error,wall_ms\n";
  for (const auto& r : report.rows) {
    for (Norm norm : report.norms) {
      os << report.scheme << ',' << report.potential << ',' << to_string(norm) << ',' << r.n << ','
         << format_double(r.h) << ',' << format_double(r.tau) << ',' << format_double(r.error(norm)) << ','
         << format_double(r.wall_ms) << '\n';
    }
  }
}

/// One row per (norm, coupling); slope and residual are `nan` when fewer
/// than three points survive floor detection.
inline void write_orders_csv(std::ostream& os, const ErrorReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("nan"); };
  os << "norm,coupling,slope,residual,points,floored\n";
  for (const auto& o : report.orders) {
    os << to_string(o.norm) << ',' << (o.coupling.empty() ? "none" : o.coupling) << ',' << opt(o.slope) << ','
       << opt(o.residual) << ',' << o.points_used << ',' << o.points_floored << '\n';
  }
}

/// gnuplot script drawing error against h and against tau from errors.csv.
inline void write_plot_script(std::ostream& os, const ErrorReport& report) {
  os << "# Usage: gnuplot plot.gp (from this directory)\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 900,650\n"
     << "set logscale xy\n"
     << "set format y '10^{%L}'\n"
     << "set key left top\n"
     << "set ylabel 'error'\n"
     << "set title '" << to_string(report.kind) << " study: " << report.scheme << ", " << report.potential
     << "'\n";
  struct Axis {
    const char* name;
    int column;
    const char* file;
  };
  for (const Axis axis : {Axis{"h", 5, "errors_vs_h.png"}, Axis{"tau", 6, "errors_vs_tau.png"}}) {
    os << "set output '" << axis.file << "'\n"
       << "set xlabel '" << axis.name << "'\n"
       << "plot ";
    for (size_t i = 0; i < report.norms.size(); ++i) {
      const auto label = to_string(report.norms[i]);
      os << (i ? ", \\\n     " : "") << "'errors.csv' every ::1 using " << axis.column << ":(strcol(3) eq '"
         << label << "' ? $7 : NaN) with points pt 7 title '" << label << "'";
    }
    os << "\n";
  }
}

inline nlohmann::json report_metadata(const ErrorReport& report) {
  nlohmann::json j;
  j["study"] = std::string(to_string(report.kind));
  j["scheme"] = report.scheme;
  j["potential"] = report.potential;
  j["reference_key"] = report.reference_key;
  j["reference_estimate_l2"] = io::format_double(report.reference_l2.error);
  j["reference_estimate_h1"] = io::format_double(report.reference_h1.error);
  j["reference_order_l2"] = io::format_double(report.reference_l2.order);
  j["reference_order_h1"] = io::format_double(report.reference_h1.order);
  j["version"] = std::string(kVersion);
  return j;
}

/// Writes errors.csv, orders.csv, report.json and plot.gp into dir.
inline void emit_report(const ErrorReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  io::write_file(dir / "errors.csv", [&](std::ostream& os) { write_errors_csv(os, report); });
  io::write_file(dir / "orders.csv", [&](std::ostream& os) { write_orders_csv(os, report); });
  io::write_file(dir / "report.json", [&](std::ostream& os) { os << report_metadata(report).dump(2) << '\n'; });
  io::write_file(dir / "plot.gp", [&](std::ostream& os) { write_plot_script(os, report); });
}

}  // namespace efp
