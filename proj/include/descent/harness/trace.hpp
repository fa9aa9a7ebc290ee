#ifndef DESCENT_HARNESS_TRACE_HPP
#define DESCENT_HARNESS_TRACE_HPP

#include "descent/core.hpp"
#include "descent/erm.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace descent::harness {

enum class StopReason { Tolerance, Budget, Diverged, UserInterrupt };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::Budget: return "budget";
    case StopReason::Diverged: return "diverged";
    case StopReason::UserInterrupt: return "user-interrupt";
  }
  return "?";
}

struct TraceRecord {
  std::size_t step = 0;
  double f = 0;
  double grad_norm = 0;
  double step_min = 0;
  double step_max = 0;
  std::int64_t elapsed_ns = 0;
};

struct IterateDump {
  std::size_t step = 0;
  Vector x;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<IterateDump> iterates;
  StopReason stop_reason = StopReason::Budget;
  std::string diagnostic;  // set on abort
  std::size_t steps = 0;   // optimizer steps taken
  Vector x_final;
  double f_final = 0;
  double grad_norm_final = 0;

  /// Steps taken to meet the tolerance, when the run stopped for that reason.
  std::optional<std::size_t> steps_to_tolerance() const {
    if (stop_reason == StopReason::Tolerance) return steps;
    return std::nullopt;
  }
};

inline constexpr std::string_view kTraceHeader = "step,f,grad_norm,step_min,step_max,elapsed_ns";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes the CSV trace. The last line is a comment carrying the stop reason:
///   # stop_reason=<reason>,steps=<n>[,diagnostic=<text>]
inline void write_trace(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.step << ',' << detail::fmt_double(r.f) << ',' << detail::fmt_double(r.grad_norm) << ','
        << detail::fmt_double(r.step_min) << ',' << detail::fmt_double(r.step_max) << ',' << r.elapsed_ns << '\n';
  }
  out << "# stop_reason=" << to_string(trace.stop_reason) << ",steps=" << trace.steps;
  if (!trace.diagnostic.empty()) out << ",diagnostic=" << trace.diagnostic;
  out << '\n';
}

/// step,x_0,x_1,... one row per dumped iterate.
inline void write_iterates(std::ostream& out, const Trace& trace) {
  out << "step";
  const Eigen::Index n = trace.iterates.empty() ? 0 : trace.iterates.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  out << '\n';
  for (const auto& d : trace.iterates) {
    out << d.step;
    for (Eigen::Index i = 0; i < d.x.size(); ++i) out << ',' << detail::fmt_double(d.x[i]);
    out << '\n';
  }
}

inline std::string iterate_path(const std::string& trace_path) {
  const auto dot = trace_path.rfind('.');
  const auto slash = trace_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return trace_path + ".iterates";
  return trace_path.substr(0, dot) + ".iterates" + trace_path.substr(dot);
}

inline void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write trace file: " + path);
  write_trace(out, trace);
  if (!trace.iterates.empty()) {
    std::ofstream dump(iterate_path(path), std::ios::binary);
    if (!dump) throw ValidationError("cannot write iterate dump: " + iterate_path(path));
    write_iterates(dump, trace);
  }
}

/// Reads a trace back: records plus the trailing stop reason.
inline Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ValidationError("trace: missing or wrong header");
  bool terminal = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# stop_reason=", 0) == 0) {
      const std::string rest = line.substr(14);
      const std::string reason = rest.substr(0, rest.find(','));
      bool known = false;
      for (auto r : {StopReason::Tolerance, StopReason::Budget, StopReason::Diverged, StopReason::UserInterrupt}) {
        if (to_string(r) == reason) {
          t.stop_reason = r;
          known = true;
        }
      }
      if (!known) throw ValidationError("trace: unknown stop reason '" + reason + "'");
      const auto sp = rest.find("steps=");
      if (sp != std::string::npos) t.steps = std::stoull(rest.substr(sp + 6));
      terminal = true;
      continue;
    }
    if (terminal) throw ValidationError("trace: data after the stop-reason record");
    TraceRecord r;
    char comma;
    std::istringstream ls(line);
    ls >> r.step >> comma >> r.f >> comma >> r.grad_norm >> comma >> r.step_min >> comma >> r.step_max >> comma >>
        r.elapsed_ns;
    if (!ls) {
      // non-finite values are written as inf/nan, which istream does not read
      const auto cells = descent::detail::split_commas(line);
      if (cells.size() != 6) throw ValidationError("trace: malformed record '" + line + "'");
      auto num = [](std::string_view s) { return std::strtod(std::string(s).c_str(), nullptr); };
      r.step = std::stoull(std::string(cells[0]));
      r.f = num(cells[1]);
      r.grad_norm = num(cells[2]);
      r.step_min = num(cells[3]);
      r.step_max = num(cells[4]);
      r.elapsed_ns = std::stoll(std::string(cells[5]));
    }
    t.records.push_back(r);
  }
  if (!terminal) throw ValidationError("trace: no stop-reason record");
  return t;
}

}  // namespace descent::harness

#endif  // DESCENT_HARNESS_TRACE_HPP
