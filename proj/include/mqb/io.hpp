#pragma once

// Trajectory serialization. CSV rows are one record per line with a trailing
// block of '# key=value' metadata comments; JSON mirrors the same content as
// one document. Doubles are printed in shortest round-trip form so repeated
// runs produce byte-identical files.

#include "mqb/runner.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace mqb {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kCsvHeader = "k,energy,purity,fano,ergotropy,trace_leak,n_max";

namespace detail {

inline void write_summary_kv(std::ostream& os, const ModelParams& params,
                             const RunOptions& options, const RunOutcome& outcome) {
  os << "# classification=" << to_string(outcome.classification) << '\n';
  if (outcome.steady_window)
    os << "# steady_window=" << outcome.steady_window->first << ':'
       << outcome.steady_window->second << '\n';
  os << "# theta=" << format_double(params.theta) << '\n';
  os << "# q=" << format_double(params.q) << '\n';
  os << "# c=" << format_double(params.c) << '\n';
  os << "# gamma_tr=" << format_double(params.gamma_tr) << '\n';
  os << "# nbar=" << format_double(params.nbar) << '\n';
  os << "# n_max_initial=" << params.n_max << '\n';
  os << "# collisions=" << params.collisions << '\n';
  os << "# decimate=" << options.decimate << '\n';
  os << "# plateau_epsilon=" << format_double(options.plateau_epsilon) << '\n';
  os << "# plateau_window=" << options.plateau_window << '\n';
  os << "# smoothing_collisions=" << options.smoothing_collisions << '\n';
  os << "# growth_windows=" << options.growth_windows << '\n';
  os << "# metastable_slope_ratio=" << format_double(options.metastable_slope_ratio) << '\n';
  os << "# leak_threshold=" << format_double(options.leak_threshold) << '\n';
  os << "# n_max_cap=" << options.n_max_cap << '\n';
}

}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, const RunResult& result,
                                 const ModelParams& params, const RunOptions& options) {
  os << kCsvHeader << '\n';
  for (const auto& rec : result.records) {
    const auto& o = rec.observables;
    os << rec.k << ',' << format_double(o.energy) << ',' << format_double(o.purity) << ','
       << format_double(o.fano) << ',' << format_double(o.ergotropy) << ','
       << format_double(o.trace_leak) << ',' << rec.n_max_used << '\n';
  }
  if (result.records.empty()) return;  // header-only output for empty runs
  detail::write_summary_kv(os, params, options, result.outcome);
}

inline nlohmann::json trajectory_json(const RunResult& result, const ModelParams& params,
                                      const RunOptions& options) {
  nlohmann::json j;
  j["params"] = {{"theta", params.theta},   {"q", params.q},
                 {"c", params.c},           {"gamma_tr", params.gamma_tr},
                 {"nbar", params.nbar},     {"n_max_initial", params.n_max},
                 {"collisions", params.collisions}};
  j["options"] = {{"decimate", options.decimate},
                  {"plateau_epsilon", options.plateau_epsilon},
                  {"plateau_window", options.plateau_window},
                  {"smoothing_collisions", options.smoothing_collisions},
                  {"growth_windows", options.growth_windows},
                  {"metastable_slope_ratio", options.metastable_slope_ratio},
                  {"leak_threshold", options.leak_threshold},
                  {"n_max_cap", options.n_max_cap}};
  j["records"] = nlohmann::json::array();
  for (const auto& rec : result.records) {
    const auto& o = rec.observables;
    j["records"].push_back({{"k", rec.k},
                            {"energy", o.energy},
                            {"purity", o.purity},
                            {"fano", o.fano},
                            {"ergotropy", o.ergotropy},
                            {"trace_leak", o.trace_leak},
                            {"n_max", rec.n_max_used}});
  }
  if (result.records.empty()) {
    j["summary"] = nullptr;
  } else {
    nlohmann::json s;
    s["classification"] = to_string(result.outcome.classification);
    if (result.outcome.steady_window)
      s["steady_window"] = {result.outcome.steady_window->first,
                            result.outcome.steady_window->second};
    else
      s["steady_window"] = nullptr;
    j["summary"] = s;
  }
  return j;
}

inline void write_trajectory_json(std::ostream& os, const RunResult& result,
                                  const ModelParams& params, const RunOptions& options) {
  os << trajectory_json(result, params, options).dump(2) << '\n';
}

}  // namespace mqb
