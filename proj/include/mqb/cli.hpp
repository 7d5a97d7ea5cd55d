#pragma once

// Command-line front end: `run` simulates one charging trajectory, `figure`
// regenerates a named multi-series dataset, `verify` executes the built-in
// consistency suites. Kept header-only like the rest of the library; the
// binary is a two-line main.
//
// Exit codes: 0 success, 2 configuration error, 3 simulation failure,
// 4 verification failure.

#include "mqb/io.hpp"
#include "mqb/runner.hpp"
#include "mqb/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace mqb {

// Raw option values as given on the command line; unset fields fall back to
// the config file (if any) and then to defaults.
struct OptionSet {
  std::optional<double> theta;
  std::optional<double> theta_m;
  std::optional<int> theta_q;
  std::optional<double> q;
  std::optional<double> c;
  std::optional<double> gamma_tr;
  std::optional<double> nbar;
  std::optional<long> collisions;
  std::optional<int> nmax;
  std::optional<int> decimate;
  std::optional<std::string> format;
  std::optional<std::string> out;
};

struct ResolvedRun {
  ModelParams params;
  RunOptions options;
  std::string format = "csv";
  std::string out = "-";
};

namespace detail {

template <typename T>
T pick(const std::optional<T>& flag, const nlohmann::json* cfg, const char* key, T fallback) {
  if (flag) return *flag;
  if (cfg && cfg->contains(key)) return cfg->at(key).get<T>();
  return fallback;
}

template <typename T>
std::optional<T> pick_opt(const std::optional<T>& flag, const nlohmann::json* cfg,
                          const char* key) {
  if (flag) return flag;
  if (cfg && cfg->contains(key)) return cfg->at(key).get<T>();
  return std::nullopt;
}

}  // namespace detail

inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file " + path + ": expected an object");
  return j;
}

// Merge flags over config-file values over defaults and validate the result.
inline ResolvedRun resolve_run(const OptionSet& flags, const nlohmann::json* cfg) {
  ResolvedRun rr;
  const auto theta = detail::pick_opt(flags.theta, cfg, "theta");
  const auto theta_m = detail::pick_opt(flags.theta_m, cfg, "theta_m");
  if (theta && theta_m)
    throw std::invalid_argument("give either theta or theta_m, not both");
  if (!theta && !theta_m)
    throw std::invalid_argument("one of theta or theta_m is required");
  if (theta) {
    rr.params.theta = *theta;
  } else {
    if (!(*theta_m > 0.0)) throw std::invalid_argument("theta_m must be positive");
    const int Q = detail::pick(flags.theta_q, cfg, "theta_q", 1);
    if (Q < 1) throw std::invalid_argument("theta_q must be a positive integer");
    rr.params.theta = Q * std::numbers::pi / std::sqrt(*theta_m);
  }
  rr.params.q = detail::pick(flags.q, cfg, "q", 1.0);
  rr.params.c = detail::pick(flags.c, cfg, "c", 0.0);
  rr.params.gamma_tr = detail::pick(flags.gamma_tr, cfg, "gamma_tr", 0.0);
  rr.params.nbar = detail::pick(flags.nbar, cfg, "nbar", 0.0);
  rr.params.collisions = detail::pick(flags.collisions, cfg, "collisions", 1000L);
  rr.params.n_max =
      detail::pick(flags.nmax, cfg, "nmax", default_initial_n_max(rr.params.theta));
  rr.options.decimate = detail::pick(flags.decimate, cfg, "decimate", 1);
  if (rr.options.decimate < 1) throw std::invalid_argument("decimate must be at least 1");
  rr.format = detail::pick(flags.format, cfg, "format", std::string("csv"));
  if (rr.format != "csv" && rr.format != "json")
    throw std::invalid_argument("format must be csv or json");
  rr.out = detail::pick(flags.out, cfg, "out", std::string("-"));
  validate_params(rr.params);
  return rr;
}

namespace detail {

inline void write_result(const std::string& out, const std::string& format,
                         const RunResult& result, const ModelParams& params,
                         const RunOptions& options) {
  const auto emit = [&](std::ostream& os) {
    if (format == "json")
      write_trajectory_json(os, result, params, options);
    else
      write_trajectory_csv(os, result, params, options);
  };
  if (out == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + out);
  emit(os);
  if (!os.flush()) throw std::runtime_error("failed writing output file: " + out);
}

}  // namespace detail

inline int cmd_run(const ResolvedRun& rr) {
  const RunResult result = run_protocol(rr.params, rr.options);
  detail::write_result(rr.out, rr.format, result, rr.params, rr.options);
  return result.outcome.classification == Classification::truncation_overflow ? 3 : 0;
}

// ----- figure datasets -------------------------------------------------------

struct FigureSeries {
  std::string label;
  ModelParams params;
};

struct FigureSpec {
  int id = 0;
  std::string title;
  std::string column;  // the observable the figure plots
  std::vector<FigureSeries> series;
};

// Named datasets behind the figures in the accompanying study: incoherent
// charging at fine-tuned vs detuned coupling, coherent charging, and lossy
// charging at two damping strengths. Every series file carries all observable
// columns, so one dataset can be replotted against any of them.
inline FigureSpec figure_spec(int id, long collisions_override = -1) {
  const double th15 = trapping_theta(1, 15);
  const double th156 = std::numbers::pi / std::sqrt(15.6);
  const auto base = [&](double theta, double q, double c, double gt, double nbar,
                        long collisions) {
    ModelParams p;
    p.theta = theta;
    p.q = q;
    p.c = c;
    p.gamma_tr = gt;
    p.nbar = nbar;
    p.collisions = collisions_override >= 0 ? collisions_override : collisions;
    p.n_max = default_initial_n_max(theta);
    return p;
  };

  FigureSpec f;
  f.id = id;
  switch (id) {
    case 1:
      f.title = "incoherent charging energy, fine-tuned vs detuned coupling";
      f.column = "energy";
      f.series = {{"blue", base(th15, 0.25, 0.0, 0.0, 0.0, 5000)},
                  {"red", base(th156, 0.25, 0.0, 0.0, 0.0, 5000)},
                  {"green", base(th15, 0.0, 0.0, 0.0, 0.0, 5000)},
                  {"cyan", base(th156, 0.0, 0.0, 0.0, 0.0, 5000)}};
      break;
    case 2:
      f.title = "incoherent charging purity at fine-tuned coupling";
      f.column = "purity";
      f.series = {{"blue", base(th15, 0.25, 0.0, 0.0, 0.0, 3000)},
                  {"green", base(th15, 0.0, 0.0, 0.0, 0.0, 3000)}};
      break;
    case 3:
      f.title = "coherent charging energy, fine-tuned vs detuned coupling";
      f.column = "energy";
      f.series = {{"blue", base(th15, 0.25, 1.0, 0.0, 0.0, 500)},
                  {"green", base(th156, 0.25, 1.0, 0.0, 0.0, 500)}};
      break;
    case 4:
      f.title = "lossy coherent charging energy at two damping strengths";
      f.column = "energy";
      break;
    case 5:
      f.title = "lossy coherent charging purity at two damping strengths";
      f.column = "purity";
      break;
    case 6:
      f.title = "Fano factor of the lossy coherent protocol";
      f.column = "fano";
      break;
    default:
      throw std::invalid_argument("figure id must be between 1 and 6");
  }
  if (id >= 4) {
    f.series = {{"blue", base(th15, 0.25, 1.0, 0.1, 0.15, 3000)},
                {"green", base(th156, 0.25, 1.0, 0.1, 0.15, 3000)},
                {"red", base(th15, 0.25, 1.0, 0.001, 0.15, 3000)},
                {"cyan", base(th156, 0.25, 1.0, 0.001, 0.15, 3000)}};
  }
  return f;
}

inline int cmd_figure(int id, const std::string& out_dir, int jobs,
                      long collisions_override) {
  const FigureSpec spec = figure_spec(id, collisions_override);
  std::filesystem::create_directories(out_dir);

  std::vector<RunResult> results(spec.series.size());
  std::vector<std::exception_ptr> errors(spec.series.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.series.size()) return;
      try {
        results[i] = run_protocol(spec.series[i].params);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(spec.series.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  nlohmann::json manifest;
  manifest["figure"] = spec.id;
  manifest["title"] = spec.title;
  manifest["column"] = spec.column;
  manifest["series"] = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    const std::string file = "fig" + std::to_string(spec.id) + "_" + s.label + ".csv";
    detail::write_result((std::filesystem::path(out_dir) / file).string(), "csv", results[i],
                         s.params, RunOptions{});
    manifest["series"].push_back({{"label", s.label},
                                  {"file", file},
                                  {"theta", s.params.theta},
                                  {"q", s.params.q},
                                  {"c", s.params.c},
                                  {"gamma_tr", s.params.gamma_tr},
                                  {"nbar", s.params.nbar},
                                  {"collisions", s.params.collisions}});
  }
  const auto manifest_path =
      std::filesystem::path(out_dir) / ("fig" + std::to_string(spec.id) + ".json");
  std::ofstream os(manifest_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + manifest_path.string());
  os << manifest.dump(2) << '\n';
  return 0;
}

// ----- verification ----------------------------------------------------------

inline int cmd_verify(const std::vector<std::string>& suites, std::ostream& os) {
  bool all_pass = true;
  for (const auto& suite : suites) {
    const auto checks = verify_suite(suite);
    for (const auto& c : checks) {
      os << (c.pass ? "ok   " : "FAIL ") << suite << '/' << c.name
         << " residual=" << format_double(c.residual) << " bound=" << format_double(c.bound)
         << '\n';
      all_pass = all_pass && c.pass;
    }
  }
  os << (all_pass ? "all checks passed" : "some checks FAILED") << '\n';
  return all_pass ? 0 : 4;
}

// ----- argument parsing ------------------------------------------------------

inline int run_main(int argc, const char* const* argv) {
  CLI::App app{"micromaser quantum battery: collision-model charging simulator"};
  app.require_subcommand(1);

  OptionSet flags;
  std::string config_path;

  auto* run = app.add_subcommand("run", "simulate one charging trajectory");
  run->add_option("--theta", flags.theta, "qubit-cavity coupling angle");
  run->add_option("--theta-m", flags.theta_m,
                  "set theta = Q*pi/sqrt(M) for trapping level M (may be fractional)");
  run->add_option("--theta-q", flags.theta_q, "multiplicity Q for --theta-m (default 1)");
  run->add_option("--q", flags.q, "qubit ground-state probability");
  run->add_option("--c", flags.c, "qubit coherence magnitude, 0..1");
  run->add_option("--gamma-tr", flags.gamma_tr, "cavity damping accumulated between collisions");
  run->add_option("--nbar", flags.nbar, "thermal occupation of the environment");
  run->add_option("--collisions", flags.collisions, "number of collisions (default 1000)");
  run->add_option("--nmax", flags.nmax, "initial Fock-space cutoff (default: auto)");
  run->add_option("--decimate", flags.decimate, "record every k-th collision (default 1)");
  run->add_option("--format", flags.format, "output format: csv or json (default csv)");
  run->add_option("--out", flags.out, "output path, - for stdout (default -)");
  run->add_option("--config", config_path, "JSON config file; flags take precedence");

  int fig_id = 0;
  std::string out_dir = ".";
  int jobs = 1;
  long fig_collisions = -1;
  auto* figure = app.add_subcommand("figure", "regenerate a study dataset");
  figure->add_option("id", fig_id, "figure number")->required()->check(CLI::Range(1, 6));
  figure->add_option("--out-dir", out_dir, "directory for series files and manifest");
  figure->add_option("--jobs", jobs, "series computed in parallel (default 1)")
      ->check(CLI::PositiveNumber);
  figure->add_option("--collisions", fig_collisions, "override the per-figure collision count");

  std::vector<std::string> suites;
  auto* verify = app.add_subcommand("verify", "run built-in consistency suites");
  verify->add_option("--suite", suites, "suite to run (repeatable; default all)")
      ->check(CLI::IsMember({"oracles", "invariants", "steady_states"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      const nlohmann::json cfg =
          config_path.empty() ? nlohmann::json() : load_config_file(config_path);
      return cmd_run(resolve_run(flags, config_path.empty() ? nullptr : &cfg));
    }
    if (figure->parsed()) return cmd_figure(fig_id, out_dir, jobs, fig_collisions);
    if (suites.empty()) suites = {"oracles", "invariants", "steady_states"};
    return cmd_verify(suites, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace mqb
