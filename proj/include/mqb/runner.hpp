#pragma once

// Charging-protocol orchestration: repeated collision + damping steps from
// vacuum, per-collision observable recording, adaptive truncation growth,
// and plateau/divergence classification of the resulting trajectory.

#include "mqb/analytics.hpp"
#include "mqb/collision.hpp"
#include "mqb/dissipation.hpp"
#include "mqb/observables.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mqb {

enum class Classification {
  converged,                // trailing energy drift below plateau_epsilon, leak negligible
  metastable_then_growing,  // a near-flat stretch preceded renewed growth
  growing_unbounded,        // monotone growth through the end of the run
  truncation_overflow,      // adaptive growth hit its cap: the "burning" regime
  undetermined,             // none of the above (e.g. still relaxing when the run ended)
};

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::converged: return "converged";
    case Classification::metastable_then_growing: return "metastable_then_growing";
    case Classification::growing_unbounded: return "growing_unbounded";
    case Classification::truncation_overflow: return "truncation_overflow";
    case Classification::undetermined: return "undetermined";
  }
  return "unknown";
}

struct RunOptions {
  // Classifier thresholds (engineering choices; echoed in output metadata).
  double plateau_epsilon = 1e-8;      // relative energy drift per window for "converged"
  int plateau_window = 100;           // collisions per classifier window
  int smoothing_collisions = 50;      // moving-average width before slope tests
  int growth_windows = 3;             // trailing windows that must rise monotonically
  double metastable_slope_ratio = 0.5;  // plateau slope vs. later growth slope

  // Truncation management.
  double leak_threshold = 1e-10;  // top-level population that triggers growth
  int n_max_cap = 1024;
  double growth_factor = 1.5;

  // Numerics.
  double stiffness_bound = 100.0;
  int rehermitize_every = 64;

  // Recording.
  int decimate = 1;  // record every decimate-th collision (the final one always)
};

struct TrajectoryRecord {
  long k = 0;
  ObservableSet observables;
  int n_max_used = 0;
};

struct RunOutcome {
  Classification classification = Classification::undetermined;
  std::optional<std::pair<long, long>> steady_window;
  DensityMatrix final_state;
};

struct RunResult {
  std::vector<TrajectoryRecord> records;
  RunOutcome outcome;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial truncation heuristic: trapped dynamics needs little headroom over
// the sealed level, anything else gets room to exhibit growth before the
// overflow verdict.
inline int default_initial_n_max(double theta) {
  const auto trap = trapping_condition(theta);
  if (trap && trap->Q == 1) return std::max(2 * trap->m + 2, 32);
  return 64;
}

namespace detail {

inline std::vector<double> smooth_energies(const std::vector<TrajectoryRecord>& records,
                                           int smooth_records) {
  std::vector<double> out(records.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    acc += records[i].observables.energy;
    if (i >= static_cast<std::size_t>(smooth_records))
      acc -= records[i - smooth_records].observables.energy;
    const double denom = std::min<std::size_t>(i + 1, smooth_records);
    out[i] = acc / double(denom);
  }
  return out;
}

}  // namespace detail

// Post-hoc trajectory classification.
//   converged:  trailing-window relative energy drift < plateau_epsilon and
//               cumulative leak below leak_threshold.
//   growing:    smoothed energy rises monotonically across the trailing
//               growth_windows windows; upgraded to metastable_then_growing
//               when some earlier window was nearly flat compared to the
//               growth that followed it.
// The returned outcome carries no final state; run_protocol fills that in.
inline RunOutcome classify_outcome(const std::vector<TrajectoryRecord>& records,
                                   const RunOptions& options = {}) {
  RunOutcome outcome;
  if (records.size() < 2) throw InsufficientData("classify_outcome: need at least two records");
  const long spacing = records[1].k - records[0].k;
  if (spacing <= 0) throw InsufficientData("classify_outcome: record indices must increase");
  const int w_rec = std::max<int>(2, static_cast<int>(options.plateau_window / spacing));
  if (records.size() < static_cast<std::size_t>(2 * w_rec))
    throw InsufficientData("classify_outcome: need at least two windows of records");
  const int s_rec = std::max<int>(1, static_cast<int>(options.smoothing_collisions / spacing));
  const std::vector<double> sm = detail::smooth_energies(records, s_rec);
  const std::size_t last = sm.size() - 1;

  const double drift = std::abs(sm[last] - sm[last - w_rec]);
  const double scale = std::max(std::abs(sm[last]), 1e-12);
  const double leak = records.back().observables.trace_leak;
  if (drift / scale < options.plateau_epsilon && leak <= options.leak_threshold) {
    outcome.classification = Classification::converged;
    outcome.steady_window = std::make_pair(records[last - w_rec].k, records[last].k);
    return outcome;
  }

  const std::size_t growth_span = static_cast<std::size_t>(options.growth_windows) * w_rec;
  bool growing = sm.size() > growth_span;
  if (growing) {
    for (std::size_t i = last - growth_span; i < last && growing; ++i)
      growing = sm[i + 1] >= sm[i];
    growing = growing && sm[last] > sm[last - growth_span];
  }
  if (!growing) return outcome;  // undetermined

  // Window slopes from the most recent boundary backward.
  std::vector<double> slopes;
  for (std::size_t end = last; end >= static_cast<std::size_t>(w_rec);
       end -= static_cast<std::size_t>(w_rec)) {
    slopes.push_back(sm[end] - sm[end - w_rec]);
    if (end < static_cast<std::size_t>(2 * w_rec)) break;
  }
  // slopes[0] is the latest window. A plateau is an early window whose slope
  // magnitude is small next to the fastest growth that came after it.
  bool plateau_before_growth = false;
  double max_later = 0.0;
  for (std::size_t t = 0; t < slopes.size(); ++t) {
    if (t >= static_cast<std::size_t>(options.growth_windows) && max_later > 0.0 &&
        std::abs(slopes[t]) <= options.metastable_slope_ratio * max_later) {
      plateau_before_growth = true;
      break;
    }
    max_later = std::max(max_later, slopes[t]);
  }
  outcome.classification = plateau_before_growth ? Classification::metastable_then_growing
                                                 : Classification::growing_unbounded;
  return outcome;
}

namespace detail {

// Mutable state of one run; either the diagonal fast path (populations only,
// exact for c = 0 since the channel then never creates coherences) or the
// full density matrix.
struct RunState {
  bool diagonal = false;
  Eigen::VectorXd p;
  DensityMatrix rho;
  int n_max = 0;

  double top_population() const {
    return diagonal ? p[n_max] : rho.data(n_max, n_max).real();
  }
  double trace() const { return diagonal ? p.sum() : rho.data.trace().real(); }
  void grow(int new_n_max) {
    if (diagonal) {
      Eigen::VectorXd np = Eigen::VectorXd::Zero(new_n_max + 1);
      np.head(n_max + 1) = p;
      p = std::move(np);
    } else {
      rho = resize(rho, new_n_max);
    }
    n_max = new_n_max;
  }
  DensityMatrix materialize() const {
    if (!diagonal) return rho;
    DensityMatrix out;
    out.data = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) out.data(n, n) = p[n];
    return out;
  }
};

}  // namespace detail

// Run the charging protocol: starting from vacuum, alternate one collision
// with one inter-collision damping interval, for params.collisions steps or
// until the truncation cap overflows. Deterministic: identical inputs give
// bitwise-identical trajectories.
inline RunResult run_protocol(const ModelParams& params, const RunOptions& options = {}) {
  validate_params(params);
  if (options.decimate < 1) throw std::invalid_argument("run_protocol: decimate must be at least 1");

  RunResult result;
  detail::RunState st;
  st.diagonal = params.c == 0.0;
  st.n_max = params.n_max;
  if (st.diagonal) {
    st.p = Eigen::VectorXd::Zero(st.n_max + 1);
    st.p[0] = 1.0;
  } else {
    st.rho = vacuum_state(st.n_max);
  }
  const QubitState qubit = build_qubit_state(params.q, params.c);
  CollisionMap map;
  if (!st.diagonal) map = jc_collision_map(params.theta, st.n_max);
  LindbladBands bands;
  const bool damped = params.gamma_tr > 0.0;
  if (damped) bands = build_lindblad_bands(params.gamma_tr, params.nbar, st.n_max);

  double leak = 0.0;
  bool overflowed = false;
  const long expected = params.collisions / options.decimate + 2;
  result.records.reserve(static_cast<std::size_t>(std::min<long>(expected, 1 << 20)));

  for (long k = 1; k <= params.collisions; ++k) {
    if (st.diagonal) {
      st.p = apply_collision_diagonal(params.theta, params.q, st.p);
      if (damped) st.p = apply_damping(bands, st.p, 1.0, options.stiffness_bound);
    } else {
      st.rho = apply_collision(map, st.rho, qubit);
      if (damped) st.rho = apply_damping(bands, st.rho, 1.0, options.stiffness_bound);
      if (options.rehermitize_every > 0 && k % options.rehermitize_every == 0)
        st.rho.data = 0.5 * (st.rho.data + st.rho.data.adjoint()).eval();
    }
    leak = std::max(leak, 1.0 - st.trace());

    // Cheap mid-run sanity checks, on the rehermitization cadence.
    if (options.rehermitize_every > 0 && k % options.rehermitize_every == 0) {
      const double tr = st.trace();
      bool bad = !(tr > -1e-9 && tr < 1.0 + 1e-6);
      if (st.diagonal) bad = bad || st.p.minCoeff() < -1e-9;
      if (bad)
        throw std::runtime_error("run_protocol: state failed validity checks at collision " +
                                 std::to_string(k));
    }

    if (st.top_population() > options.leak_threshold) {
      if (st.n_max >= options.n_max_cap) {
        overflowed = true;
        result.records.push_back(
            {k,
             st.diagonal ? observe_diagonal(st.p, leak) : observe(st.rho, leak),
             st.n_max});
        break;
      }
      const int grown = std::max(st.n_max + 1,
                                 static_cast<int>(std::ceil(st.n_max * options.growth_factor)));
      st.grow(std::min(grown, options.n_max_cap));
      if (!st.diagonal) map = jc_collision_map(params.theta, st.n_max);
      if (damped) bands = build_lindblad_bands(params.gamma_tr, params.nbar, st.n_max);
    }

    if (k % options.decimate == 0 || k == params.collisions)
      result.records.push_back(
          {k, st.diagonal ? observe_diagonal(st.p, leak) : observe(st.rho, leak), st.n_max});
  }

  if (overflowed) {
    result.outcome.classification = Classification::truncation_overflow;
  } else {
    try {
      result.outcome = classify_outcome(result.records, options);
    } catch (const InsufficientData&) {
      result.outcome.classification = Classification::undetermined;
    }
  }
  result.outcome.final_state = st.materialize();
  return result;
}

}  // namespace mqb
