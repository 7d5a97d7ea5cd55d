#include "mqb/runner.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

using namespace mqb;

namespace {

std::vector<TrajectoryRecord> synthetic(const std::vector<double>& energies, double leak = 0.0) {
  std::vector<TrajectoryRecord> recs(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    recs[i].k = static_cast<long>(i + 1);
    recs[i].observables.energy = energies[i];
    recs[i].observables.trace_leak = leak;
    recs[i].n_max_used = 32;
  }
  return recs;
}

// First record index after which the series stays within 1% of its final
// value, in collisions.
long settle_collisions(const std::vector<TrajectoryRecord>& recs,
                       double (*get)(const ObservableSet&)) {
  const double final_v = get(recs.back().observables);
  const double tol = 0.01 * std::abs(final_v);
  long k = recs.front().k;
  for (const auto& r : recs)
    if (std::abs(get(r.observables) - final_v) > tol) k = r.k;
  return k;
}

double get_energy(const ObservableSet& o) { return o.energy; }
double get_purity(const ObservableSet& o) { return o.purity; }

}  // namespace

TEST_CASE("default initial truncation") {
  CHECK(default_initial_n_max(std::numbers::pi / std::sqrt(15.0)) == 32);   // 2m+2
  CHECK(default_initial_n_max(std::numbers::pi / std::sqrt(40.0)) == 82);   // 2m+2
  CHECK(default_initial_n_max(std::numbers::pi / std::sqrt(15.6)) == 64);   // not fine-tuned
  CHECK(default_initial_n_max(1.0) == 64);
}

TEST_CASE("classifier: constant energy converges") {
  const auto recs = synthetic(std::vector<double>(400, 5.0));
  const RunOutcome out = classify_outcome(recs);
  CHECK(out.classification == Classification::converged);
  REQUIRE(out.steady_window.has_value());
  CHECK(out.steady_window->second == 400);
  CHECK(out.steady_window->first == 300);
}

TEST_CASE("classifier: converged requires negligible leak") {
  const auto recs = synthetic(std::vector<double>(400, 5.0), 1e-6);
  CHECK(classify_outcome(recs).classification == Classification::undetermined);
}

TEST_CASE("classifier: linear growth is growing_unbounded") {
  std::vector<double> e(600);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.01 * double(i);
  CHECK(classify_outcome(synthetic(e)).classification == Classification::growing_unbounded);
}

TEST_CASE("classifier: plateau then ramp is metastable_then_growing") {
  std::vector<double> e;
  for (int i = 0; i < 400; ++i) e.push_back(5.0);                       // plateau
  for (int i = 0; i < 400; ++i) e.push_back(5.0 + 0.02 * double(i));    // renewed growth
  CHECK(classify_outcome(synthetic(e)).classification ==
        Classification::metastable_then_growing);
}

TEST_CASE("classifier: still relaxing is undetermined") {
  // Decaying toward a limit from above: neither flat enough nor growing.
  std::vector<double> e;
  for (int i = 0; i < 500; ++i) e.push_back(5.0 + 8.0 * std::exp(-double(i) / 400.0));
  CHECK(classify_outcome(synthetic(e)).classification == Classification::undetermined);
}

TEST_CASE("classifier: insufficient data throws") {
  CHECK_THROWS_AS(classify_outcome(synthetic(std::vector<double>(1, 1.0))), InsufficientData);
  CHECK_THROWS_AS(classify_outcome(synthetic(std::vector<double>(150, 1.0))), InsufficientData);
}

TEST_CASE("trapped incoherent run keeps the leak below 1e-12") {
  ModelParams params;
  params.theta = std::numbers::pi / std::sqrt(15.0);
  params.q = 0.25;
  params.c = 0.0;
  params.n_max = 17;  // m + 2
  params.collisions = 500;
  const RunResult res = run_protocol(params);
  for (const auto& rec : res.records) CHECK(rec.observables.trace_leak < 1e-12);
}

TEST_CASE("coherent fine-tuned and detuned runs converge to high purity") {
  ModelParams params;
  params.q = 0.25;
  params.c = 1.0;
  params.collisions = 500;

  params.theta = std::numbers::pi / std::sqrt(15.0);
  params.n_max = 40;
  const RunResult fine = run_protocol(params);
  CHECK(fine.outcome.classification == Classification::converged);
  CHECK(fine.records.back().observables.purity >= 0.999);

  params.theta = std::numbers::pi / std::sqrt(15.6);
  params.n_max = 64;
  const RunResult detuned = run_protocol(params);
  CHECK(detuned.outcome.classification == Classification::converged);
  CHECK(detuned.records.back().observables.purity >= 0.999);
}

TEST_CASE("energy and purity settle on comparable timescales when coherent") {
  ModelParams params;
  params.theta = std::numbers::pi / std::sqrt(15.0);
  params.q = 0.25;
  params.c = 1.0;
  params.n_max = 40;
  params.collisions = 500;
  const RunResult res = run_protocol(params);
  const long ke = settle_collisions(res.records, get_energy);
  const long kp = settle_collisions(res.records, get_purity);
  CHECK(double(kp) <= 2.0 * double(ke));
  CHECK(double(ke) <= 2.0 * double(kp));
}

TEST_CASE("incoherent purity settles at least twice as slowly as energy") {
  ModelParams params;
  params.theta = std::numbers::pi / std::sqrt(15.0);
  params.q = 0.0;
  params.c = 0.0;
  params.n_max = 32;
  params.collisions = 3000;
  const RunResult res = run_protocol(params);
  const long ke = settle_collisions(res.records, get_energy);
  const long kp = settle_collisions(res.records, get_purity);
  CHECK(double(kp) >= 2.0 * double(ke));
}

TEST_CASE("trajectories are bitwise deterministic") {
  ModelParams params;
  params.theta = 0.83;
  params.q = 0.3;
  params.c = 0.6;
  params.gamma_tr = 0.01;
  params.nbar = 0.1;
  params.n_max = 24;
  params.collisions = 60;
  const RunResult a = run_protocol(params);
  const RunResult b = run_protocol(params);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(std::memcmp(&a.records[i].observables, &b.records[i].observables,
                      sizeof(ObservableSet)) == 0);
  }
  CHECK((a.outcome.final_state.data - b.outcome.final_state.data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonal fast path equals the dense channel path") {
  ModelParams params;
  params.theta = 1.1;
  params.q = 0.3;
  params.c = 0.0;
  params.n_max = 30;
  params.collisions = 50;
  const RunResult fast = run_protocol(params);

  // Same protocol stepped manually through the dense channel.
  DensityMatrix rho = vacuum_state(params.n_max);
  const auto map = jc_collision_map(params.theta, params.n_max);
  const QubitState qubit = build_qubit_state(params.q, 0.0);
  for (int k = 0; k < 50; ++k) rho = apply_collision(map, rho, qubit);
  CHECK(std::abs(fast.records.back().observables.energy - energy(rho)) <= 1e-12);
  CHECK(std::abs(fast.records.back().observables.purity - purity(rho)) <= 1e-12);
}

TEST_CASE("adaptive growth raises the cutoff when population reaches the top") {
  ModelParams params;
  params.theta = 1.0;  // not fine-tuned
  params.q = 0.2;      // strong pumping
  params.c = 0.0;
  params.n_max = 8;
  params.collisions = 300;
  const RunResult res = run_protocol(params);
  CHECK(res.records.back().n_max_used > 8);
  CHECK(res.outcome.final_state.dim() == res.records.back().n_max_used + 1);
}

TEST_CASE("growth cap produces truncation_overflow and stops the run") {
  ModelParams params;
  params.theta = 1.0;
  params.q = 0.2;
  params.c = 0.0;
  params.n_max = 8;
  params.collisions = 5000;
  RunOptions options;
  options.n_max_cap = 16;
  const RunResult res = run_protocol(params, options);
  CHECK(res.outcome.classification == Classification::truncation_overflow);
  CHECK(res.records.back().k < 5000);
  CHECK(res.records.back().n_max_used == 16);
}

TEST_CASE("decimation records every k-th collision plus the final one") {
  ModelParams params;
  params.theta = 0.9;
  params.q = 0.5;
  params.c = 0.0;
  params.n_max = 16;
  params.collisions = 25;
  RunOptions options;
  options.decimate = 10;
  const RunResult res = run_protocol(params, options);
  REQUIRE(res.records.size() == 3);
  CHECK(res.records[0].k == 10);
  CHECK(res.records[1].k == 20);
  CHECK(res.records[2].k == 25);
}

TEST_CASE("zero collisions yield an empty trajectory") {
  ModelParams params;
  params.theta = 0.9;
  params.q = 0.5;
  params.collisions = 0;
  const RunResult res = run_protocol(params);
  CHECK(res.records.empty());
  CHECK(res.outcome.classification == Classification::undetermined);
  CHECK(res.outcome.final_state.data(0, 0).real() == 1.0);  // untouched vacuum
}

TEST_CASE("run_protocol validates inputs") {
  ModelParams params;
  params.theta = -1.0;
  CHECK_THROWS_AS(run_protocol(params), std::invalid_argument);
  params.theta = 1.0;
  RunOptions options;
  options.decimate = 0;
  CHECK_THROWS_AS(run_protocol(params, options), std::invalid_argument);
}
