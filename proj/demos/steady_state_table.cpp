// Compare simulated steady states against the closed forms: the geometric
// distribution for incoherent pumping and the cotangent state for coherent
// pumping, both at the first trapping coupling with m = 15.

#include "mqb/mqb.hpp"

#include <cstdio>

using namespace mqb;

int main() {
  const int m = 15;
  const double q = 0.25;
  const double theta = trapping_theta(1, m);

  ModelParams p;
  p.theta = theta;
  p.q = q;
  p.n_max = 2 * m + 2;
  p.collisions = 4000;
  const RunResult inc = run_protocol(p);

  p.c = 1.0;
  p.collisions = 500;
  const RunResult coh = run_protocol(p);

  const Eigen::VectorXd geo = incoherent_steady_state(q, m);
  const Eigen::VectorXd cot = cotangent_state(q, m, p.n_max);
  const Eigen::VectorXd pop_inc = population_distribution(inc.outcome.final_state);
  const Eigen::VectorXd pop_coh = population_distribution(coh.outcome.final_state);

  std::printf("n   geometric     simulated     cotangent     simulated\n");
  for (int n = 0; n < m; ++n)
    std::printf("%-3d %.6e  %.6e  %.6e  %.6e\n", n, geo[n], pop_inc[n], cot[n], pop_coh[n]);

  double err_inc = 0.0, err_coh = 0.0;
  for (int n = 0; n < m; ++n) {
    err_inc = std::max(err_inc, std::abs(geo[n] - pop_inc[n]));
    err_coh = std::max(err_coh, std::abs(cot[n] - pop_coh[n]));
  }
  std::printf("\nmax deviation: incoherent %.2e, coherent %.2e\n", err_inc, err_coh);
  std::printf("closed-form steady purity %.12f, approx %.6f, simulated %.12f\n",
              incoherent_steady_purity_closed(q, m), incoherent_steady_purity_approx(q),
              inc.records.back().observables.purity);
  return 0;
}
