// Charge one battery three ways and print the energy/purity curves side by
// side: incoherent qubits, coherent qubits, and coherent qubits with cavity
// loss. Output is CSV on stdout, ready for any plotting tool.

#include "mqb/mqb.hpp"

#include <cstdio>
#include <numbers>

using namespace mqb;

int main() {
  const long collisions = 600;
  const double theta = trapping_theta(1, 15);

  ModelParams inc;
  inc.theta = theta;
  inc.q = 0.25;
  inc.n_max = 32;
  inc.collisions = collisions;

  ModelParams coh = inc;
  coh.c = 1.0;

  ModelParams lossy = coh;
  lossy.gamma_tr = 0.01;
  lossy.nbar = 0.15;

  const RunResult r_inc = run_protocol(inc);
  const RunResult r_coh = run_protocol(coh);
  const RunResult r_lossy = run_protocol(lossy);

  std::printf("k,E_incoherent,P_incoherent,E_coherent,P_coherent,E_lossy,P_lossy\n");
  for (size_t i = 0; i < r_inc.records.size(); ++i) {
    const auto& a = r_inc.records[i].observables;
    const auto& b = r_coh.records[i].observables;
    const auto& c = r_lossy.records[i].observables;
    std::printf("%ld,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r_inc.records[i].k, a.energy,
                a.purity, b.energy, b.purity, c.energy, c.purity);
  }

  std::fprintf(stderr, "incoherent: %s, coherent: %s, lossy: %s\n",
               to_string(r_inc.outcome.classification),
               to_string(r_coh.outcome.classification),
               to_string(r_lossy.outcome.classification));
  return 0;
}
