#pragma once

// Scalar diagnostics of the battery state. Energies are photon numbers
// (frequency set to 1, measured from the ground state).

#include "mqb/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mqb {

struct ObservableSet {
  double energy = 0.0;
  double purity = 0.0;
  double fano = 0.0;  // NaN when the mean photon number vanishes
  double ergotropy = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double trace_leak = 0.0;
};

inline Eigen::VectorXd population_distribution(const DensityMatrix& rho) {
  return rho.data.diagonal().real();
}

inline double energy(const DensityMatrix& rho) {
  double e = 0.0;
  for (int n = 0; n < rho.dim(); ++n) e += n * rho.data(n, n).real();
  return e;
}

inline double purity(const DensityMatrix& rho) {
  return rho.data.cwiseAbs2().sum();
}

inline double variance(const DensityMatrix& rho) {
  double m1 = 0.0, m2 = 0.0;
  for (int n = 0; n < rho.dim(); ++n) {
    const double p = rho.data(n, n).real();
    m1 += n * p;
    m2 += double(n) * n * p;
  }
  return m2 - m1 * m1;
}

// Variance-to-mean ratio of the photon number. Undefined at zero mean:
// that is an error rather than a silent 0/0.
inline double fano(const DensityMatrix& rho) {
  const double mean = energy(rho);
  if (!(mean > 0.0)) throw std::domain_error("fano: undefined at zero mean photon number");
  return variance(rho) / mean;
}

namespace detail {

// Maximal unitarily extractable work given the spectrum: the passive state
// pairs eigenvalues sorted descending with energies 0,1,2,... ascending.
inline double ergotropy_from_eigenvalues(std::vector<double> evals, double e_active) {
  std::sort(evals.begin(), evals.end(), std::greater<double>());
  double e_passive = 0.0;
  for (std::size_t n = 0; n < evals.size(); ++n) e_passive += double(n) * evals[n];
  const double w = e_active - e_passive;
  return w > 0.0 ? w : 0.0;  // clip eigensolver roundoff
}

}  // namespace detail

inline double ergotropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (rho.data + rho.data.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("ergotropy: eigensolver failed");
  std::vector<double> evals(es.eigenvalues().data(),
                            es.eigenvalues().data() + es.eigenvalues().size());
  return detail::ergotropy_from_eigenvalues(std::move(evals), energy(rho));
}

// All scalar diagnostics in one pass; fano is NaN (not an error) at zero
// mean so trajectory records stay total. trace_leak is supplied by the
// caller, who tracks it cumulatively across the run.
inline ObservableSet observe(const DensityMatrix& rho, double trace_leak) {
  ObservableSet o;
  o.energy = energy(rho);
  o.mean = o.energy;
  o.purity = purity(rho);
  o.variance = variance(rho);
  o.fano = o.mean > 1e-14 ? o.variance / o.mean : std::nan("");
  o.ergotropy = ergotropy(rho);
  o.trace_leak = trace_leak;
  return o;
}

// Diagonal-state fast path: eigenvalues are the populations themselves.
inline ObservableSet observe_diagonal(const Eigen::VectorXd& populations, double trace_leak) {
  ObservableSet o;
  double m1 = 0.0, m2 = 0.0, p2 = 0.0;
  for (int n = 0; n < populations.size(); ++n) {
    const double p = populations[n];
    m1 += n * p;
    m2 += double(n) * n * p;
    p2 += p * p;
  }
  o.energy = m1;
  o.mean = m1;
  o.purity = p2;
  o.variance = m2 - m1 * m1;
  o.fano = m1 > 1e-14 ? o.variance / m1 : std::nan("");
  std::vector<double> evals(populations.data(), populations.data() + populations.size());
  o.ergotropy = detail::ergotropy_from_eigenvalues(std::move(evals), m1);
  o.trace_leak = trace_leak;
  return o;
}

}  // namespace mqb
