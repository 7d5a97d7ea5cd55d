#pragma once

// Truncated Fock-space field states and two-level qubit states, with the
// validity diagnostics used throughout the simulator. Basis conventions:
// qubit ordered as (|g>, |e>), field indexed by photon number ascending.
// Units: hbar = 1 and the field frequency set to 1, so energies are photon
// numbers measured from the ground state.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace mqb {

using Complex = std::complex<double>;

// Field density matrix on the truncated space {|0>, ..., |n_max>}.
// Expected to stay Hermitian, unit-trace and positive semidefinite up to
// the tolerances reported by validate(); operations never mutate inputs.
struct DensityMatrix {
  Eigen::MatrixXcd data;

  int dim() const { return static_cast<int>(data.rows()); }
  int n_max() const { return dim() - 1; }
};

// Qubit state diag-plus-coherence parameterization: q is the ground-state
// weight, c in [0,1] scales the real off-diagonal coherence.
struct QubitState {
  double q = 1.0;
  double c = 0.0;
  Eigen::Matrix2cd data;
};

struct ValidityReport {
  double trace_deviation = 0.0;       // |Tr rho - 1|
  double hermiticity_violation = 0.0; // max |rho - rho^dagger| elementwise
  double min_eigenvalue = 0.0;
  double top_level_population = 0.0;  // truncation-leak proxy
  bool ok = false;
};

// Full model parameterization of one charging run.
//   theta:      collision angle (interaction strength times duration)
//   q, c:       qubit ground weight and coherence degree
//   gamma_tr:   cavity damping accumulated between two collisions
//   nbar:       thermal occupation of the cavity environment
//   n_max:      initial Fock-space truncation level
//   collisions: number of qubit collisions to simulate
struct ModelParams {
  double theta = 1.0;
  double q = 1.0;
  double c = 0.0;
  double gamma_tr = 0.0;
  double nbar = 0.0;
  int n_max = 64;
  long collisions = 1000;
};

inline void validate_params(const ModelParams& p) {
  if (!(p.theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(p.q >= 0.0 && p.q <= 1.0)) throw std::invalid_argument("q must lie in [0,1]");
  if (!(p.c >= 0.0 && p.c <= 1.0)) throw std::invalid_argument("c must lie in [0,1]");
  if (!(p.gamma_tr >= 0.0)) throw std::invalid_argument("gamma_tr must be nonnegative");
  if (!(p.nbar >= 0.0)) throw std::invalid_argument("nbar must be nonnegative");
  if (p.n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (p.collisions < 0) throw std::invalid_argument("collisions must be nonnegative");
}

inline DensityMatrix vacuum_state(int n_max) {
  if (n_max < 1) throw std::invalid_argument("vacuum_state: n_max must be at least 1");
  DensityMatrix rho;
  rho.data = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  rho.data(0, 0) = 1.0;
  return rho;
}

inline QubitState build_qubit_state(double q, double c) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("build_qubit_state: q must lie in [0,1]");
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("build_qubit_state: c must lie in [0,1]");
  QubitState s;
  s.q = q;
  s.c = c;
  const double w = c * std::sqrt(q * (1.0 - q));
  s.data << q, w, w, 1.0 - q;
  return s;
}

inline ValidityReport validate(const DensityMatrix& rho, double tol = 1e-9) {
  ValidityReport r;
  r.trace_deviation = std::abs(rho.data.trace() - Complex(1.0, 0.0));
  r.hermiticity_violation = (rho.data - rho.data.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (rho.data + rho.data.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("validate: eigensolver failed");
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.top_level_population = rho.data(rho.n_max(), rho.n_max()).real();
  r.ok = r.trace_deviation <= tol && r.hermiticity_violation <= tol &&
         r.min_eigenvalue >= -tol;
  return r;
}

// Grow by zero-padding or shrink by discarding high levels. A shrink that
// would discard more than discard_bound of probability weight is an error,
// otherwise the discarded weight is renormalized away and reported.
inline DensityMatrix resize(const DensityMatrix& rho, int new_n_max,
                            double* discarded_weight = nullptr,
                            double discard_bound = 1e-9) {
  if (new_n_max < 1) throw std::invalid_argument("resize: new_n_max must be at least 1");
  const int old_dim = rho.dim();
  const int new_dim = new_n_max + 1;
  DensityMatrix out;
  out.data = Eigen::MatrixXcd::Zero(new_dim, new_dim);
  if (new_dim >= old_dim) {
    out.data.topLeftCorner(old_dim, old_dim) = rho.data;
    if (discarded_weight) *discarded_weight = 0.0;
    return out;
  }
  double dropped = 0.0;
  for (int n = new_dim; n < old_dim; ++n) dropped += rho.data(n, n).real();
  if (dropped > discard_bound)
    throw std::invalid_argument("resize: shrink would discard weight " +
                                std::to_string(dropped) + " above bound");
  out.data = rho.data.topLeftCorner(new_dim, new_dim);
  const double kept = out.data.trace().real();
  if (kept > 0.0) out.data /= kept;
  if (discarded_weight) *discarded_weight = dropped;
  return out;
}

}  // namespace mqb
