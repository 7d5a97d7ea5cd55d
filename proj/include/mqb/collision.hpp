#pragma once

// Jaynes-Cummings collision channel on the truncated field space.
//
// The joint unitary for one collision acts on qubit (x) field as
//   U|g,n> = cos(theta sqrt(n))   |g,n> - i sin(theta sqrt(n))   |e,n-1>
//   U|e,n> = cos(theta sqrt(n+1)) |e,n> - i sin(theta sqrt(n+1)) |g,n+1>
// so in the ordered qubit basis (|g>,|e>) it decomposes into four field-space
// blocks K_ji with U(|i> (x) |psi>) = sum_j |j> (x) K_ji|psi>. All four are
// diagonal or one off the diagonal, which keeps one collision at O(dim^2).
// Amplitudes that would populate the level above n_max are dropped; the lost
// weight shows up as a trace deficit monitored by the caller.

#include "mqb/hilbert.hpp"

#include <array>
#include <cmath>

namespace mqb {

// Banded storage of the four blocks. Only the magnitudes are kept; the -i
// phases on the off-diagonal blocks are restored where they matter.
//   kgg[n] = cos(theta sqrt(n))        K_gg |n> ->  kgg[n] |n>
//   kee[n] = cos(theta sqrt(n+1))      K_ee |n> ->  kee[n] |n>
//   keg[n] = sin(theta sqrt(n))        K_eg |n> -> -i keg[n] |n-1>
//   kge[n] = sin(theta sqrt(n+1))      K_ge |n> -> -i kge[n] |n+1>  (top row dropped)
struct CollisionMap {
  double theta = 0.0;
  int n_max = 0;
  Eigen::VectorXd kgg, kge, keg, kee;

  int dim() const { return n_max + 1; }
};

inline CollisionMap jc_collision_map(double theta, int n_max) {
  if (!(theta > 0.0)) throw std::invalid_argument("jc_collision_map: theta must be positive");
  if (n_max < 1) throw std::invalid_argument("jc_collision_map: n_max must be at least 1");
  CollisionMap m;
  m.theta = theta;
  m.n_max = n_max;
  const int dim = n_max + 1;
  m.kgg.resize(dim);
  m.kge.resize(dim);
  m.keg.resize(dim);
  m.kee.resize(dim);
  for (int n = 0; n < dim; ++n) {
    m.kgg[n] = std::cos(theta * std::sqrt(double(n)));
    m.kee[n] = std::cos(theta * std::sqrt(double(n + 1)));
    m.keg[n] = std::sin(theta * std::sqrt(double(n)));
    m.kge[n] = std::sin(theta * std::sqrt(double(n + 1)));
  }
  return m;
}

// One collision: rho' = Tr_q[ U (rho_b (x) rho_q) U^dagger ]
//              = sum_{j,a,b} (rho_q)_{ab} K_ja rho_b K_jb^dagger.
// Trace-, Hermiticity- and positivity-preserving up to truncation leak.
inline DensityMatrix apply_collision(const CollisionMap& map, const DensityMatrix& rho_b,
                                     const QubitState& rho_q) {
  const int dim = rho_b.dim();
  if (dim != map.dim())
    throw std::invalid_argument("apply_collision: state and map dimensions differ");
  const double q = rho_q.data(0, 0).real();
  const double w = rho_q.data(0, 1).real();  // c sqrt(q(1-q)), real by construction
  const double e = rho_q.data(1, 1).real();

  const Eigen::MatrixXcd& r = rho_b.data;
  DensityMatrix out;
  out.data.resize(dim, dim);
  const Complex I(0.0, 1.0);
  for (int mcol = 0; mcol < dim; ++mcol) {
    for (int n = 0; n < dim; ++n) {
      Complex v = q * map.kgg[n] * map.kgg[mcol] * r(n, mcol) +
                  e * map.kee[n] * map.kee[mcol] * r(n, mcol);
      if (n >= 1 && mcol >= 1)
        v += e * map.kge[n - 1] * map.kge[mcol - 1] * r(n - 1, mcol - 1);
      if (n + 1 < dim && mcol + 1 < dim)
        v += q * map.keg[n + 1] * map.keg[mcol + 1] * r(n + 1, mcol + 1);
      if (w != 0.0) {
        Complex coh(0.0, 0.0);
        if (mcol >= 1) coh += map.kgg[n] * map.kge[mcol - 1] * r(n, mcol - 1);      // K_gg rho K_ge^+
        if (n >= 1) coh -= map.kge[n - 1] * map.kgg[mcol] * r(n - 1, mcol);          // K_ge rho K_gg^+
        if (mcol + 1 < dim) coh += map.kee[n] * map.keg[mcol + 1] * r(n, mcol + 1);  // K_ee rho K_eg^+
        if (n + 1 < dim) coh -= map.keg[n + 1] * map.kee[mcol] * r(n + 1, mcol);     // K_eg rho K_ee^+
        v += w * I * coh;
      }
      out.data(n, mcol) = v;
    }
  }
  return out;
}

// Dense realizations of the four blocks, for diagnostics and cross-checks.
inline std::array<Eigen::MatrixXcd, 4> collision_blocks_dense(const CollisionMap& map) {
  const int dim = map.dim();
  const Complex mi(0.0, -1.0);
  Eigen::MatrixXcd kgg = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd kge = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd keg = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd kee = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    kgg(n, n) = map.kgg[n];
    kee(n, n) = map.kee[n];
    if (n >= 1) keg(n - 1, n) = mi * map.keg[n];
    if (n + 1 < dim) kge(n + 1, n) = mi * map.kge[n];
  }
  return {kgg, kge, keg, kee};
}

// State of the outgoing qubit after the same collision:
//   (rho_q')_{jj'} = sum_{a,b} (rho_q)_{ab} Tr[ K_j'b^dagger K_ja rho_b ].
// Useful for excitation bookkeeping: the photon gained by the field equals
// the excitation lost by the qubit, up to truncation leak. Diagnostic only,
// so it takes the simple dense route.
inline Eigen::Matrix2cd outgoing_qubit_state(const CollisionMap& map, const DensityMatrix& rho_b,
                                             const QubitState& rho_q) {
  const int dim = rho_b.dim();
  if (dim != map.dim())
    throw std::invalid_argument("outgoing_qubit_state: state and map dimensions differ");
  const auto blocks = collision_blocks_dense(map);
  const Eigen::MatrixXcd* K[2][2] = {{&blocks[0], &blocks[1]},   // K_gg, K_ge
                                     {&blocks[2], &blocks[3]}};  // K_eg, K_ee
  Eigen::Matrix2cd outq = Eigen::Matrix2cd::Zero();
  for (int j = 0; j < 2; ++j)
    for (int jp = 0; jp < 2; ++jp)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          outq(j, jp) += rho_q.data(a, b) *
                         (K[jp][b]->adjoint() * (*K[j][a]) * rho_b.data).trace();
  return outq;
}

// Diagonal fast path for incoherent qubits (c = 0): populations evolve by
//   p_n' = p_n + s_{n+1}^2 (q p_{n+1} - (1-q) p_n) + s_n^2 ((1-q) p_{n-1} - q p_n)
// with s_n = sin(theta sqrt(n)). The sum is preserved except for the outflow
// dropped at the truncation boundary.
inline Eigen::VectorXd apply_collision_diagonal(double theta, double q,
                                                const Eigen::VectorXd& p) {
  if (!(theta > 0.0)) throw std::invalid_argument("apply_collision_diagonal: theta must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("apply_collision_diagonal: q must lie in [0,1]");
  const int dim = static_cast<int>(p.size());
  for (int n = 0; n < dim; ++n)
    if (p[n] < -1e-12)
      throw std::invalid_argument("apply_collision_diagonal: negative population");
  Eigen::VectorXd s2(dim + 1);
  for (int n = 0; n <= dim; ++n) {
    const double s = std::sin(theta * std::sqrt(double(n)));
    s2[n] = s * s;
  }
  Eigen::VectorXd out(dim);
  for (int n = 0; n < dim; ++n) {
    double v = p[n];
    const double up = (n + 1 < dim) ? p[n + 1] : 0.0;
    v += s2[n + 1] * (q * up - (1.0 - q) * p[n]);
    if (n >= 1) v += s2[n] * ((1.0 - q) * p[n - 1] - q * p[n]);
    out[n] = v;
  }
  return out;
}

// Literal one-collision master map written with the number-operator functions
//   cN = cos(theta sqrt(N)), cN1 = cos(theta sqrt(N+1)),
//   sN1 = sin(theta sqrt(N+1)) / sqrt(N+1),
// used only as an independent cross-check against apply_collision. The final
// coherence term is the adjoint of the first one; writing it with a second
// raising operator (as one might guess from symmetry with the third term)
// breaks Hermiticity, which fixes the form uniquely.
inline DensityMatrix apply_collision_explicit(double theta, double q, double c,
                                              const DensityMatrix& rho_b) {
  if (!(theta > 0.0)) throw std::invalid_argument("apply_collision_explicit: theta must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("apply_collision_explicit: q must lie in [0,1]");
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("apply_collision_explicit: c must lie in [0,1]");
  const int dim = rho_b.dim();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXcd adag = a.adjoint();  // truncated: top level annihilated
  Eigen::MatrixXcd cN = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd cN1 = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd sN1 = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    cN(n, n) = std::cos(theta * std::sqrt(double(n)));
    cN1(n, n) = std::cos(theta * std::sqrt(double(n + 1)));
    sN1(n, n) = std::sin(theta * std::sqrt(double(n + 1))) / std::sqrt(double(n + 1));
  }
  const Eigen::MatrixXcd& r = rho_b.data;
  const Eigen::MatrixXcd sa = sN1 * a;     // lowers
  const Eigen::MatrixXcd as = adag * sN1;  // raises, top dropped

  Eigen::MatrixXcd out = (1.0 - q) * (cN1 * r * cN1) + q * (sa * r * sa.adjoint()) +
                         (1.0 - q) * (as * r * as.adjoint()) + q * (cN * r * cN);
  const double w = c * std::sqrt(q * (1.0 - q));
  if (w != 0.0) {
    const Complex I(0.0, 1.0);
    out += I * w * (cN * r * sa + cN1 * r * as - sa * r * cN1 - as * r * cN);
  }
  DensityMatrix res;
  res.data = std::move(out);
  return res;
}

}  // namespace mqb
