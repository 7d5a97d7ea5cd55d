#pragma once

// Closed-form steady-state predictions and the trapping condition. These
// serve as independent oracles for the simulator: the geometric profile
// below is an exact fixed point of the incoherent recurrence, and the
// cotangent state is an exact fixed point of the coherent channel.

#include "mqb/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace mqb {

// theta = Q pi / sqrt(m) blocks the collision matrix element between levels
// m-1 and m, sealing the spectrum from below level m ("trapping").
struct TrappingSpec {
  int m = 0;
  int Q = 0;
  double theta = 0.0;
};

// Detect whether theta is fine-tuned, i.e. expressible as Q pi / sqrt(m)
// with integers Q <= q_limit and m <= m_search_limit. Returns the smallest-Q
// representation (theta = 2 pi / sqrt(60) canonicalizes to pi / sqrt(15)).
inline std::optional<TrappingSpec> trapping_condition(double theta, int m_search_limit = 10000,
                                                      int q_limit = 4, double tol = 1e-9) {
  if (!(theta > 0.0)) throw std::invalid_argument("trapping_condition: theta must be positive");
  for (int Q = 1; Q <= q_limit; ++Q) {
    const double x = Q * std::numbers::pi / theta;
    const double m_real = x * x;
    const long long m = std::llround(m_real);
    if (m < 1 || m > m_search_limit) continue;
    const double theta_m = Q * std::numbers::pi / std::sqrt(double(m));
    if (std::abs(theta - theta_m) <= tol)
      return TrappingSpec{static_cast<int>(m), Q, theta_m};
  }
  return std::nullopt;
}

// Coupling angle that seals the spectrum below level m (inverse of
// trapping_condition for a given multiplicity Q).
inline double trapping_theta(int Q, int m) {
  if (Q < 1 || m < 1)
    throw std::invalid_argument("trapping_theta: Q and m must be positive integers");
  return Q * std::numbers::pi / std::sqrt(static_cast<double>(m));
}

// Stationary populations of the incoherent protocol at fine-tuned
// theta = pi/sqrt(m): a geometric profile with ratio r = (1-q)/q over the
// trapped levels 0..m-1 and nothing above. The support and normalization
// follow the exact fixed point of the diagonal recurrence (iterating the
// recurrence to stationarity reproduces this vector to machine precision);
// a formula with m+1 occupied levels would not be stationary, since the
// level-(m-1)-to-m link is severed. Edge cases: q=1 pins the battery at
// vacuum, q=0 fills the top trapped level only.
inline Eigen::VectorXd incoherent_steady_state(double q, int m) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("incoherent_steady_state: q must lie in [0,1]");
  if (m < 1) throw std::invalid_argument("incoherent_steady_state: m must be at least 1");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
  if (q == 0.0) {
    p[m - 1] = 1.0;
    return p;
  }
  if (q == 1.0) {
    p[0] = 1.0;
    return p;
  }
  const double r = (1.0 - q) / q;
  // Largest term scaled to 1 to stay finite for extreme ratios.
  double sum = 0.0;
  for (int n = 0; n < m; ++n) {
    p[n] = r >= 1.0 ? std::pow(r, double(n - (m - 1))) : std::pow(r, double(n));
    sum += p[n];
  }
  p /= sum;
  return p;
}

// Purity of the incoherent steady state, evaluated directly from the
// populations.
inline double incoherent_steady_purity(double q, int m) {
  return incoherent_steady_state(q, m).squaredNorm();
}

// The same purity in closed form,
//   P = (r-1)/(r+1) * (r^{2m} - 1)/((r^m - 1)^2)  with r = (1-q)/q,
// algebraically reduced to (r-1)(r^m+1) / ((r+1)(r^m-1)) and evaluated with
// the ratio mirrored into (0,1) so large powers never overflow. The r -> 1
// limit is 1/m (uniform populations).
inline double incoherent_steady_purity_closed(double q, int m) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("incoherent_steady_purity_closed: q must lie in (0,1)");
  if (m < 1) throw std::invalid_argument("incoherent_steady_purity_closed: m must be at least 1");
  const double r = (1.0 - q) / q;
  const double rho = r <= 1.0 ? r : 1.0 / r;  // the expression is r <-> 1/r symmetric
  if (1.0 - rho < 1e-12) return 1.0 / m;
  const double rm = std::pow(rho, double(m));
  return ((1.0 - rho) / (1.0 + rho)) * ((1.0 + rm) / (1.0 - rm));
}

// Large-m approximation of the same quantity.
inline double incoherent_steady_purity_approx(double q) { return 1.0 - 2.0 * q; }

// Amplitudes of the pure stationary state of the coherent protocol at
// fine-tuned theta = pi/sqrt(m) ("cotangent state"):
//   c_n = -i sqrt((1-q)/q) cot(pi sqrt(n) / (2 sqrt(m))) c_{n-1},
// supported on levels 0..m-1 (the cotangent vanishes at n = m). The -i
// phases are what make the state stationary under the full channel, not
// just its populations.
inline Eigen::VectorXcd cotangent_amplitudes(double q, int m, int n_max) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("cotangent_amplitudes: q must lie in (0,1)");
  if (m < 2) throw std::invalid_argument("cotangent_amplitudes: m must be at least 2");
  if (n_max < 1) throw std::invalid_argument("cotangent_amplitudes: n_max must be at least 1");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
  const double sqrt_r = std::sqrt((1.0 - q) / q);
  const Complex mi(0.0, -1.0);
  c[0] = 1.0;
  const int top = std::min(m - 1, n_max);
  for (int n = 1; n <= top; ++n) {
    const double x = std::numbers::pi * std::sqrt(double(n)) / (2.0 * std::sqrt(double(m)));
    c[n] = mi * sqrt_r * (std::cos(x) / std::sin(x)) * c[n - 1];
    if (std::abs(c[n]) > 1e150) c.head(n + 1) /= std::abs(c[n]);  // keep the running product finite
  }
  c /= c.norm();
  return c;
}

// Populations of the cotangent state on the truncated space.
inline Eigen::VectorXd cotangent_state(double q, int m, int n_max) {
  return cotangent_amplitudes(q, m, n_max).cwiseAbs2();
}

}  // namespace mqb
