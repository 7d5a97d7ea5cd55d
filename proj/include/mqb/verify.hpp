#pragma once

// Built-in consistency suites. Each check compares two independent routes to
// the same quantity inside the library (explicit operator-product channel vs
// the banded kernel, closed-form steady states vs fixed-point iteration, band
// damping vs a dense superoperator) and reports the residual against a bound.

#include "mqb/analytics.hpp"
#include "mqb/collision.hpp"
#include "mqb/dissipation.hpp"
#include "mqb/observables.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace mqb {

struct VerifyCheck {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
};

namespace detail {

inline VerifyCheck make_check(std::string name, double residual, double bound) {
  VerifyCheck c;
  c.name = std::move(name);
  c.residual = residual;
  c.bound = bound;
  c.pass = residual <= bound;
  return c;
}

// Random density matrix with the top `clear` levels empty so the collision
// channel is exactly trace preserving on it.
inline Eigen::MatrixXcd random_state(std::mt19937& rng, int dim, int clear) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = Complex(gauss(rng), gauss(rng));
  for (int i = dim - clear; i < dim; ++i) {
    x.row(i).setZero();
    x.col(i).setZero();
  }
  Eigen::MatrixXcd rho = x * x.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace detail

// Channel and damping implementations against their independent formulations.
inline std::vector<VerifyCheck> verify_oracles() {
  std::vector<VerifyCheck> out;
  std::mt19937 rng(20260814);
  std::uniform_real_distribution<double> uth(0.1, 2.5);
  std::uniform_real_distribution<double> uq(0.0, 1.0);

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n_max = 8 + static_cast<int>(rng() % 16);
    const double theta = uth(rng);
    const double q = uq(rng);
    const double c = uq(rng);
    DensityMatrix rho;
    rho.data = detail::random_state(rng, n_max + 1, 2);
    const auto map = jc_collision_map(theta, n_max);
    const auto qubit = build_qubit_state(q, c);
    const Eigen::MatrixXcd a = apply_collision(map, rho, qubit).data;
    const Eigen::MatrixXcd b = apply_collision_explicit(theta, q, c, rho).data;
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  out.push_back(detail::make_check("collision_banded_vs_explicit", worst, 1e-10));

  {
    const int n_max = 10;
    const double gamma = 0.4, nbar = 0.2, duration = 0.75;
    std::mt19937 rng2(7);
    DensityMatrix rho;
    rho.data = detail::random_state(rng2, n_max + 1, 0);
    const Eigen::MatrixXcd before = rho.data;
    const auto bands = build_lindblad_bands(gamma, nbar, n_max);
    rho = apply_damping(bands, rho, duration);

    const Eigen::MatrixXcd gen = build_lindblad_dense(gamma, nbar, n_max);
    const int dim = n_max + 1;
    Eigen::VectorXcd v(dim * dim);
    for (int col = 0; col < dim; ++col)
      for (int row = 0; row < dim; ++row) v(col * dim + row) = before(row, col);
    const int steps = detail::rk4_substeps(gamma, duration, n_max);
    const double h = duration / steps;
    for (int s = 0; s < steps; ++s) {
      const Eigen::VectorXcd k1 = gen * v;
      const Eigen::VectorXcd k2 = gen * (v + 0.5 * h * k1);
      const Eigen::VectorXcd k3 = gen * (v + 0.5 * h * k2);
      const Eigen::VectorXcd k4 = gen * (v + h * k3);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    double diff = 0.0;
    for (int col = 0; col < dim; ++col)
      for (int row = 0; row < dim; ++row)
        diff = std::max(diff, std::abs(v(col * dim + row) - rho.data(row, col)));
    out.push_back(detail::make_check("damping_band_vs_dense", diff, 1e-10));
  }

  {
    // Single excitation decaying at zero temperature follows p1 = exp(-gamma t).
    const double gamma = 1.0, duration = 1.0;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(9);
    p(1) = 1.0;
    const auto bands = build_lindblad_bands(gamma, 0.0, 8);
    p = apply_damping(bands, p, duration);
    out.push_back(detail::make_check("damping_exponential_decay",
                                     std::abs(p(1) - std::exp(-gamma * duration)), 1e-8));
  }
  return out;
}

// Structural invariants on randomized inputs with a fixed seed.
inline std::vector<VerifyCheck> verify_invariants() {
  std::vector<VerifyCheck> out;
  std::mt19937 rng(424243);
  std::uniform_real_distribution<double> uth(0.1, 2.5);
  std::uniform_real_distribution<double> uq(0.0, 1.0);

  double trace_dev = 0.0, herm_dev = 0.0, min_eig = 0.0, excit_dev = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n_max = 6 + static_cast<int>(rng() % 12);
    const double theta = uth(rng);
    const double q = uq(rng);
    const double c = uq(rng);
    DensityMatrix rho;
    rho.data = detail::random_state(rng, n_max + 1, 2);
    const auto map = jc_collision_map(theta, n_max);
    const auto qubit = build_qubit_state(q, c);

    const double n_before = energy(rho) + (1.0 - q);
    const DensityMatrix after = apply_collision(map, rho, qubit);
    const auto qubit_out = outgoing_qubit_state(map, rho, qubit);
    const double n_after = energy(after) + qubit_out(1, 1).real();

    trace_dev = std::max(trace_dev, std::abs(after.data.trace().real() - 1.0));
    herm_dev = std::max(herm_dev, (after.data - after.data.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(after.data);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    excit_dev = std::max(excit_dev, std::abs(n_after - n_before));
  }
  out.push_back(detail::make_check("collision_trace_preserved", trace_dev, 1e-10));
  out.push_back(detail::make_check("collision_hermiticity", herm_dev, 1e-10));
  out.push_back(detail::make_check("collision_positivity", std::max(0.0, -min_eig), 1e-9));
  out.push_back(detail::make_check("collision_excitation_conserved", excit_dev, 1e-10));

  {
    // Diagonal recurrence equals the full channel on diagonal states.
    std::mt19937 rng2(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n_max = 8 + static_cast<int>(rng2() % 10);
      const double theta = uth(rng2);
      const double q = u01(rng2);
      Eigen::VectorXd p(n_max + 1);
      for (int n = 0; n <= n_max; ++n) p(n) = u01(rng2);
      p(n_max) = 0.0;
      p /= p.sum();
      DensityMatrix rho;
      rho.data = p.cast<Complex>().asDiagonal();
      const auto map = jc_collision_map(theta, n_max);
      const DensityMatrix dense = apply_collision(map, rho, build_qubit_state(q, 0.0));
      const Eigen::VectorXd fast = apply_collision_diagonal(theta, q, p);
      worst = std::max(worst,
                       (dense.data.diagonal().real() - fast).cwiseAbs().maxCoeff());
    }
    out.push_back(detail::make_check("diagonal_recurrence_vs_dense", worst, 1e-12));
  }

  {
    // Thermal state is a fixed point of the damping map.
    const double nbar = 0.3;
    DensityMatrix th = thermal_state(nbar, 30);
    const Eigen::MatrixXcd before = th.data;
    const auto bands = build_lindblad_bands(0.8, nbar, 30);
    th = apply_damping(bands, th, 2.0);
    out.push_back(detail::make_check("damping_thermal_fixed_point",
                                     (th.data - before).cwiseAbs().maxCoeff(), 1e-9));
  }

  {
    // Damping contracts trace distance between any two states.
    std::mt19937 rng3(5150);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix r1, r2;
      r1.data = detail::random_state(rng3, 13, 0);
      r2.data = detail::random_state(rng3, 13, 0);
      const auto dist = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
      };
      const double d0 = dist(r1.data, r2.data);
      const auto bands = build_lindblad_bands(0.5, 0.15, 12);
      r1 = apply_damping(bands, r1, 1.0);
      r2 = apply_damping(bands, r2, 1.0);
      worst = std::max(worst, dist(r1.data, r2.data) - d0);
    }
    out.push_back(detail::make_check("damping_trace_norm_contraction",
                                     std::max(0.0, worst), 1e-12));
  }
  return out;
}

// Closed-form steady states against fixed-point iteration of the maps.
inline std::vector<VerifyCheck> verify_steady_states() {
  std::vector<VerifyCheck> out;

  {
    // Geometric trapped distribution is invariant under the diagonal update.
    const int m = 15;
    const double q = 0.25;
    const double theta = trapping_theta(1, m);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * m);
    p.head(m) = incoherent_steady_state(q, m);
    const Eigen::VectorXd next = apply_collision_diagonal(theta, q, p);
    out.push_back(detail::make_check("trapped_distribution_fixed_point",
                                     (next - p).cwiseAbs().maxCoeff(), 1e-12));
  }

  {
    // Iterating the recurrence from vacuum reaches the closed form.
    const int m = 15;
    const double q = 0.25;
    const double theta = trapping_theta(1, m);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(41);
    p(0) = 1.0;
    for (int k = 0; k < 4000; ++k) p = apply_collision_diagonal(theta, q, p);
    const Eigen::VectorXd target = incoherent_steady_state(q, m);
    out.push_back(detail::make_check("trapped_distribution_reached",
                                     (p.head(m) - target).cwiseAbs().maxCoeff(), 1e-9));
  }

  {
    double worst = 0.0;
    for (const double q : {0.1, 0.25, 0.4})
      for (const int m : {5, 15, 30})
        worst = std::max(worst, std::abs(incoherent_steady_purity_closed(q, m) -
                                         incoherent_steady_purity(q, m)));
    out.push_back(detail::make_check("steady_purity_closed_vs_direct", worst, 1e-10));
  }

  {
    // Cotangent state is a fixed point of the coherent channel.
    const int m = 15, n_max = 40;
    const double q = 0.25;
    const double theta = trapping_theta(1, m);
    const Eigen::VectorXcd amp = cotangent_amplitudes(q, m, n_max);
    DensityMatrix rho;
    rho.data = amp * amp.adjoint();
    const DensityMatrix next =
        apply_collision(jc_collision_map(theta, n_max), rho, build_qubit_state(q, 1.0));
    out.push_back(detail::make_check("cotangent_state_fixed_point",
                                     (next.data - rho.data).cwiseAbs().maxCoeff(), 1e-8));
  }
  return out;
}

inline std::vector<VerifyCheck> verify_suite(const std::string& name) {
  if (name == "oracles") return verify_oracles();
  if (name == "invariants") return verify_invariants();
  if (name == "steady_states") return verify_steady_states();
  return {};
}

}  // namespace mqb
