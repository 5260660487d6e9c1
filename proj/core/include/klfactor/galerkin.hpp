#pragma once

// galerkin.hpp — stochastic Galerkin solver for the linear random scalar ODE
//   v'(omega, t) = -kappa(omega) v(omega, t) + f(omega, t)
// over a finite function-model probability space, projected onto an
// orthonormal basis of L_2 and verified against per-atom exact solutions.

#include <vector>

#include <Eigen/Dense>

#include "klfactor/algebra.hpp"

namespace klfactor {

// Right-hand side f(., t): constant in time, or a time table with clamped
// linear interpolation between rows.
class LoadSpec {
 public:
  static LoadSpec zero(Eigen::Index atoms);
  static LoadSpec constant(Eigen::VectorXd atom_values);
  static LoadSpec table(std::vector<double> times, Eigen::MatrixXd values);

  Eigen::Index atoms() const;
  bool is_constant() const { return times_.empty(); }
  const std::vector<double>& table_times() const { return times_; }
  // Per-atom values at time t.
  Eigen::VectorXd at(double t) const;

 private:
  LoadSpec() = default;

  Eigen::VectorXd constant_;
  std::vector<double> times_;
  Eigen::MatrixXd table_;  // row per time, column per atom
};

// Projected system: basis(i, j) = psi_j(omega_i), weighted-orthonormal with
// psi_0 = unit; operator K(i, j) = E[kappa psi_i psi_j]; initial coefficients
// u0_j = <u0, psi_j>_2.
struct GalerkinSystem {
  Eigen::MatrixXd basis;    // N x kept
  Eigen::MatrixXd op;       // kept x kept, symmetric
  Eigen::VectorXd u0;       // kept
  Eigen::VectorXd weights;  // N
  LoadSpec load = LoadSpec::zero(0);

  Eigen::Index atoms() const { return basis.rows(); }
  Eigen::Index kept() const { return basis.cols(); }
  // Projected load E[f(., t) psi_j].
  Eigen::VectorXd load_coeffs(double t) const;
};

// Builds the full basis (Gram-Schmidt over the unit followed by the centred
// atom indicators, in atom order) and projects kappa, f, u0. kappa must be
// self-adjoint with strictly positive spectrum.
GalerkinSystem assemble(const ProbAlgebra& alg, const Element& kappa,
                        const LoadSpec& f, const Element& u0);

// Keeps the first `keep` basis functions (constants always stay first).
GalerkinSystem truncate_system(const GalerkinSystem& sys, int keep);

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd coeffs;  // (steps + 1) x kept
};

// Classical fourth-order one-step integration of u' = -K u + f with fixed
// step T / steps.
Trajectory solve(const GalerkinSystem& sys, double horizon, int steps);

// Reconstruction v(omega_i, t_k) = sum_j coeffs(k, j) basis(i, j).
Eigen::MatrixXd reconstruct_atoms(const GalerkinSystem& sys,
                                  const Trajectory& traj);

struct CompareReport {
  double max_abs_error = 0.0;
  double max_weighted_l2 = 0.0;
};

// Per-atom exact solution by the integrating-factor formula (closed form for
// constant and piecewise-linear loads), compared against the reconstruction.
CompareReport reference_compare(const ProbAlgebra& alg, const Element& kappa,
                                const LoadSpec& f, const Element& u0,
                                const GalerkinSystem& sys,
                                const Trajectory& traj);

// Exact scalar solution of v' = -kappa v + f at the given times.
Eigen::VectorXd exact_atom_solution(double kappa, double initial,
                                    const LoadSpec& f, Eigen::Index atom,
                                    const std::vector<double>& times);

// Max over interior stored times and kept basis directions of the residual
// <v' + kappa v - f, psi_j>_2, with the time derivative taken by a five-point
// central difference of the stored coefficients.
double galerkin_residual(const GalerkinSystem& sys, const Trajectory& traj);

}  // namespace klfactor
