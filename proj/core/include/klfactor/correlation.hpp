#pragma once

// correlation.hpp — correlation operators from weighted snapshots, their
// spectral decomposition, Karhunen-Loeve truncation with exact energy
// bookkeeping, alternative factorisations, unitary equivalences between
// factorisations, and the companion (Gram/kernel) operator.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "klfactor/errors.hpp"

namespace klfactor {

// Weighted family {(mu_i, r(mu_i), w_i)}; column i of `snapshots` is r(mu_i).
// Weights are arbitrary strictly positive reals (a general discrete measure);
// only rv_mean_cov demands probability weights.
struct SnapshotSet {
  Eigen::MatrixXd snapshots;        // d x m
  Eigen::VectorXd weights;          // m, strictly positive
  std::vector<std::string> labels;  // size m, or empty

  Eigen::Index dim() const { return snapshots.rows(); }
  Eigen::Index count() const { return snapshots.cols(); }

  static SnapshotSet create(Eigen::MatrixXd snapshots, Eigen::VectorXd weights,
                            std::vector<std::string> labels = {});
  static SnapshotSet uniform(Eigen::MatrixXd snapshots,
                             std::vector<std::string> labels = {});
};

// C = sum_i w_i r_i r_i^T, symmetric positive semi-definite.
struct CorrelationOp {
  Eigen::MatrixXd matrix;
  double trace = 0.0;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Spectral decomposition of C together with the coefficient functions
// s_m(mu_i) = lambda_m^{-1/2} <r_i, v_m> forming a weighted-orthonormal
// system. `eigenvalues` holds the full descending spectrum (clamped at zero);
// modes below rank_tol * lambda_1 carry no mode/coefficient columns.
struct RSvd {
  Eigen::VectorXd eigenvalues;  // length d, descending
  Eigen::MatrixXd modes;        // d x k, orthonormal columns
  Eigen::MatrixXd coeff_fns;    // m x k, coeff_fns(i, j) = s_j(mu_i)
  double trace = 0.0;

  Eigen::Index rank() const { return modes.cols(); }
};

enum class FactorKind { EigSqrt, Cholesky, SpectralRoot, External };

// B with B^T B = C.
struct Factorization {
  Eigen::MatrixXd B;  // p x d
  FactorKind kind = FactorKind::External;
};

struct KLExpansion {
  int rank = 0;
  Eigen::VectorXd eigenvalues;  // n kept
  Eigen::MatrixXd modes;        // d x n
  Eigen::MatrixXd coeff_fns;    // m x n
  double discarded_energy = 0.0;
};

struct CompanionGram {
  Eigen::MatrixXd gram;         // K(i,j) = <r_i, r_j>
  Eigen::VectorXd eigenvalues;  // of W^{1/2} K W^{1/2}, descending, full m
  Eigen::MatrixXd coeff_fns;    // m x k, rescaled eigenvectors = s_m(mu_i)
};

struct MeanCov {
  Eigen::VectorXd mean;
  CorrelationOp cov;
};

CorrelationOp build_correlation(const SnapshotSet& snap,
                                Eigen::Index max_dim = 10000);

RSvd eig_decompose(const CorrelationOp& corr, const SnapshotSet& snap,
                   double rank_tol = 1e-12);

// Keeps the n largest eigenpairs; discarded_energy = sum_{m>n} lambda_m, and
// the weighted squared reconstruction error equals it.
KLExpansion kl_truncate(const RSvd& svd, int n);

// r_ROM(mu_i) for snapshot index i.
Eigen::VectorXd kl_reconstruct(const KLExpansion& kl, Eigen::Index sample);

// sum_i w_i || r_i - r_ROM(mu_i) ||^2.
double kl_reconstruction_error(const KLExpansion& kl, const SnapshotSet& snap);

// Pivoted Cholesky, B = L^T (upper triangular up to the pivot permutation).
Factorization cholesky_factor(const CorrelationOp& corr,
                              double pivot_tol = 1e-12);

// B = C^{1/2} = V sqrt(Lambda) V^T, symmetric PSD.
Factorization spectral_root(const CorrelationOp& corr);

// B = sqrt(Lambda_k) V_k^T from the retained eigenpairs.
Factorization eig_sqrt_factor(const CorrelationOp& corr,
                              double rank_tol = 1e-12);

// X with ||B2 - X B1||_max small and orthonormal columns/rows on the range
// closures; built from the shared right singular subspaces (the eigenvectors
// of the common C) and completed orthonormally on the complements.
Eigen::MatrixXd unitary_connect(const Factorization& b1,
                                const Factorization& b2);

// Gram/kernel operator K(i,j) = <r_i, r_j>; the discrete companion operator
// W^{1/2} K W^{1/2} shares its nonzero spectrum with C. An optional kernel
// callable is cross-checked against the computed Gram entries.
CompanionGram companion_gram(
    const SnapshotSet& snap, double rank_tol = 1e-12,
    const std::function<double(Eigen::Index, Eigen::Index)>& kernel = {});

// mean = sum_i w_i r_i and the covariance (correlation of the centred map).
// Requires probability weights.
MeanCov rv_mean_cov(const SnapshotSet& snap);

}  // namespace klfactor
