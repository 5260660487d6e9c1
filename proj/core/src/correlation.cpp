#include "klfactor/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klfactor {

namespace {

// Flip each column so that its largest-magnitude entry is positive; ties go
// to the first occurrence, with a relative slack so roundoff cannot move the
// tie-break. Keeps mode output reproducible.
void fix_column_signs(Eigen::MatrixXd& matrix) {
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const double peak = matrix.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      if (std::abs(matrix(i, j)) >= peak * (1.0 - 1e-12)) {
        if (matrix(i, j) < 0.0) matrix.col(j) = -matrix.col(j);
        break;
      }
    }
  }
}

// Descending eigenpairs of a symmetric matrix, eigenvalues clamped at zero.
struct SymEig {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd vectors;
};

SymEig descending_eig(const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (matrix + matrix.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("EigFailure", "symmetric eigendecomposition failed");
  }
  const Eigen::Index n = matrix.rows();
  SymEig out;
  out.lambda.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.lambda[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
    out.vectors.col(i) = eig.eigenvectors().col(n - 1 - i);
  }
  return out;
}

void check_psd_spectrum(const Eigen::VectorXd& raw_ascending) {
  if (raw_ascending.size() == 0) return;
  const double lambda_max = std::max(0.0, raw_ascending.maxCoeff());
  if (raw_ascending.minCoeff() < -1e-10 * std::max(1.0, lambda_max)) {
    std::ostringstream msg;
    msg << "operator has eigenvalue " << raw_ascending.minCoeff()
        << "; not positive semi-definite";
    throw NumericalError("NotPSD", msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SnapshotSet

SnapshotSet SnapshotSet::create(Eigen::MatrixXd snapshots,
                                Eigen::VectorXd weights,
                                std::vector<std::string> labels) {
  if (snapshots.size() == 0) {
    throw ValidationError("DimensionMismatch", "snapshot matrix is empty");
  }
  if (!snapshots.allFinite()) {
    throw ValidationError("NonFiniteInput",
                          "snapshot matrix contains NaN/Inf");
  }
  if (weights.size() != snapshots.cols()) {
    std::ostringstream msg;
    msg << "got " << weights.size() << " weights for " << snapshots.cols()
        << " snapshots";
    throw ValidationError("DimensionMismatch", msg.str());
  }
  if (!weights.allFinite()) {
    throw ValidationError("NonFiniteInput", "weights contain NaN/Inf");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) {
      std::ostringstream msg;
      msg << "weight " << i << " = " << weights[i]
          << " violates positivity/faithfulness";
      throw ValidationError("NonFaithful", msg.str());
    }
  }
  if (!labels.empty() &&
      static_cast<Eigen::Index>(labels.size()) != snapshots.cols()) {
    throw ValidationError("DimensionMismatch",
                          "label count does not match snapshot count");
  }
  return SnapshotSet{std::move(snapshots), std::move(weights),
                     std::move(labels)};
}

SnapshotSet SnapshotSet::uniform(Eigen::MatrixXd snapshots,
                                 std::vector<std::string> labels) {
  const Eigen::Index m = snapshots.cols();
  return create(std::move(snapshots),
                Eigen::VectorXd::Constant(m, 1.0 / double(m)),
                std::move(labels));
}

// ---------------------------------------------------------------------------
// Correlation and its spectral decomposition

CorrelationOp build_correlation(const SnapshotSet& snap,
                                Eigen::Index max_dim) {
  if (snap.dim() > max_dim) {
    std::ostringstream msg;
    msg << "snapshot dimension " << snap.dim() << " exceeds the dense cap "
        << max_dim;
    throw ValidationError("DimensionOverflow", msg.str());
  }
  Eigen::MatrixXd c = snap.snapshots * snap.weights.asDiagonal() *
                      snap.snapshots.transpose();
  c = 0.5 * (c + c.transpose()).eval();
  const double trace = c.trace();
  return CorrelationOp{std::move(c), trace};
}

RSvd eig_decompose(const CorrelationOp& corr, const SnapshotSet& snap,
                   double rank_tol) {
  if (corr.dim() != snap.dim()) {
    throw ValidationError("MismatchedCorrelation",
                          "correlation operator was not built from this "
                          "snapshot set");
  }
  if (corr.trace <= 1e-14) {
    throw NumericalError("ZeroOperator",
                         "correlation trace is numerically zero");
  }
  SymEig eig = descending_eig(corr.matrix);
  const double lambda1 = eig.lambda[0];
  Eigen::Index kept = 0;
  while (kept < eig.lambda.size() &&
         eig.lambda[kept] > rank_tol * lambda1) {
    ++kept;
  }
  RSvd out;
  out.eigenvalues = eig.lambda;
  out.trace = corr.trace;
  out.modes = eig.vectors.leftCols(kept);
  fix_column_signs(out.modes);
  out.coeff_fns.resize(snap.count(), kept);
  for (Eigen::Index j = 0; j < kept; ++j) {
    out.coeff_fns.col(j) = snap.snapshots.transpose() * out.modes.col(j) /
                           std::sqrt(eig.lambda[j]);
  }
  return out;
}

KLExpansion kl_truncate(const RSvd& svd, int n) {
  if (n < 0 || n > svd.rank()) {
    std::ostringstream msg;
    msg << "rank " << n << " outside [0, " << svd.rank() << "]";
    throw ValidationError("RankOutOfRange", msg.str());
  }
  KLExpansion kl;
  kl.rank = n;
  kl.eigenvalues = svd.eigenvalues.head(n);
  kl.modes = svd.modes.leftCols(n);
  kl.coeff_fns = svd.coeff_fns.leftCols(n);
  kl.discarded_energy =
      svd.eigenvalues.tail(svd.eigenvalues.size() - n).sum();
  return kl;
}

Eigen::VectorXd kl_reconstruct(const KLExpansion& kl, Eigen::Index sample) {
  if (sample < 0 || sample >= kl.coeff_fns.rows()) {
    throw ValidationError("RankOutOfRange", "sample index out of range");
  }
  Eigen::VectorXd scaled =
      kl.eigenvalues.cwiseSqrt().cwiseProduct(kl.coeff_fns.row(sample).transpose());
  return kl.modes * scaled;
}

double kl_reconstruction_error(const KLExpansion& kl,
                               const SnapshotSet& snap) {
  if (snap.count() != kl.coeff_fns.rows()) {
    throw ValidationError("MismatchedCorrelation",
                          "expansion was not derived from this snapshot set");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < snap.count(); ++i) {
    acc += snap.weights[i] *
           (snap.snapshots.col(i) - kl_reconstruct(kl, i)).squaredNorm();
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Factorisations

Factorization cholesky_factor(const CorrelationOp& corr, double pivot_tol) {
  const Eigen::Index d = corr.dim();
  Eigen::VectorXd diag = corr.matrix.diagonal();
  const double scale = std::max(diag.maxCoeff(), 0.0);
  const double stop = pivot_tol * std::max(1.0, scale);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index step = 0;
  while (step < d) {
    Eigen::Index pivot = 0;
    const double pivot_value = diag.maxCoeff(&pivot);
    if (pivot_value < -1e-10 * std::max(1.0, scale)) {
      std::ostringstream msg;
      msg << "pivot " << pivot_value << " at step " << step
          << "; matrix is not positive semi-definite";
      throw NumericalError("NotPSD", msg.str());
    }
    if (pivot_value <= stop) break;
    lower.col(step) = corr.matrix.col(pivot) -
                      lower.leftCols(step) *
                          lower.row(pivot).head(step).transpose();
    lower.col(step) /= std::sqrt(lower(pivot, step));
    diag -= lower.col(step).cwiseAbs2();
    diag[pivot] = 0.0;  // never re-pick an eliminated row
    ++step;
  }
  if (diag.minCoeff() < -1e-10 * std::max(1.0, scale)) {
    throw NumericalError("NotPSD",
                         "residual diagonal went negative; matrix is not "
                         "positive semi-definite");
  }
  return Factorization{lower.leftCols(step).transpose(),
                       FactorKind::Cholesky};
}

Factorization spectral_root(const CorrelationOp& corr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (corr.matrix + corr.matrix.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("EigFailure", "symmetric eigendecomposition failed");
  }
  check_psd_spectrum(eig.eigenvalues());
  const Eigen::VectorXd roots =
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd b = eig.eigenvectors() * roots.asDiagonal() *
                      eig.eigenvectors().transpose();
  b = 0.5 * (b + b.transpose()).eval();
  return Factorization{std::move(b), FactorKind::SpectralRoot};
}

Factorization eig_sqrt_factor(const CorrelationOp& corr, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> probe(
      0.5 * (corr.matrix + corr.matrix.transpose()), Eigen::EigenvaluesOnly);
  check_psd_spectrum(probe.eigenvalues());
  SymEig eig = descending_eig(corr.matrix);
  const double lambda1 = eig.lambda.size() > 0 ? eig.lambda[0] : 0.0;
  Eigen::Index kept = 0;
  while (kept < eig.lambda.size() &&
         eig.lambda[kept] > rank_tol * lambda1) {
    ++kept;
  }
  Eigen::MatrixXd modes = eig.vectors.leftCols(kept);
  fix_column_signs(modes);
  Eigen::MatrixXd b = eig.lambda.head(kept).cwiseSqrt().asDiagonal() *
                      modes.transpose();
  return Factorization{std::move(b), FactorKind::EigSqrt};
}

Eigen::MatrixXd unitary_connect(const Factorization& b1,
                                const Factorization& b2) {
  const Eigen::MatrixXd c1 = b1.B.transpose() * b1.B;
  const Eigen::MatrixXd c2 = b2.B.transpose() * b2.B;
  if (c1.rows() != c2.rows()) {
    throw ValidationError("MismatchedCorrelation",
                          "factorisations act on different spaces");
  }
  const double trace = 0.5 * (c1.trace() + c2.trace());
  const double residual = (c1 - c2).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * (1.0 + trace)) {
    std::ostringstream msg;
    msg << "factorisations disagree on C (residual " << residual << ")";
    throw ValidationError("MismatchedCorrelation", msg.str());
  }

  const SymEig eig = descending_eig(0.5 * (c1 + c2));
  const double lambda1 = eig.lambda.size() > 0 ? eig.lambda[0] : 0.0;
  Eigen::Index rank = 0;
  while (rank < eig.lambda.size() &&
         eig.lambda[rank] > 1e-14 * std::max(1.0, lambda1)) {
    ++rank;
  }

  const Eigen::Index p1 = b1.B.rows();
  const Eigen::Index p2 = b2.B.rows();
  // Left singular vectors of both factors over the shared right singular
  // subspace; u_i = B v_i / sqrt(lambda_i) is orthonormal by construction.
  Eigen::MatrixXd u1(p1, rank);
  Eigen::MatrixXd u2(p2, rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    const double inv_sigma = 1.0 / std::sqrt(eig.lambda[i]);
    u1.col(i) = b1.B * eig.vectors.col(i) * inv_sigma;
    u2.col(i) = b2.B * eig.vectors.col(i) * inv_sigma;
  }
  Eigen::MatrixXd x = u2 * u1.transpose();

  // Orthonormal completion pairs the complements of the two ranges.
  const Eigen::Index extra = std::min(p1 - rank, p2 - rank);
  if (extra > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr1(u1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr2(u2);
    const Eigen::MatrixXd full1 = qr1.householderQ();
    const Eigen::MatrixXd full2 = qr2.householderQ();
    x += full2.rightCols(p2 - rank).leftCols(extra) *
         full1.rightCols(p1 - rank).leftCols(extra).transpose();
  }
  return x;
}

// ---------------------------------------------------------------------------
// Companion operator and moments

CompanionGram companion_gram(
    const SnapshotSet& snap, double rank_tol,
    const std::function<double(Eigen::Index, Eigen::Index)>& kernel) {
  CompanionGram out;
  out.gram = snap.snapshots.transpose() * snap.snapshots;
  out.gram = 0.5 * (out.gram + out.gram.transpose()).eval();
  if (kernel) {
    for (Eigen::Index i = 0; i < out.gram.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.gram.cols(); ++j) {
        if (std::abs(out.gram(i, j) - kernel(i, j)) > 1e-10) {
          std::ostringstream msg;
          msg << "kernel(" << i << ", " << j << ") = " << kernel(i, j)
              << " disagrees with <r_i, r_j> = " << out.gram(i, j);
          throw ValidationError("KernelMismatch", msg.str());
        }
      }
    }
  }
  const Eigen::VectorXd root_w = snap.weights.cwiseSqrt();
  const Eigen::MatrixXd symmetrised =
      root_w.asDiagonal() * out.gram * root_w.asDiagonal();
  const SymEig eig = descending_eig(symmetrised);
  out.eigenvalues = eig.lambda;
  const double lambda1 = eig.lambda.size() > 0 ? eig.lambda[0] : 0.0;
  Eigen::Index kept = 0;
  while (kept < eig.lambda.size() &&
         eig.lambda[kept] > rank_tol * lambda1) {
    ++kept;
  }
  out.coeff_fns = root_w.cwiseInverse().asDiagonal() *
                  eig.vectors.leftCols(kept);
  fix_column_signs(out.coeff_fns);
  return out;
}

MeanCov rv_mean_cov(const SnapshotSet& snap) {
  const double total = snap.weights.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "weights sum to " << total
        << "; rv_mean_cov requires probability weights";
    throw ValidationError("WeightsNotProbability", msg.str());
  }
  MeanCov out;
  out.mean = snap.snapshots * snap.weights;
  Eigen::MatrixXd centred = snap.snapshots;
  centred.colwise() -= out.mean;
  Eigen::MatrixXd cov =
      centred * snap.weights.asDiagonal() * centred.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  const double trace = cov.trace();
  out.cov = CorrelationOp{std::move(cov), trace};
  return out;
}

}  // namespace klfactor
