#pragma once

// Deterministic random inputs for the property tests, driven by the library's
// own substream generator so failures reproduce exactly.

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "klfactor/algebra.hpp"
#include "klfactor/correlation.hpp"
#include "klfactor/rng.hpp"

namespace klfactor::testing {

inline double uniform(SubstreamRng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_uniform();
}

inline Eigen::VectorXd random_real_vector(SubstreamRng& rng, Eigen::Index n,
                                          double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = uniform(rng, lo, hi);
  return out;
}

inline Eigen::VectorXcd random_complex_vector(SubstreamRng& rng,
                                              Eigen::Index n) {
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  }
  return out;
}

inline Eigen::MatrixXcd random_complex_matrix(SubstreamRng& rng,
                                              Eigen::Index n) {
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r, c) = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    }
  }
  return out;
}

inline ProbAlgebra random_function_algebra(SubstreamRng& rng,
                                           Eigen::Index atoms) {
  return ProbAlgebra::function(random_real_vector(rng, atoms, 0.1, 1.0),
                               "random", /*auto_normalise=*/true);
}

inline ProbAlgebra random_matrix_algebra(SubstreamRng& rng, Eigen::Index n) {
  const Eigen::MatrixXcd a = random_complex_matrix(rng, n);
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho += 0.2 * Eigen::MatrixXcd::Identity(n, n);
  return ProbAlgebra::matrix(rho, "random", /*auto_normalise=*/true);
}

inline Element random_element(SubstreamRng& rng, const ProbAlgebra& alg) {
  if (alg.model() == Model::Function) {
    return alg.element(random_complex_vector(rng, alg.dim()));
  }
  return alg.element(random_complex_matrix(rng, alg.dim()));
}

inline Element random_observable(SubstreamRng& rng, const ProbAlgebra& alg) {
  if (alg.model() == Model::Function) {
    return alg.element(random_real_vector(rng, alg.dim()));
  }
  const Eigen::MatrixXcd a = random_complex_matrix(rng, alg.dim());
  return alg.element((0.5 * (a + a.adjoint())).eval());
}

inline SnapshotSet random_snapshots(SubstreamRng& rng, Eigen::Index d,
                                    Eigen::Index m,
                                    bool probability_weights = false) {
  Eigen::MatrixXd snaps(d, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    snaps.col(c) = random_real_vector(rng, d);
  }
  Eigen::VectorXd weights = random_real_vector(rng, m, 0.1, 1.0);
  if (probability_weights) weights /= weights.sum();
  return SnapshotSet::create(snaps, weights);
}

// Random orthonormal d x n frame via Householder QR of a Gaussian-ish block.
inline Eigen::MatrixXd random_frame(SubstreamRng& rng, Eigen::Index d,
                                    Eigen::Index n) {
  Eigen::MatrixXd block(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      block(r, c) = rng.next_normal();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
  Eigen::MatrixXd q = qr.householderQ();
  return q.leftCols(n);
}

}  // namespace klfactor::testing
