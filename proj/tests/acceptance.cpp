// Acceptance suite: every numbered criterion below runs at its stated
// tolerance and prints exactly one PASS/FAIL line. Exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "klfactor/algebra.hpp"
#include "klfactor/correlation.hpp"
#include "klfactor/galerkin.hpp"
#include "klfactor/spectral.hpp"
#include "klfactor/weak_dist.hpp"

using namespace klfactor;
using namespace klfactor::testing;

namespace {

struct Check {
  std::string name;
  std::function<bool(std::string&)> run;
};

Eigen::Index small_dim(SubstreamRng& rng) {
  return 2 + static_cast<Eigen::Index>(rng.next_u64() % 7);  // 2..8
}

// 1. KL error identity over 50 random snapshot sets and every rank.
bool kl_error_identity(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  SubstreamRng rng(1001, 0);
  double worst = 0.0;
  for (int round = 0; round < 50; ++round) {
    const SnapshotSet snap = random_snapshots(rng, small_dim(rng),
                                              small_dim(rng));
    const CorrelationOp corr = build_correlation(snap);
    const RSvd svd = eig_decompose(corr, snap);
    for (int n = 0; n <= svd.rank(); ++n) {
      const KLExpansion kl = kl_truncate(svd, n);
      const double gap = std::abs(kl_reconstruction_error(kl, snap) -
                                  kl.discarded_energy);
      worst = std::max(worst, gap / corr.trace);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "max relative gap %.3e (tol 1e-9), runtime %.2fs (limit 5s)",
                worst, seconds);
  detail = buffer;
  return worst <= 1e-9 && seconds < 5.0;
}

// 2. The hand-derived 2x2 case to 1e-10.
bool worked_case(std::string& detail) {
  Eigen::MatrixXd snaps(2, 2);
  snaps << 1, 1, 1, -1;
  const SnapshotSet snap =
      SnapshotSet::create(snaps, Eigen::Vector2d(0.75, 0.25));
  const RSvd svd = eig_decompose(build_correlation(snap), snap);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  double err = 0.0;
  err = std::max(err, std::abs(svd.eigenvalues[0] - 1.5));
  err = std::max(err, std::abs(svd.eigenvalues[1] - 0.5));
  err = std::max(err, std::abs(svd.modes(0, 0) - inv_sqrt2));
  err = std::max(err, std::abs(svd.modes(1, 0) - inv_sqrt2));
  err = std::max(err, std::abs(svd.modes(0, 1) - inv_sqrt2));
  err = std::max(err, std::abs(svd.modes(1, 1) + inv_sqrt2));
  err = std::max(err, std::abs(svd.coeff_fns(0, 0) - std::sqrt(4.0 / 3.0)));
  err = std::max(err, std::abs(svd.coeff_fns(1, 0)));
  err = std::max(err,
                 std::abs(kl_truncate(svd, 1).discarded_energy - 0.5));
  char buffer[120];
  std::snprintf(buffer, sizeof(buffer), "max deviation %.3e (tol 1e-10)",
                err);
  detail = buffer;
  return err <= 1e-10;
}

// 3. Unitary equivalence of spectral root and pivoted Cholesky.
bool factorisation_equivalence(std::string& detail) {
  SubstreamRng rng(1003, 0);
  double worst_residual = 0.0;
  double worst_orth = 0.0;
  for (int round = 0; round < 50; ++round) {
    const Eigen::Index d = small_dim(rng);
    const SnapshotSet snap = random_snapshots(rng, d, d + 2);
    const CorrelationOp corr = build_correlation(snap);
    const Factorization b1 = spectral_root(corr);
    const Factorization b2 = cholesky_factor(corr);
    const Eigen::MatrixXd x = unitary_connect(b1, b2);
    worst_residual = std::max(
        worst_residual, (b2.B - x * b1.B).cwiseAbs().maxCoeff() /
                            (1.0 + b2.B.cwiseAbs().maxCoeff()));
    worst_orth = std::max(
        worst_orth,
        (x.transpose() * x -
         Eigen::MatrixXd::Identity(x.cols(), x.cols()))
            .cwiseAbs()
            .maxCoeff());
  }
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "max residual %.3e (tol 1e-8), max orthogonality defect %.3e "
                "(tol 1e-9)",
                worst_residual, worst_orth);
  detail = buffer;
  return worst_residual <= 1e-8 && worst_orth <= 1e-9;
}

// 4. Companion operator spectrum sharing.
bool mercer_spectrum(std::string& detail) {
  SubstreamRng rng(1004, 0);
  double worst = 0.0;
  for (int round = 0; round < 50; ++round) {
    const SnapshotSet snap = random_snapshots(rng, small_dim(rng),
                                              small_dim(rng));
    const RSvd svd = eig_decompose(build_correlation(snap), snap);
    const CompanionGram companion = companion_gram(snap);
    const double lambda1 = svd.eigenvalues[0];
    const Eigen::Index n = std::max(svd.eigenvalues.size(),
                                    companion.eigenvalues.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a =
          i < svd.eigenvalues.size() ? svd.eigenvalues[i] : 0.0;
      const double b =
          i < companion.eigenvalues.size() ? companion.eigenvalues[i] : 0.0;
      worst = std::max(worst, std::abs(a - b) / lambda1);
    }
  }
  char buffer[120];
  std::snprintf(buffer, sizeof(buffer),
                "max relative eigenvalue gap %.3e (tol 1e-9)", worst);
  detail = buffer;
  return worst <= 1e-9;
}

// 5. Algebra axioms on random elements plus the Pauli uncertainty case.
bool algebra_axioms(std::string& detail) {
  bool ok = true;
  for (int model = 0; model < 2 && ok; ++model) {
    SubstreamRng rng(1005, static_cast<std::uint64_t>(model));
    for (int round = 0; round < 200 && ok; ++round) {
      const ProbAlgebra alg = model == 0 ? random_function_algebra(rng, 5)
                                         : random_matrix_algebra(rng, 3);
      const Element a = random_element(rng, alg);
      const Element b = random_element(rng, alg);
      const Complex alpha(uniform(rng, -1, 1), uniform(rng, -1, 1));
      ok = ok && std::abs(expectation(alg, a + alpha * b) -
                          (expectation(alg, a) +
                           alpha * expectation(alg, b))) <= 1e-12;
      ok = ok && std::abs(expectation(alg, a.adjoint()) -
                          std::conj(expectation(alg, a))) <= 1e-12;
      ok = ok && expectation(alg, a.adjoint() * a).real() >= -1e-12;
      ok = ok &&
           std::abs(expectation(alg, alg.unit()) - Complex(1, 0)) <= 1e-12;
      ok = ok && std::norm(inner2(alg, a, b)) <=
                     inner2(alg, a, a).real() * inner2(alg, b, b).real() +
                         1e-10;
      const Element obs = random_observable(rng, alg);
      const double mean = expectation(alg, obs).real();
      ok = ok && std::abs(inner2(alg, obs, obs).real() -
                          (mean * mean + variance(alg, obs))) <= 1e-12;
    }
  }
  if (!ok) {
    detail = "random-element axiom sweep failed";
    return false;
  }
  SubstreamRng rng(1006, 0);
  for (int round = 0; round < 100; ++round) {
    const ProbAlgebra alg = random_matrix_algebra(rng, 3);
    const Element a = random_observable(rng, alg);
    const Element b = random_observable(rng, alg);
    const double gap = uncertainty_gap(alg, a, b);
    const double products = variance(alg, a) * variance(alg, b);
    if (gap < -1e-10 * (1.0 + products)) {
      detail = "uncertainty relation violated on a random pair";
      return false;
    }
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.9;
  rho(1, 1) = 0.1;
  const ProbAlgebra pauli = ProbAlgebra::matrix(rho);
  Eigen::MatrixXcd sx(2, 2), sy(2, 2);
  sx << 0, 1, 1, 0;
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  const double gap =
      uncertainty_gap(pauli, pauli.element(sx), pauli.element(sy));
  char buffer[120];
  std::snprintf(buffer, sizeof(buffer),
                "axioms hold; Pauli gap %.15f (want 0.36 within 1e-12)", gap);
  detail = buffer;
  return std::abs(gap - 0.36) <= 1e-12;
}

// 6. Law/moment consistency to order six.
bool law_moments(std::string& detail) {
  double worst = 0.0;
  for (int model = 0; model < 2; ++model) {
    SubstreamRng rng(1007, static_cast<std::uint64_t>(model));
    for (int round = 0; round < 50; ++round) {
      const ProbAlgebra alg = model == 0 ? random_function_algebra(rng, 5)
                                         : random_matrix_algebra(rng, 3);
      const Element a = random_observable(rng, alg);
      const SpectralMeasure measure = law(alg, a);
      Element power = alg.unit();
      for (int k = 0; k <= 6; ++k) {
        const double via_state = expectation(alg, power).real();
        worst = std::max(worst, std::abs(measure.moment(k) - via_state) /
                                    (1.0 + std::abs(via_state)));
        power = power * a;
      }
    }
  }
  char buffer[120];
  std::snprintf(buffer, sizeof(buffer),
                "max relative moment gap %.3e (tol 1e-9)", worst);
  detail = buffer;
  return worst <= 1e-9;
}

// 7. GNS homomorphism and operator norm.
bool gns_checks(std::string& detail) {
  double worst_hom = 0.0;
  double worst_norm = 0.0;
  for (int model = 0; model < 2; ++model) {
    SubstreamRng rng(1008, static_cast<std::uint64_t>(model));
    for (int round = 0; round < 50; ++round) {
      const ProbAlgebra alg = model == 0 ? random_function_algebra(rng, 4)
                                         : random_matrix_algebra(rng, 2);
      const Element a = random_element(rng, alg);
      const Element b = random_element(rng, alg);
      const GnsRep rep_a = gns_rep(alg, a);
      const GnsRep rep_b = gns_rep(alg, b);
      const GnsRep rep_ab = gns_rep(alg, a * b);
      worst_hom = std::max(worst_hom,
                           (rep_ab.matrix - rep_a.matrix * rep_b.matrix)
                               .cwiseAbs()
                               .maxCoeff());
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rep_a.matrix);
      worst_norm = std::max(worst_norm,
                            std::abs(lp_norm(alg, a, kInfiniteExponent) -
                                     svd.singularValues()[0]));
      // For observables the operator norm is the spectral radius.
      const Element obs = random_observable(rng, alg);
      double radius = 0.0;
      for (double x : spectrum(alg, obs)) {
        radius = std::max(radius, std::abs(x));
      }
      worst_norm = std::max(worst_norm,
                            std::abs(lp_norm(alg, obs, kInfiniteExponent) -
                                     radius));
    }
  }
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "max homomorphism defect %.3e, max norm gap %.3e (tol 1e-9)",
                worst_hom, worst_norm);
  detail = buffer;
  return worst_hom <= 1e-9 && worst_norm <= 1e-9;
}

// 8. White noise: exact covariance and seeded empirical moments.
bool white_noise(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const int draws = 100000;
  const WhiteNoiseMap noise = WhiteNoiseMap::create(3, 424242);
  const Eigen::MatrixXd cov = noise.covariance();
  if ((cov - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() != 0.0) {
    detail = "covariance is not exactly the identity";
    return false;
  }
  Eigen::VectorXd xi(3), eta(3);
  xi << 1, 2, 2;
  eta << 2, 1, -2;
  const Eigen::VectorXd sx = noise.sample(xi, draws);
  const Eigen::VectorXd se = noise.sample(eta, draws);
  const double var_x = sx.squaredNorm() / draws;
  const double var_e = se.squaredNorm() / draws;
  const double cross = sx.dot(se) / draws;
  const double zx = std::abs(var_x - 9.0) / (9.0 * std::sqrt(2.0 / draws));
  const double ze = std::abs(var_e - 9.0) / (9.0 * std::sqrt(2.0 / draws));
  const double zc = std::abs(cross) / (9.0 / std::sqrt(double(draws)));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "|z| = %.2f / %.2f / %.2f (limit 4), runtime %.2fs "
                "(limit 10s)",
                zx, ze, zc, seconds);
  detail = buffer;
  return zx <= 4.0 && ze <= 4.0 && zc <= 4.0 && seconds < 10.0;
}

// 9. Stationary synthesis against the cosine target.
bool stationary_synthesis(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const StationaryModel model = StationaryModel::create(
      M_PI, 1.0, Eigen::VectorXd::Constant(1, 2.0), 987654321);
  std::vector<double> times;
  for (int i = 0; i <= 16; ++i) times.push_back(0.25 * i);
  const Eigen::MatrixXd paths = synth_stationary(model, times, 10000);
  const AutocovReport report =
      autocov_check(paths, times, model, {0.0, 0.5, 1.0});
  double worst_z = 0.0;
  for (const AutocovRow& row : report.rows) {
    worst_z = std::max(worst_z, std::abs(row.z_score));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "max |z| %.2f (limit 4), runtime %.2fs (limit 30s)", worst_z,
                seconds);
  detail = buffer;
  return worst_z <= 4.0 && seconds < 30.0;
}

// 10. Stochastic Galerkin exactness on the two-atom demo.
bool galerkin_exactness(std::string& detail) {
  const ProbAlgebra alg = ProbAlgebra::function(Eigen::Vector2d(0.5, 0.5));
  const Element kappa = alg.element(Eigen::Vector2d(1, 2));
  const GalerkinSystem sys =
      assemble(alg, kappa, LoadSpec::zero(2), alg.unit());
  const Trajectory traj = solve(sys, 1.0, 1000);
  const CompareReport report = reference_compare(
      alg, kappa, LoadSpec::zero(2), alg.unit(), sys, traj);
  const double residual = galerkin_residual(sys, traj);
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "max error %.3e, residual %.3e (tol 1e-6)",
                report.max_abs_error, residual);
  detail = buffer;
  return report.max_abs_error <= 1e-6 && residual <= 1e-6;
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"KL reconstruction-error identity", kl_error_identity},
      {"worked 2x2 spectral case", worked_case},
      {"factorisation unitary equivalence", factorisation_equivalence},
      {"Mercer/companion spectrum sharing", mercer_spectrum},
      {"probability-algebra axioms + Pauli gap", algebra_axioms},
      {"law/moment consistency to order 6", law_moments},
      {"GNS homomorphism and operator norm", gns_checks},
      {"white-noise map moments", white_noise},
      {"stationary synthesis autocovariance", stationary_synthesis},
      {"stochastic Galerkin exactness", galerkin_exactness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = checks[i].run(detail);
    } catch (const std::exception& err) {
      detail = std::string("exception: ") + err.what();
      ok = false;
    }
    std::printf("%s  %2zu. %s: %s\n", ok ? "PASS" : "FAIL", i + 1,
                checks[i].name.c_str(), detail.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("acceptance: all %zu criteria passed\n", checks.size());
  } else {
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures,
                checks.size());
  }
  return failures;
}
