#include <doctest.h>

#include "helpers.hpp"
#include "klfactor/algebra.hpp"

using namespace klfactor;
using klfactor::testing::random_element;
using klfactor::testing::random_function_algebra;
using klfactor::testing::random_matrix_algebra;
using klfactor::testing::random_observable;

namespace {

Eigen::Vector2d two_weights(double a, double b) {
  return Eigen::Vector2d(a, b);
}

Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Eigen::MatrixXcd pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Eigen::MatrixXcd pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd diag2(double a, double b) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("algebra");

TEST_CASE("make_algebra validates the function model") {
  const ProbAlgebra alg = ProbAlgebra::function(two_weights(0.5, 0.5));
  CHECK(alg.model() == Model::Function);
  CHECK(alg.dim() == 2);

  CHECK_THROWS_AS(ProbAlgebra::function(Eigen::Vector3d(0.5, 0.5, 0.0)),
                  ValidationError);
  try {
    ProbAlgebra::function(Eigen::Vector3d(0.5, 0.5, 0.0));
  } catch (const ValidationError& err) {
    CHECK(err.kind() == "NonFaithful");
  }

  CHECK_THROWS_AS(ProbAlgebra::function(two_weights(1.0, 1.0)),
                  ValidationError);
  const ProbAlgebra rescaled =
      ProbAlgebra::function(two_weights(1.0, 1.0), "", true);
  CHECK(rescaled.weights()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rescaled.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_algebra validates the matrix model") {
  const ProbAlgebra alg = ProbAlgebra::matrix(diag2(0.9, 0.1));
  CHECK(alg.model() == Model::Matrix);
  CHECK(alg.dim() == 2);

  // Singular density: not faithful.
  try {
    ProbAlgebra::matrix(diag2(1.0, 0.0));
    CHECK(false);
  } catch (const ValidationError& err) {
    CHECK(err.kind() == "NonFaithful");
  }
  // Indefinite density.
  CHECK_THROWS_AS(ProbAlgebra::matrix(diag2(1.5, -0.5)), ValidationError);
  // Non-normalised without the flag.
  try {
    ProbAlgebra::matrix(diag2(0.9, 0.9));
    CHECK(false);
  } catch (const ValidationError& err) {
    CHECK(err.kind() == "NotNormalised");
  }
  // Non-Hermitian.
  Eigen::MatrixXcd skew(2, 2);
  skew << 0.5, 0.5, -0.5, 0.5;
  CHECK_THROWS_AS(ProbAlgebra::matrix(skew), ValidationError);
}

TEST_CASE("expectation on both models") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  CHECK(expectation(half, half.element(Eigen::Vector2d(1, 3))).real() ==
        doctest::Approx(2.0).epsilon(1e-14));

  const ProbAlgebra even = ProbAlgebra::matrix(diag2(0.5, 0.5));
  CHECK(std::abs(expectation(even, even.element(pauli_z()))) <= 1e-14);

  const ProbAlgebra skewed = ProbAlgebra::matrix(diag2(0.75, 0.25));
  CHECK(expectation(skewed, skewed.element(pauli_z())).real() ==
        doctest::Approx(0.5).epsilon(1e-14));

  CHECK(expectation(half, half.unit()) == Complex(1.0, 0.0));

  // Membership is enforced.
  CHECK_THROWS_AS(expectation(half, skewed.element(pauli_z())),
                  ValidationError);
}

TEST_CASE("classify flags indicators, nilpotents, indefinite observables") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const ClassFlags indicator =
      classify(half, half.element(Eigen::Vector2d(1, 0)));
  CHECK(indicator.self_adjoint);
  CHECK(indicator.positive);
  CHECK(indicator.projection);

  const ProbAlgebra rho = ProbAlgebra::matrix(diag2(0.9, 0.1));
  Eigen::MatrixXcd nilpotent = Eigen::MatrixXcd::Zero(2, 2);
  nilpotent(0, 1) = 1.0;
  const ClassFlags nil = classify(rho, rho.element(nilpotent));
  CHECK_FALSE(nil.self_adjoint);
  CHECK_FALSE(nil.positive);
  CHECK_FALSE(nil.projection);

  const ClassFlags indefinite = classify(rho, rho.element(diag2(1.0, -2.0)));
  CHECK(indefinite.self_adjoint);
  CHECK_FALSE(indefinite.positive);
  CHECK_FALSE(indefinite.projection);
}

TEST_CASE("center_split produces mean and zero-expectation fluctuation") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const auto [mean, fluct] =
      center_split(half, half.element(Eigen::Vector2d(1, 3)));
  CHECK(mean.real() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fluct.data()(0).real() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(fluct.data()(1).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(expectation(half, fluct)) <= 1e-12);

  // Constants split into themselves.
  const auto constant = center_split(half, Complex(2.5, 0) * half.unit());
  CHECK(constant.mean.real() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(constant.fluctuation.max_abs() <= 1e-14);

  const ProbAlgebra skewed = ProbAlgebra::matrix(diag2(0.75, 0.25));
  const auto split = center_split(skewed, skewed.element(pauli_z()));
  CHECK(split.mean.real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(split.fluctuation.data()(0, 0) - Complex(0.5, 0)) <= 1e-14);
  CHECK(std::abs(split.fluctuation.data()(1, 1) - Complex(-1.5, 0)) <= 1e-14);
}

TEST_CASE("inner2 worked values") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const Element a = half.element(Eigen::Vector2d(1, 3));
  CHECK(inner2(half, a, a).real() == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(inner2(half, half.unit(), half.unit()) == Complex(1.0, 0.0));
  CHECK(std::abs(inner2(half, half.element(Eigen::Vector2d(1, 0)),
                        half.element(Eigen::Vector2d(0, 1)))) <= 1e-15);
}

TEST_CASE("covariance worked values") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const Element sym = half.element(Eigen::Vector2d(1, -1));
  CHECK(covariance(half, sym, sym).real() ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(covariance(half, sym, half.element(Eigen::Vector2d(1, 1)))) <=
        1e-14);
  CHECK(std::abs(covariance(half, Complex(3, 0) * half.unit(), sym)) <= 1e-14);
}

TEST_CASE("independence_test separates product structure from functional "
          "dependence") {
  // Two-factor product space, uniform; a depends on the first factor only,
  // b on the second only.
  const ProbAlgebra product =
      ProbAlgebra::function(Eigen::Vector4d(0.25, 0.25, 0.25, 0.25));
  const Element a = product.element(Eigen::Vector4d(2, 2, 7, 7));
  const Element b = product.element(Eigen::Vector4d(3, -1, 3, -1));
  CHECK(independence_test(product, a, b, 4, 1e-9));

  // b = a^2 is uncorrelated with a but not independent.
  const ProbAlgebra third =
      ProbAlgebra::function(Eigen::Vector3d(1, 1, 1) / 3.0);
  const Element x = third.element(Eigen::Vector3d(-1, 0, 1));
  const Element x2 = x * x;
  CHECK(independence_test(third, x, x2, 1, 1e-9));
  CHECK_FALSE(independence_test(third, x, x2, 2, 1e-9));

  CHECK_FALSE(independence_test(third, x, x, 1, 1e-9));

  CHECK_THROWS_AS(independence_test(third, x, x2, 9, 1e-9), ValidationError);
  CHECK_THROWS_AS(independence_test(third, x, x2, 0, 1e-9), ValidationError);
}

TEST_CASE("uncertainty_gap reproduces the Pauli case") {
  const ProbAlgebra rho = ProbAlgebra::matrix(diag2(0.9, 0.1));
  const double gap =
      uncertainty_gap(rho, rho.element(pauli_x()), rho.element(pauli_y()));
  CHECK(gap == doctest::Approx(0.36).epsilon(1e-12));

  // Commuting pair in the function model: the gap is the variance product.
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const Element a = half.element(Eigen::Vector2d(1, -1));
  const Element b = half.element(Eigen::Vector2d(2, 0));
  const double commuting = uncertainty_gap(half, a, b);
  CHECK(commuting ==
        doctest::Approx(variance(half, a) * variance(half, b)).epsilon(1e-12));
  CHECK(commuting >= 0.0);

  CHECK(uncertainty_gap(half, a, a) ==
        doctest::Approx(variance(half, a) * variance(half, a)).epsilon(1e-12));

  Eigen::MatrixXcd nilpotent = Eigen::MatrixXcd::Zero(2, 2);
  nilpotent(0, 1) = 1.0;
  CHECK_THROWS_AS(uncertainty_gap(rho, rho.element(nilpotent),
                                  rho.element(pauli_x())),
                  ValidationError);
}

TEST_CASE("weighted_state reweights the function model") {
  const ProbAlgebra half = ProbAlgebra::function(two_weights(0.5, 0.5));
  const ProbAlgebra tilted =
      weighted_state(half, half.element(Eigen::Vector2d(1.5, 0.5)));
  CHECK(expectation(tilted, tilted.element(Eigen::Vector2d(1, 0))).real() ==
        doctest::Approx(0.75).epsilon(1e-14));

  // Unit reweighting leaves the state unchanged.
  const ProbAlgebra same = weighted_state(half, half.unit());
  CHECK((same.weights() - half.weights()).cwiseAbs().maxCoeff() <= 1e-15);

  try {
    weighted_state(half, half.element(Eigen::Vector2d(2.0, 0.0)));
    CHECK(false);
  } catch (const ValidationError& err) {
    CHECK(err.kind() == "NonFaithfulResult");
  }
  // Not a density: negative component.
  CHECK_THROWS_AS(weighted_state(half, half.element(Eigen::Vector2d(2, -1))),
                  ValidationError);
  // Not a density: expectation != 1.
  CHECK_THROWS_AS(weighted_state(half, half.element(Eigen::Vector2d(2, 2))),
                  ValidationError);
}

TEST_CASE("weighted_state in the matrix model needs a commuting weight") {
  const ProbAlgebra rho = ProbAlgebra::matrix(diag2(0.5, 0.5));
  const ProbAlgebra tilted = weighted_state(rho, rho.element(diag2(1.5, 0.5)));
  CHECK(std::abs(tilted.rho()(0, 0) - Complex(0.75, 0)) <= 1e-14);
  CHECK(std::abs(tilted.rho()(1, 1) - Complex(0.25, 0)) <= 1e-14);

  const ProbAlgebra skewed = ProbAlgebra::matrix(diag2(0.9, 0.1));
  // sigma_x + offset is positive with unit expectation but does not commute
  // with a skewed density.
  Eigen::MatrixXcd weight = Eigen::MatrixXcd::Identity(2, 2) + 0.5 * pauli_x();
  try {
    weighted_state(skewed, skewed.element(weight));
    CHECK(false);
  } catch (const ValidationError& err) {
    CHECK(err.kind() == "NotDensity");
  }
}

TEST_CASE("random matrix elements take the nested state") {
  const ProbAlgebra outer = ProbAlgebra::function(two_weights(0.5, 0.5));
  const RandomMatrixElement sampled(
      {pauli_z(), Eigen::MatrixXcd::Identity(2, 2)}, diag2(0.75, 0.25));
  // 0.5 * tr(rho sigma_z) + 0.5 * tr(rho) = 0.5 * 0.5 + 0.5.
  CHECK(expectation(outer, sampled).real() ==
        doctest::Approx(0.75).epsilon(1e-14));

  const RandomMatrixElement flipped = sampled.adjoint();
  CHECK(std::abs(expectation(outer, flipped) -
                 std::conj(expectation(outer, sampled))) <= 1e-14);

  CHECK_THROWS_AS(RandomMatrixElement({pauli_z()},
                                      Eigen::MatrixXcd::Identity(3, 3)),
                  ValidationError);
  CHECK_THROWS_AS(expectation(outer, RandomMatrixElement({pauli_z()},
                                                         diag2(0.75, 0.25))),
                  ValidationError);
}

TEST_CASE("involution and state axioms hold on random elements") {
  for (int model = 0; model < 2; ++model) {
    SubstreamRng rng(2024, static_cast<std::uint64_t>(model));
    for (int round = 0; round < 100; ++round) {
      const ProbAlgebra alg = model == 0 ? random_function_algebra(rng, 5)
                                         : random_matrix_algebra(rng, 3);
      const Element a = random_element(rng, alg);
      const Element b = random_element(rng, alg);

      // Involution.
      CHECK((a.adjoint().adjoint().data() - a.data()).cwiseAbs().maxCoeff() ==
            0.0);
      CHECK(((a * b).adjoint().data() - (b.adjoint() * a.adjoint()).data())
                .cwiseAbs()
                .maxCoeff() <= 1e-12);

      // State axioms.
      const Complex alpha(testing::uniform(rng, -1, 1),
                          testing::uniform(rng, -1, 1));
      CHECK(std::abs(expectation(alg, a + alpha * b) -
                     (expectation(alg, a) + alpha * expectation(alg, b))) <=
            1e-12);
      CHECK(std::abs(expectation(alg, a.adjoint()) -
                     std::conj(expectation(alg, a))) <= 1e-12);
      CHECK(expectation(alg, a.adjoint() * a).real() >= -1e-12);
      CHECK(std::abs(expectation(alg, alg.unit()) - Complex(1, 0)) <= 1e-12);

      // Orthogonal direct sum: constants against centred parts.
      const Element fluct = center_split(alg, a).fluctuation;
      CHECK(std::abs(expectation(alg, fluct)) <= 1e-12);
      CHECK(std::abs(inner2(alg, alg.unit(), fluct)) <= 1e-12);

      // Positive cone.
      CHECK(classify(alg, a.adjoint() * a).positive);

      // Cauchy-Bunyakovsky-Schwarz.
      const double lhs = std::norm(inner2(alg, a, b));
      const double rhs =
          inner2(alg, a, a).real() * inner2(alg, b, b).real();
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("Pythagoras identity for observables") {
  for (int model = 0; model < 2; ++model) {
    SubstreamRng rng(515, static_cast<std::uint64_t>(model));
    for (int round = 0; round < 100; ++round) {
      const ProbAlgebra alg = model == 0 ? random_function_algebra(rng, 4)
                                         : random_matrix_algebra(rng, 3);
      const Element a = random_observable(rng, alg);
      const double lhs = inner2(alg, a, a).real();
      const double mean = expectation(alg, a).real();
      CHECK(lhs == doctest::Approx(mean * mean + variance(alg, a))
                       .epsilon(1e-12));
    }
  }
}

TEST_CASE("uncertainty gap is non-negative up to roundoff") {
  SubstreamRng rng(99, 0);
  for (int round = 0; round < 100; ++round) {
    const ProbAlgebra alg = random_matrix_algebra(rng, 3);
    const Element a = random_observable(rng, alg);
    const Element b = random_observable(rng, alg);
    const double gap = uncertainty_gap(alg, a, b);
    const double products = variance(alg, a) * variance(alg, b);
    CHECK(gap >= -1e-10 * (1.0 + products));
  }
}

TEST_SUITE_END();
