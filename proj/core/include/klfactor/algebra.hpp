#pragma once

// algebra.hpp — finite-dimensional probability algebras with a faithful state.
//
// Two concrete models are provided:
//   * Function model: complex-valued functions on a finite sample space of N
//     atoms with strictly positive weights summing to one. Multiplication is
//     pointwise, the state is the weighted sum (classical expectation).
//   * Matrix model: complex n-by-n matrices under a strictly positive density
//     matrix rho; the state is A |-> tr(rho A).
//
// Elements carry their model tag and dimension; every operation checks
// membership and throws ModelMismatch otherwise.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "klfactor/errors.hpp"

namespace klfactor {

using Complex = std::complex<double>;

enum class Model { Function, Matrix };

// One member of a probability algebra: a value vector (stored as an N x 1
// matrix) in the function model, or a square complex matrix.
class Element {
 public:
  static Element function(const Eigen::VectorXcd& values);
  static Element function(const Eigen::VectorXd& values);
  static Element matrix(const Eigen::MatrixXcd& value);

  Model model() const noexcept { return model_; }
  // Number of atoms N (function model) or matrix dimension n.
  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Eigen::MatrixXcd& data() const noexcept { return data_; }

  Element adjoint() const;
  double max_abs() const { return data_.cwiseAbs().maxCoeff(); }
  bool compatible(const Element& other) const noexcept {
    return model_ == other.model_ && dim() == other.dim();
  }

  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  friend Element operator*(Complex scalar, const Element& a);
  friend Element operator-(const Element& a);

  Element pow(int exponent, const Element& unit) const;

 private:
  Element(Model model, Eigen::MatrixXcd data)
      : model_(model), data_(std::move(data)) {}

  Model model_;
  Eigen::MatrixXcd data_;  // N x 1 in the function model
};

class ProbAlgebra {
 public:
  // Builders validate faithfulness (strictly positive weights / rho) and
  // normalisation. With auto_normalise the weights (or the trace of rho) are
  // rescaled; otherwise a deviation beyond `tol` raises NotNormalised.
  static ProbAlgebra function(const Eigen::VectorXd& weights,
                              std::string label = {},
                              bool auto_normalise = false, double tol = 1e-9);
  static ProbAlgebra matrix(const Eigen::MatrixXcd& rho,
                            std::string label = {},
                            bool auto_normalise = false, double tol = 1e-9);

  Model model() const noexcept { return model_; }
  Eigen::Index dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  const Eigen::VectorXd& weights() const;
  const Eigen::MatrixXcd& rho() const;

  Element unit() const;
  // Validated element constructor; throws ModelMismatch on wrong shape.
  // Accepts any real or complex Eigen expression: a vector of length N for
  // the function model, an n x n matrix for the matrix model.
  template <typename Derived>
  Element element(const Eigen::MatrixBase<Derived>& value) const {
    if (model_ == Model::Function) {
      if (value.cols() != 1 || value.rows() != dim_) {
        throw ValidationError("ModelMismatch",
                              "value vector does not match the algebra");
      }
      return Element::function(
          Eigen::VectorXcd(value.template cast<Complex>()));
    }
    if (value.rows() != dim_ || value.cols() != dim_) {
      throw ValidationError("ModelMismatch",
                            "matrix value does not match the algebra");
    }
    return Element::matrix(Eigen::MatrixXcd(value.template cast<Complex>()));
  }
  bool owns(const Element& a) const noexcept {
    return a.model() == model_ && a.dim() == dim_;
  }

 private:
  ProbAlgebra() = default;

  Model model_ = Model::Function;
  Eigen::Index dim_ = 0;
  std::string label_;
  Eigen::VectorXd weights_;  // function model
  Eigen::MatrixXcd rho_;     // matrix model
};

struct ClassFlags {
  bool self_adjoint = false;
  bool positive = false;
  bool projection = false;
};

struct CenterSplit {
  Complex mean;
  Element fluctuation;
};

// State evaluation: sum_i w_i a_i (function) or tr(rho a) (matrix).
Complex expectation(const ProbAlgebra& alg, const Element& a);

// self_adjoint: ||a - a*||_max <= tol; positive additionally needs the least
// eigenvalue >= -tol * (1 + ||a||_max); projection additionally needs
// ||a^2 - a||_max <= tol.
ClassFlags classify(const ProbAlgebra& alg, const Element& a,
                    double tol = 1e-9);

// a = E[a] * unit + fluctuation, with E[fluctuation] = 0.
CenterSplit center_split(const ProbAlgebra& alg, const Element& a);

// The state-induced inner product <a,b>_2 = E[b* a].
Complex inner2(const ProbAlgebra& alg, const Element& a, const Element& b);
double norm2(const ProbAlgebra& alg, const Element& a);

// Inner product of the fluctuating parts.
Complex covariance(const ProbAlgebra& alg, const Element& a, const Element& b);
double variance(const ProbAlgebra& alg, const Element& a);

// True iff every pair of centred monomials a^j (a*)^k, b^j (b*)^k with
// 1 <= j+k <= degree is uncorrelated within tol. Finite-degree surrogate for
// polynomial independence; degree is capped at 8.
bool independence_test(const ProbAlgebra& alg, const Element& a,
                       const Element& b, int degree, double tol = 1e-9);

// var(a) var(b) - E[i(ab - ba)]^2 / 4 for observables a, b. Non-negative up
// to roundoff.
double uncertainty_gap(const ProbAlgebra& alg, const Element& a,
                       const Element& b);

// New algebra whose state is a |-> E[rho a]. rho must be positive with
// E[rho] = 1 and strictly positive spectrum (otherwise the result would not
// be faithful). In the matrix model rho must commute with the density matrix,
// else E[rho .] fails self-adjointness.
ProbAlgebra weighted_state(const ProbAlgebra& alg, const Element& rho);

// Matrix-valued random variable over a function-model outer algebra: one
// n x n sample per atom, with an inner density matrix for the matrix state.
struct RandomMatrixElement {
  std::vector<Eigen::MatrixXcd> samples;
  Eigen::MatrixXcd rho;

  RandomMatrixElement(std::vector<Eigen::MatrixXcd> samples_,
                      Eigen::MatrixXcd rho_);
  Eigen::Index sample_dim() const { return rho.rows(); }
  RandomMatrixElement adjoint() const;
};

// sum_i w_i tr(rho A(omega_i)).
Complex expectation(const ProbAlgebra& outer, const RandomMatrixElement& a);

}  // namespace klfactor
