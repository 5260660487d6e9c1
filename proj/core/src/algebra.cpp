#include "klfactor/algebra.hpp"

#include <cmath>
#include <sstream>

namespace klfactor {

namespace {

void require_compatible(const Element& a, const Element& b) {
  if (!a.compatible(b)) {
    throw ValidationError("ModelMismatch",
                          "elements belong to different algebra models or "
                          "dimensions");
  }
}

void require_owns(const ProbAlgebra& alg, const Element& a,
                  const char* op_name) {
  if (!alg.owns(a)) {
    std::ostringstream msg;
    msg << op_name << ": element does not belong to algebra '" << alg.label()
        << "' (model/dimension mismatch)";
    throw ValidationError("ModelMismatch", msg.str());
  }
}

// Least eigenvalue of the self-adjoint part, used by the positivity check.
double min_spectrum(const Element& a) {
  if (a.model() == Model::Function) {
    return a.data().real().minCoeff();
  }
  Eigen::MatrixXcd sym = 0.5 * (a.data() + a.data().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym,
                                                      Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// Element

Element Element::function(const Eigen::VectorXcd& values) {
  return Element(Model::Function, values);
}

Element Element::function(const Eigen::VectorXd& values) {
  return Element(Model::Function, values.cast<Complex>());
}

Element Element::matrix(const Eigen::MatrixXcd& value) {
  if (value.rows() != value.cols()) {
    throw ValidationError("ModelMismatch", "matrix element must be square");
  }
  return Element(Model::Matrix, value);
}

Element Element::adjoint() const {
  if (model_ == Model::Function) {
    return Element(model_, data_.conjugate());
  }
  return Element(model_, data_.adjoint());
}

Element operator+(const Element& a, const Element& b) {
  require_compatible(a, b);
  return Element(a.model_, a.data_ + b.data_);
}

Element operator-(const Element& a, const Element& b) {
  require_compatible(a, b);
  return Element(a.model_, a.data_ - b.data_);
}

Element operator*(const Element& a, const Element& b) {
  require_compatible(a, b);
  if (a.model_ == Model::Function) {
    return Element(a.model_, a.data_.cwiseProduct(b.data_));
  }
  return Element(a.model_, a.data_ * b.data_);
}

Element operator*(Complex scalar, const Element& a) {
  return Element(a.model_, scalar * a.data_);
}

Element operator-(const Element& a) { return Element(a.model_, -a.data_); }

Element Element::pow(int exponent, const Element& unit) const {
  Element result = unit;
  for (int k = 0; k < exponent; ++k) result = result * (*this);
  return result;
}

// ---------------------------------------------------------------------------
// ProbAlgebra

ProbAlgebra ProbAlgebra::function(const Eigen::VectorXd& weights,
                                  std::string label, bool auto_normalise,
                                  double tol) {
  if (weights.size() == 0) {
    throw ValidationError("NonFaithful", "weight vector is empty");
  }
  if (!weights.allFinite()) {
    throw ValidationError("NonFiniteInput", "weights contain NaN/Inf");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) {
      std::ostringstream msg;
      msg << "weight " << i << " = " << weights[i]
          << " violates faithfulness (all weights must be strictly positive)";
      throw ValidationError("NonFaithful", msg.str());
    }
  }
  const double total = weights.sum();
  if (!auto_normalise && std::abs(total - 1.0) > tol) {
    std::ostringstream msg;
    msg << "weights sum to " << total
        << "; expected 1 (pass auto_normalise to rescale)";
    throw ValidationError("NotNormalised", msg.str());
  }
  ProbAlgebra alg;
  alg.model_ = Model::Function;
  alg.dim_ = weights.size();
  alg.label_ = std::move(label);
  alg.weights_ = weights / total;
  return alg;
}

ProbAlgebra ProbAlgebra::matrix(const Eigen::MatrixXcd& rho, std::string label,
                                bool auto_normalise, double tol) {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) {
    throw ValidationError("ModelMismatch",
                          "density matrix must be square and non-empty");
  }
  if (!rho.allFinite()) {
    throw ValidationError("NonFiniteInput", "density matrix contains NaN/Inf");
  }
  const double herm_residual = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_residual > tol) {
    std::ostringstream msg;
    msg << "density matrix is not self-adjoint (residual " << herm_residual
        << ")";
    throw ValidationError("NonFaithful", msg.str());
  }
  Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
  const double trace = sym.trace().real();
  if (!auto_normalise && std::abs(trace - 1.0) > tol) {
    std::ostringstream msg;
    msg << "tr(rho) = " << trace
        << "; expected 1 (pass auto_normalise to rescale)";
    throw ValidationError("NotNormalised", msg.str());
  }
  if (trace <= 0.0) {
    throw ValidationError("NonFaithful", "tr(rho) must be positive");
  }
  sym /= trace;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym,
                                                      Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (lambda_min <= 1e-12 * std::max(1.0, lambda_max)) {
    std::ostringstream msg;
    msg << "density matrix has least eigenvalue " << lambda_min
        << "; the state would not be faithful";
    throw ValidationError("NonFaithful", msg.str());
  }
  ProbAlgebra alg;
  alg.model_ = Model::Matrix;
  alg.dim_ = rho.rows();
  alg.label_ = std::move(label);
  alg.rho_ = sym;
  return alg;
}

const Eigen::VectorXd& ProbAlgebra::weights() const {
  if (model_ != Model::Function) {
    throw ValidationError("ModelMismatch",
                          "weights() requires a function-model algebra");
  }
  return weights_;
}

const Eigen::MatrixXcd& ProbAlgebra::rho() const {
  if (model_ != Model::Matrix) {
    throw ValidationError("ModelMismatch",
                          "rho() requires a matrix-model algebra");
  }
  return rho_;
}

Element ProbAlgebra::unit() const {
  if (model_ == Model::Function) {
    return Element::function(Eigen::VectorXcd::Ones(dim_).eval());
  }
  return Element::matrix(Eigen::MatrixXcd::Identity(dim_, dim_).eval());
}

// ---------------------------------------------------------------------------
// State and derived functionals

Complex expectation(const ProbAlgebra& alg, const Element& a) {
  require_owns(alg, a, "expectation");
  if (alg.model() == Model::Function) {
    return (alg.weights().cast<Complex>().asDiagonal() * a.data()).sum();
  }
  return (alg.rho() * a.data()).trace();
}

ClassFlags classify(const ProbAlgebra& alg, const Element& a, double tol) {
  require_owns(alg, a, "classify");
  if (!(tol > 0.0)) {
    throw ValidationError("BadTolerance", "classify requires tol > 0");
  }
  ClassFlags flags;
  const double sa_residual = (a.data() - a.adjoint().data())
                                 .cwiseAbs()
                                 .maxCoeff();
  flags.self_adjoint = sa_residual <= tol;
  if (!flags.self_adjoint) return flags;
  const double scale = 1.0 + a.max_abs();
  flags.positive = min_spectrum(a) >= -tol * scale;
  if (!flags.positive) return flags;
  const double idem_residual =
      ((a * a).data() - a.data()).cwiseAbs().maxCoeff();
  flags.projection = idem_residual <= tol;
  return flags;
}

CenterSplit center_split(const ProbAlgebra& alg, const Element& a) {
  const Complex mean = expectation(alg, a);
  return CenterSplit{mean, a - mean * alg.unit()};
}

Complex inner2(const ProbAlgebra& alg, const Element& a, const Element& b) {
  require_owns(alg, a, "inner2");
  require_owns(alg, b, "inner2");
  return expectation(alg, b.adjoint() * a);
}

double norm2(const ProbAlgebra& alg, const Element& a) {
  return std::sqrt(std::max(0.0, inner2(alg, a, a).real()));
}

Complex covariance(const ProbAlgebra& alg, const Element& a,
                   const Element& b) {
  const Element a_fluct = center_split(alg, a).fluctuation;
  const Element b_fluct = center_split(alg, b).fluctuation;
  return inner2(alg, a_fluct, b_fluct);
}

double variance(const ProbAlgebra& alg, const Element& a) {
  return std::max(0.0, covariance(alg, a, a).real());
}

namespace {

// Centred monomials x^j (x*)^k with 1 <= j+k <= degree, in the order of
// increasing total degree (stars last within a degree).
std::vector<Element> centred_monomials(const ProbAlgebra& alg,
                                       const Element& x, int degree) {
  const Element unit = alg.unit();
  const Element x_adj = x.adjoint();
  std::vector<Element> out;
  for (int total = 1; total <= degree; ++total) {
    for (int stars = 0; stars <= total; ++stars) {
      const Element mono =
          x.pow(total - stars, unit) * x_adj.pow(stars, unit);
      out.push_back(center_split(alg, mono).fluctuation);
    }
  }
  return out;
}

}  // namespace

bool independence_test(const ProbAlgebra& alg, const Element& a,
                       const Element& b, int degree, double tol) {
  require_owns(alg, a, "independence_test");
  require_owns(alg, b, "independence_test");
  if (degree < 1 || degree > 8) {
    throw ValidationError("DegreeTooLarge",
                          "monomial degree must lie in [1, 8]");
  }
  const auto left = centred_monomials(alg, a, degree);
  const auto right = centred_monomials(alg, b, degree);
  for (const Element& m1 : left) {
    for (const Element& m2 : right) {
      if (std::abs(inner2(alg, m1, m2)) > tol) return false;
    }
  }
  return true;
}

double uncertainty_gap(const ProbAlgebra& alg, const Element& a,
                       const Element& b) {
  if (!classify(alg, a).self_adjoint || !classify(alg, b).self_adjoint) {
    throw ValidationError("NotObservable",
                          "uncertainty_gap requires self-adjoint arguments");
  }
  const Element commutator = a * b - b * a;
  const Complex expected = expectation(alg, Complex(0.0, 1.0) * commutator);
  if (std::abs(expected.imag()) > 1e-12 * (1.0 + std::abs(expected.real()))) {
    throw ValidationError("NotObservable",
                          "E[i[a,b]] has a non-real residue; arguments are "
                          "not observables");
  }
  const double half = expected.real() / 2.0;
  return variance(alg, a) * variance(alg, b) - half * half;
}

ProbAlgebra weighted_state(const ProbAlgebra& alg, const Element& rho) {
  require_owns(alg, rho, "weighted_state");
  const ClassFlags flags = classify(alg, rho);
  if (!flags.positive) {
    throw ValidationError("NotDensity", "reweighting element is not positive");
  }
  const Complex total = expectation(alg, rho);
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "E[rho] = " << total.real() << "; expected 1";
    throw ValidationError("NotDensity", msg.str());
  }
  const std::string label = alg.label().empty()
                                ? std::string("weighted")
                                : alg.label() + "|weighted";
  if (alg.model() == Model::Function) {
    const Eigen::VectorXd factors = rho.data().real();
    const double floor = 1e-12 * std::max(1.0, factors.maxCoeff());
    if (factors.minCoeff() <= floor) {
      throw ValidationError("NonFaithfulResult",
                            "reweighting has a vanishing component; the new "
                            "state would not be faithful");
    }
    const Eigen::VectorXd weights =
        alg.weights().cwiseProduct(factors);
    return ProbAlgebra::function(weights, label, /*auto_normalise=*/true);
  }
  // Matrix model: E[rho a] = tr((density rho) a) defines a state only when
  // rho commutes with the density matrix.
  const Eigen::MatrixXcd& density = alg.rho();
  const double comm_residual =
      (density * rho.data() - rho.data() * density).cwiseAbs().maxCoeff();
  const double scale =
      1.0 + density.cwiseAbs().maxCoeff() * rho.data().cwiseAbs().maxCoeff();
  if (comm_residual > 1e-9 * scale) {
    throw ValidationError("NotDensity",
                          "reweighting element does not commute with the "
                          "density matrix; E[rho .] would not be "
                          "self-adjoint");
  }
  Eigen::MatrixXcd new_rho = density * rho.data();
  new_rho = 0.5 * (new_rho + new_rho.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(new_rho,
                                                      Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min <= 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw ValidationError("NonFaithfulResult",
                          "reweighting has a vanishing eigenvalue; the new "
                          "state would not be faithful");
  }
  return ProbAlgebra::matrix(new_rho, label, /*auto_normalise=*/true);
}

// ---------------------------------------------------------------------------
// Random matrices

RandomMatrixElement::RandomMatrixElement(
    std::vector<Eigen::MatrixXcd> samples_, Eigen::MatrixXcd rho_)
    : samples(std::move(samples_)), rho(std::move(rho_)) {
  if (samples.empty()) {
    throw ValidationError("ModelMismatch",
                          "random matrix element needs at least one sample");
  }
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n) {
    throw ValidationError("ModelMismatch", "inner density must be square");
  }
  for (const auto& sample : samples) {
    if (sample.rows() != n || sample.cols() != n) {
      throw ValidationError(
          "ModelMismatch",
          "all random-matrix samples must share the inner dimension");
    }
  }
}

RandomMatrixElement RandomMatrixElement::adjoint() const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(samples.size());
  for (const auto& sample : samples) out.push_back(sample.adjoint());
  return RandomMatrixElement(std::move(out), rho);
}

Complex expectation(const ProbAlgebra& outer, const RandomMatrixElement& a) {
  if (outer.model() != Model::Function) {
    throw ValidationError("ModelMismatch",
                          "random matrices require a function-model outer "
                          "algebra");
  }
  if (static_cast<Eigen::Index>(a.samples.size()) != outer.dim()) {
    throw ValidationError("ModelMismatch",
                          "one matrix sample per atom is required");
  }
  Complex total = 0.0;
  for (Eigen::Index i = 0; i < outer.dim(); ++i) {
    total += outer.weights()[i] * (a.rho * a.samples[i]).trace();
  }
  return total;
}

}  // namespace klfactor
