#include "klfactor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klfactor {

namespace {

constexpr double kSelfAdjointTol = 1e-9;
constexpr double kClusterWidth = 1e-8;

void require_observable(const ProbAlgebra& alg, const Element& a,
                        const char* op_name) {
  if (!classify(alg, a, kSelfAdjointTol).self_adjoint) {
    std::ostringstream msg;
    msg << op_name << " requires a self-adjoint element";
    throw ValidationError("NotObservable", msg.str());
  }
}

struct HermitianEig {
  Eigen::VectorXd lambda;    // ascending
  Eigen::MatrixXcd vectors;  // columns
};

HermitianEig hermitian_eig(const Element& a) {
  const Eigen::MatrixXcd sym = 0.5 * (a.data() + a.data().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("EigFailure", "Hermitian eigendecomposition failed");
  }
  return {eig.eigenvalues(), eig.eigenvectors()};
}

// Groups ascending values into clusters of width 1e-8 * (1 + max |value|).
std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(
    const Eigen::VectorXd& sorted_values) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
  if (sorted_values.size() == 0) return ranges;
  const double width =
      kClusterWidth * (1.0 + sorted_values.cwiseAbs().maxCoeff());
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= sorted_values.size(); ++i) {
    if (i == sorted_values.size() ||
        sorted_values[i] - sorted_values[i - 1] > width) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

double polynomial_eval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectralMeasure / FnSpec

double SpectralMeasure::moment(int order) const {
  double acc = 0.0;
  for (const auto& atom : atoms) acc += std::pow(atom.x, order) * atom.w;
  return acc;
}

double SpectralMeasure::total_weight() const {
  double acc = 0.0;
  for (const auto& atom : atoms) acc += atom.w;
  return acc;
}

FnSpec FnSpec::power(double p) {
  if (!(p > 0.0)) {
    throw ValidationError("DomainError", "power exponent must be positive");
  }
  FnSpec fn = of(Kind::Power);
  fn.exponent = p;
  return fn;
}

FnSpec FnSpec::polynomial(std::vector<double> coeffs) {
  FnSpec fn = of(Kind::Polynomial);
  fn.coeffs = std::move(coeffs);
  return fn;
}

FnSpec FnSpec::indicator(double lo, double hi) {
  if (!(lo <= hi)) {
    throw ValidationError("DomainError", "indicator interval is empty");
  }
  FnSpec fn = of(Kind::Indicator);
  fn.lo = lo;
  fn.hi = hi;
  return fn;
}

double FnSpec::operator()(double x) const {
  switch (kind) {
    case Kind::Sqrt:
      return std::sqrt(std::max(0.0, x));
    case Kind::Abs:
      return std::abs(x);
    case Kind::Exp:
      return std::exp(x);
    case Kind::Power:
      return std::pow(x, exponent);
    case Kind::Polynomial:
      return polynomial_eval(coeffs, x);
    case Kind::Indicator:
      return (x >= lo && x <= hi) ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string FnSpec::name() const {
  switch (kind) {
    case Kind::Sqrt: return "sqrt";
    case Kind::Abs: return "abs";
    case Kind::Exp: return "exp";
    case Kind::Power: return "power";
    case Kind::Polynomial: return "poly";
    case Kind::Indicator: return "indicator";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// spectrum / law

namespace {

// Real point values of an observable, ascending: element values in the
// function model, eigenvalues in the matrix model.
Eigen::VectorXd observable_points(const ProbAlgebra& alg, const Element& a) {
  if (alg.model() == Model::Function) {
    Eigen::VectorXd values = a.data().real();
    std::sort(values.begin(), values.end());
    return values;
  }
  return hermitian_eig(a).lambda;
}

}  // namespace

std::vector<double> spectrum(const ProbAlgebra& alg, const Element& a) {
  require_observable(alg, a, "spectrum");
  const Eigen::VectorXd points = observable_points(alg, a);
  std::vector<double> out;
  for (const auto& [begin, end] : cluster_ranges(points)) {
    out.push_back(points.segment(begin, end - begin).mean());
  }
  return out;
}

SpectralMeasure law(const ProbAlgebra& alg, const Element& a) {
  require_observable(alg, a, "law");
  SpectralMeasure measure;
  if (alg.model() == Model::Function) {
    const Eigen::VectorXd values = a.data().real();
    std::vector<Eigen::Index> order(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto i, auto j) {
      return values[i] < values[j];
    });
    Eigen::VectorXd sorted(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      sorted[i] = values[order[i]];
    }
    for (const auto& [begin, end] : cluster_ranges(sorted)) {
      double weight = 0.0;
      double position = 0.0;
      for (Eigen::Index i = begin; i < end; ++i) {
        weight += alg.weights()[order[i]];
        position += sorted[i];
      }
      measure.atoms.push_back({position / double(end - begin), weight});
    }
    return measure;
  }
  const HermitianEig eig = hermitian_eig(a);
  for (const auto& [begin, end] : cluster_ranges(eig.lambda)) {
    // tr(rho P_lambda) over the eigenprojection of the cluster.
    double weight = 0.0;
    for (Eigen::Index i = begin; i < end; ++i) {
      const Eigen::VectorXcd v = eig.vectors.col(i);
      weight += (v.adjoint() * alg.rho() * v).value().real();
    }
    measure.atoms.push_back(
        {eig.lambda.segment(begin, end - begin).mean(), weight});
  }
  return measure;
}

// ---------------------------------------------------------------------------
// apply_fn / abs_element / lp_norm

namespace {

void check_domain(const FnSpec& fn, const Eigen::VectorXd& points) {
  const double scale = 1.0 + points.cwiseAbs().maxCoeff();
  if (fn.kind == FnSpec::Kind::Sqrt &&
      points.minCoeff() < -kSelfAdjointTol * scale) {
    throw NumericalError("DomainError",
                         "sqrt of an element that is not positive");
  }
  const bool fractional =
      fn.kind == FnSpec::Kind::Power &&
      fn.exponent != std::floor(fn.exponent);
  if (fractional && points.minCoeff() < -kSelfAdjointTol * scale) {
    throw NumericalError("DomainError",
                         "fractional power of a negative spectrum");
  }
}

// Clamp roundoff negatives before even roots.
double domain_clamp(const FnSpec& fn, double x) {
  const bool needs_nonneg =
      fn.kind == FnSpec::Kind::Sqrt ||
      (fn.kind == FnSpec::Kind::Power && fn.exponent != std::floor(fn.exponent));
  return (needs_nonneg && x < 0.0) ? 0.0 : x;
}

}  // namespace

Element apply_fn(const ProbAlgebra& alg, const Element& a, const FnSpec& fn) {
  require_observable(alg, a, "apply_fn");
  if (alg.model() == Model::Function) {
    const Eigen::VectorXd values = a.data().real();
    check_domain(fn, values);
    Eigen::VectorXd mapped(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      mapped[i] = fn(domain_clamp(fn, values[i]));
    }
    return alg.element(mapped);
  }
  const HermitianEig eig = hermitian_eig(a);
  check_domain(fn, eig.lambda);
  Eigen::VectorXd mapped(eig.lambda.size());
  for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
    mapped[i] = fn(domain_clamp(fn, eig.lambda[i]));
  }
  Eigen::MatrixXcd result = eig.vectors * mapped.asDiagonal() *
                            eig.vectors.adjoint();
  return alg.element(((result + result.adjoint()) * 0.5).eval());
}

Element abs_element(const ProbAlgebra& alg, const Element& a) {
  return apply_fn(alg, a.adjoint() * a, FnSpec::sqrt());
}

double lp_norm(const ProbAlgebra& alg, const Element& a, double p) {
  if (std::isnan(p) || p < 1.0) {
    throw ValidationError("BadExponent", "lp_norm requires 1 <= p <= inf");
  }
  if (std::isinf(p)) {
    const GnsRep rep = gns_rep(alg, a);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rep.matrix);
    return svd.singularValues().size() == 0 ? 0.0
                                            : svd.singularValues()[0];
  }
  const Element magnitude = abs_element(alg, a);
  const Element powered = apply_fn(alg, magnitude, FnSpec::power(p));
  const double moment = std::max(0.0, expectation(alg, powered).real());
  return std::pow(moment, 1.0 / p);
}

// ---------------------------------------------------------------------------
// GNS representation

namespace {

std::vector<Element> canonical_basis(const ProbAlgebra& alg) {
  std::vector<Element> basis;
  if (alg.model() == Model::Function) {
    for (Eigen::Index i = 0; i < alg.dim(); ++i) {
      Eigen::VectorXcd indicator = Eigen::VectorXcd::Zero(alg.dim());
      indicator[i] = 1.0;
      basis.push_back(Element::function(indicator));
    }
    return basis;
  }
  for (Eigen::Index row = 0; row < alg.dim(); ++row) {
    for (Eigen::Index col = 0; col < alg.dim(); ++col) {
      Eigen::MatrixXcd unit_rc =
          Eigen::MatrixXcd::Zero(alg.dim(), alg.dim());
      unit_rc(row, col) = 1.0;
      basis.push_back(Element::matrix(unit_rc));
    }
  }
  return basis;
}

// Modified Gram-Schmidt with one re-orthogonalisation pass when the first
// pass loses orthogonality; the matrix-model basis under a skewed density
// matrix is ill-conditioned enough to need it.
std::vector<Element> orthonormalise(const ProbAlgebra& alg,
                                    const std::vector<Element>& raw) {
  std::vector<Element> ons;
  for (const Element& candidate : raw) {
    Element current = candidate;
    for (int pass = 0; pass < 2; ++pass) {
      double loss = 0.0;
      for (const Element& q : ons) {
        const Complex coeff = inner2(alg, current, q);
        current = current - coeff * q;
        loss = std::max(loss, std::abs(coeff));
      }
      if (pass == 0 && loss <= 1e-10) break;
    }
    const double norm = norm2(alg, current);
    if (norm <= 1e-12 * (1.0 + norm2(alg, candidate))) {
      throw NumericalError("DegenerateGram",
                           "canonical basis lost independence during "
                           "Gram-Schmidt; the state is numerically "
                           "degenerate");
    }
    ons.push_back(Complex(1.0 / norm, 0.0) * current);
  }
  return ons;
}

}  // namespace

GnsRep gns_rep(const ProbAlgebra& alg, const Element& a) {
  if (!alg.owns(a)) {
    throw ValidationError("ModelMismatch",
                          "gns_rep: element does not belong to the algebra");
  }
  GnsRep rep;
  rep.basis = orthonormalise(alg, canonical_basis(alg));
  rep.dim = static_cast<Eigen::Index>(rep.basis.size());
  rep.matrix.resize(rep.dim, rep.dim);
  for (Eigen::Index j = 0; j < rep.dim; ++j) {
    const Element image = a * rep.basis[j];
    for (Eigen::Index i = 0; i < rep.dim; ++i) {
      rep.matrix(i, j) = inner2(alg, image, rep.basis[i]);
    }
  }
  rep.unit_coords.resize(rep.dim);
  const Element unit = alg.unit();
  for (Eigen::Index i = 0; i < rep.dim; ++i) {
    rep.unit_coords[i] = inner2(alg, unit, rep.basis[i]);
  }
  return rep;
}

}  // namespace klfactor
