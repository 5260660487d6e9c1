#pragma once

// spectral.hpp — spectra, functions of observables, L_p norms, laws, and the
// finite-dimensional GNS left-multiplication representation.
//
// Functions of elements go through the multiplication-operator picture: in
// the function model f acts pointwise on the values, in the matrix model the
// element is eigendecomposed (after Hermitian symmetrisation) and f acts on
// the eigenvalues.

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "klfactor/algebra.hpp"

namespace klfactor {

// Finitely supported probability measure on the reals; atoms are strictly
// increasing and weights sum to one.
struct SpectralAtom {
  double x = 0.0;
  double w = 0.0;
};

struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;

  double moment(int order) const;
  double total_weight() const;
};

// Closed set of admissible functions; closed so that results are
// reproducible and serialisable in CLI configs.
struct FnSpec {
  enum class Kind { Sqrt, Abs, Exp, Power, Polynomial, Indicator };

  Kind kind = Kind::Polynomial;
  double exponent = 1.0;        // Power
  std::vector<double> coeffs;   // Polynomial, ascending degree
  double lo = 0.0, hi = 0.0;    // Indicator interval

  static FnSpec sqrt() { return of(Kind::Sqrt); }
  static FnSpec abs() { return of(Kind::Abs); }
  static FnSpec exp() { return of(Kind::Exp); }
  static FnSpec power(double p);
  static FnSpec polynomial(std::vector<double> coeffs);
  static FnSpec indicator(double lo, double hi);
  static FnSpec identity() { return polynomial({0.0, 1.0}); }

  double operator()(double x) const;
  std::string name() const;

 private:
  static FnSpec of(Kind kind) {
    FnSpec fn;
    fn.kind = kind;
    return fn;
  }
};

// Distinct points of the spectrum of an observable, ascending. Degenerate
// values are merged with cluster width 1e-8 * (1 + |lambda|_max).
std::vector<double> spectrum(const ProbAlgebra& alg, const Element& a);

// f(a) through the spectral theorem. Requires a self-adjoint; Sqrt requires
// a positive, fractional Power a non-negative spectrum.
Element apply_fn(const ProbAlgebra& alg, const Element& a, const FnSpec& fn);

// |a| = (a* a)^{1/2}, defined for arbitrary elements.
Element abs_element(const ProbAlgebra& alg, const Element& a);

// (E[|a|^p])^{1/p} for finite p >= 1; for p = infinity the operator norm of
// the GNS representation L_a.
double lp_norm(const ProbAlgebra& alg, const Element& a, double p);

inline constexpr double kInfiniteExponent =
    std::numeric_limits<double>::infinity();

// The law (distribution measure) of an observable: atoms at the spectrum,
// weights w_i summed per value (function model) or tr(rho P_lambda) per
// eigenprojection (matrix model).
SpectralMeasure law(const ProbAlgebra& alg, const Element& a);

// Left-multiplication representation b |-> ab on L_2(alg), expressed in an
// orthonormal basis produced by modified Gram-Schmidt (with
// re-orthogonalisation) over the canonical algebra basis.
struct GnsRep {
  Eigen::Index dim = 0;
  Eigen::MatrixXcd matrix;          // L_a in the orthonormal basis
  std::vector<Element> basis;       // the CONS itself
  Eigen::VectorXcd unit_coords;     // coordinates of the algebra unit
};

GnsRep gns_rep(const ProbAlgebra& alg, const Element& a);

}  // namespace klfactor
