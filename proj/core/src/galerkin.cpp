#include "klfactor/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace klfactor {

// ---------------------------------------------------------------------------
// LoadSpec

LoadSpec LoadSpec::zero(Eigen::Index atoms) {
  return constant(Eigen::VectorXd::Zero(atoms));
}

LoadSpec LoadSpec::constant(Eigen::VectorXd atom_values) {
  LoadSpec load;
  load.constant_ = std::move(atom_values);
  return load;
}

LoadSpec LoadSpec::table(std::vector<double> times, Eigen::MatrixXd values) {
  if (times.empty() ||
      static_cast<Eigen::Index>(times.size()) != values.rows()) {
    throw ValidationError("DimensionMismatch",
                          "load table needs one row of values per time");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ValidationError("DimensionMismatch",
                            "load table times must be strictly increasing");
    }
  }
  LoadSpec load;
  load.times_ = std::move(times);
  load.table_ = std::move(values);
  return load;
}

Eigen::Index LoadSpec::atoms() const {
  return is_constant() ? constant_.size() : table_.cols();
}

Eigen::VectorXd LoadSpec::at(double t) const {
  if (is_constant()) return constant_;
  if (t <= times_.front()) return table_.row(0);
  if (t >= times_.back()) return table_.row(table_.rows() - 1);
  const auto upper =
      std::upper_bound(times_.begin(), times_.end(), t);
  const Eigen::Index hi =
      static_cast<Eigen::Index>(upper - times_.begin());
  const Eigen::Index lo = hi - 1;
  const double span = times_[hi] - times_[lo];
  const double blend = (t - times_[lo]) / span;
  return (1.0 - blend) * table_.row(lo) + blend * table_.row(hi);
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Orthonormal basis of L_2(alg): the unit first, then Gram-Schmidt over the
// centred atom indicators in atom order. Exactly one candidate is linearly
// dependent (the deviations sum to zero) and is dropped.
Eigen::MatrixXd build_basis(const ProbAlgebra& alg) {
  const Eigen::Index n = alg.dim();
  const Eigen::VectorXd& w = alg.weights();
  std::vector<Eigen::VectorXd> candidates;
  candidates.push_back(Eigen::VectorXd::Ones(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd deviation = Eigen::VectorXd::Zero(n);
    deviation[i] = 1.0;
    deviation -= w[i] * Eigen::VectorXd::Ones(n);
    candidates.push_back(deviation);
  }
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (w.array() * a.array() * b.array()).sum();
  };
  std::vector<Eigen::VectorXd> basis;
  for (const Eigen::VectorXd& candidate : candidates) {
    Eigen::VectorXd current = candidate;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Eigen::VectorXd& q : basis) {
        current -= dot(current, q) * q;
      }
    }
    const double norm = std::sqrt(std::max(0.0, dot(current, current)));
    if (norm <= 1e-10 * (1.0 + candidate.cwiseAbs().maxCoeff())) continue;
    basis.push_back(current / norm);
    if (static_cast<Eigen::Index>(basis.size()) == n) break;
  }
  if (static_cast<Eigen::Index>(basis.size()) != n) {
    throw NumericalError("DegenerateGram",
                         "Gram-Schmidt failed to span L_2 of the sample "
                         "space");
  }
  Eigen::MatrixXd psi(n, n);
  for (Eigen::Index j = 0; j < n; ++j) psi.col(j) = basis[j];
  return psi;
}

}  // namespace

Eigen::VectorXd GalerkinSystem::load_coeffs(double t) const {
  return basis.transpose() * weights.cwiseProduct(load.at(t));
}

GalerkinSystem assemble(const ProbAlgebra& alg, const Element& kappa,
                        const LoadSpec& f, const Element& u0) {
  if (alg.model() != Model::Function) {
    throw ValidationError("NotFunctionModel",
                          "the Galerkin demo runs on function-model "
                          "algebras");
  }
  if (!alg.owns(kappa) || !alg.owns(u0)) {
    throw ValidationError("ModelMismatch",
                          "kappa/u0 do not belong to the algebra");
  }
  if (!classify(alg, kappa).self_adjoint) {
    throw ValidationError("NotObservable", "kappa must be self-adjoint");
  }
  const Eigen::VectorXd kappa_values = kappa.data().real();
  if (kappa_values.minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "kappa has spectrum down to " << kappa_values.minCoeff()
        << "; the system would not be dissipative";
    throw NumericalError("UnstableKappa", msg.str());
  }
  if (f.atoms() != alg.dim()) {
    throw ValidationError("DimensionMismatch",
                          "load values do not match the atom count");
  }
  GalerkinSystem sys;
  sys.weights = alg.weights();
  sys.basis = build_basis(alg);
  sys.load = f;
  const Eigen::Index n = alg.dim();
  // K(i, j) = E[kappa psi_i psi_j].
  sys.op.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double value = (sys.weights.array() * kappa_values.array() *
                            sys.basis.col(i).array() *
                            sys.basis.col(j).array())
                               .sum();
      sys.op(i, j) = value;
      sys.op(j, i) = value;
    }
  }
  sys.u0 = sys.basis.transpose() *
           sys.weights.cwiseProduct(u0.data().real().eval());
  return sys;
}

GalerkinSystem truncate_system(const GalerkinSystem& sys, int keep) {
  if (keep < 1 || keep > sys.kept()) {
    std::ostringstream msg;
    msg << "keep = " << keep << " outside [1, " << sys.kept() << "]";
    throw ValidationError("RankOutOfRange", msg.str());
  }
  GalerkinSystem out = sys;
  out.basis = sys.basis.leftCols(keep);
  out.op = sys.op.topLeftCorner(keep, keep);
  out.u0 = sys.u0.head(keep);
  return out;
}

// ---------------------------------------------------------------------------
// Time integration

Trajectory solve(const GalerkinSystem& sys, double horizon, int steps) {
  if (steps < 1) {
    throw ValidationError("RankOutOfRange", "solve requires steps >= 1");
  }
  const double h = horizon / steps;
  const Eigen::Index n = sys.kept();
  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.coeffs.resize(steps + 1, n);
  Eigen::VectorXd u = sys.u0;
  traj.times[0] = 0.0;
  traj.coeffs.row(0) = u;
  auto rhs = [&](double t, const Eigen::VectorXd& state) -> Eigen::VectorXd {
    return -(sys.op * state) + sys.load_coeffs(t);
  };
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Eigen::VectorXd k1 = rhs(t, u);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!u.allFinite()) {
      std::ostringstream msg;
      msg << "state became non-finite at step " << k + 1;
      throw NumericalError("NonFiniteState", msg.str());
    }
    traj.times[k + 1] = (k + 1) * h;
    traj.coeffs.row(k + 1) = u;
  }
  return traj;
}

Eigen::MatrixXd reconstruct_atoms(const GalerkinSystem& sys,
                                  const Trajectory& traj) {
  return traj.coeffs * sys.basis.transpose();  // (times) x (atoms)
}

// ---------------------------------------------------------------------------
// Per-atom oracle and comparison

namespace {

// integral of exp(-kappa (t - s)) (alpha s + beta) over [s0, s1], kappa > 0.
double linear_segment_integral(double kappa, double t, double s0, double s1,
                               double alpha, double beta) {
  // antiderivative of e^{kappa s} (alpha s + beta):
  //   e^{kappa s} (alpha s + beta) / kappa - alpha e^{kappa s} / kappa^2
  auto anti = [&](double s) {
    return std::exp(kappa * (s - t)) *
           ((alpha * s + beta) / kappa - alpha / (kappa * kappa));
  };
  return anti(s1) - anti(s0);
}

}  // namespace

Eigen::VectorXd exact_atom_solution(double kappa, double initial,
                                    const LoadSpec& f, Eigen::Index atom,
                                    const std::vector<double>& times) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(times.size()));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    double value = std::exp(-kappa * t) * initial;
    if (f.is_constant()) {
      const double g = f.at(0.0)[atom];
      value += g / kappa * (1.0 - std::exp(-kappa * t));
    } else {
      // The interpolant is exactly linear between table breakpoints (and
      // constant outside), so the integrating-factor integral is a sum of
      // closed-form segment contributions.
      std::vector<double> breaks{0.0};
      for (double tb : f.table_times()) {
        if (tb > 0.0 && tb < t) breaks.push_back(tb);
      }
      breaks.push_back(t);
      for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double s0 = breaks[s];
        const double s1 = breaks[s + 1];
        if (!(s1 > s0)) continue;
        const double f0 = f.at(s0)[atom];
        const double f1 = f.at(s1)[atom];
        const double alpha = (f1 - f0) / (s1 - s0);
        const double beta = f0 - alpha * s0;
        value += linear_segment_integral(kappa, t, s0, s1, alpha, beta);
      }
    }
    out[static_cast<Eigen::Index>(k)] = value;
  }
  return out;
}

CompareReport reference_compare(const ProbAlgebra& alg, const Element& kappa,
                                const LoadSpec& f, const Element& u0,
                                const GalerkinSystem& sys,
                                const Trajectory& traj) {
  const Eigen::VectorXd kappa_values = kappa.data().real();
  const Eigen::VectorXd initial = u0.data().real();
  const Eigen::MatrixXd reconstructed = reconstruct_atoms(sys, traj);
  CompareReport report;
  Eigen::MatrixXd exact(reconstructed.rows(), reconstructed.cols());
  for (Eigen::Index i = 0; i < alg.dim(); ++i) {
    exact.col(i) =
        exact_atom_solution(kappa_values[i], initial[i], f, i, traj.times);
  }
  const Eigen::MatrixXd error = reconstructed - exact;
  report.max_abs_error = error.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < error.rows(); ++k) {
    const double l2 = std::sqrt(
        (alg.weights().array() * error.row(k).transpose().array().square())
            .sum());
    report.max_weighted_l2 = std::max(report.max_weighted_l2, l2);
  }
  return report;
}

double galerkin_residual(const GalerkinSystem& sys, const Trajectory& traj) {
  const Eigen::Index stored = traj.coeffs.rows();
  if (stored < 5) return 0.0;
  const double h = traj.times[1] - traj.times[0];
  // The five-point stencil needs a smooth trajectory; where a table load has
  // a slope break the stencil would measure the kink instead of the
  // residual, so windows containing a breakpoint are skipped.
  auto stencil_is_smooth = [&](Eigen::Index k) {
    for (double knot : sys.load.table_times()) {
      if (knot > traj.times[k - 2] - 1e-12 &&
          knot < traj.times[k + 2] + 1e-12) {
        return false;
      }
    }
    return true;
  };
  double worst = 0.0;
  for (Eigen::Index k = 2; k + 2 < stored; ++k) {
    if (!stencil_is_smooth(k)) continue;
    const Eigen::VectorXd derivative =
        (-traj.coeffs.row(k + 2) + 8.0 * traj.coeffs.row(k + 1) -
         8.0 * traj.coeffs.row(k - 1) + traj.coeffs.row(k - 2))
            .transpose() /
        (12.0 * h);
    const Eigen::VectorXd residual = derivative +
                                     sys.op * traj.coeffs.row(k).transpose() -
                                     sys.load_coeffs(traj.times[k]);
    worst = std::max(worst, residual.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace klfactor
