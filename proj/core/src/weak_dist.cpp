#include "klfactor/weak_dist.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace klfactor {

WhiteNoiseMap WhiteNoiseMap::create(Eigen::Index dim, std::uint64_t seed) {
  return WhiteNoiseMap(Eigen::MatrixXd::Identity(dim, dim), seed);
}

WhiteNoiseMap WhiteNoiseMap::create(Eigen::MatrixXd basis,
                                    std::uint64_t seed) {
  if (basis.rows() == 0 || basis.rows() != basis.cols()) {
    throw ValidationError("NotOrthonormal",
                          "white-noise basis must be square and non-empty");
  }
  const double residual =
      (basis.transpose() * basis -
       Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (residual > 1e-10) {
    std::ostringstream msg;
    msg << "basis fails orthonormality by " << residual;
    throw ValidationError("NotOrthonormal", msg.str());
  }
  return WhiteNoiseMap(std::move(basis), seed);
}

Eigen::VectorXd WhiteNoiseMap::sample(const Eigen::VectorXd& xi,
                                      int n_draws) const {
  if (xi.size() != dim()) {
    throw ValidationError("DimensionMismatch",
                          "sample vector does not match the map dimension");
  }
  if (n_draws < 0) {
    throw ValidationError("DimensionMismatch", "negative draw count");
  }
  const Eigen::VectorXd coeffs = basis_.transpose() * xi;
  Eigen::VectorXd out(n_draws);
  for (int j = 0; j < n_draws; ++j) {
    SubstreamRng rng(seed_, static_cast<std::uint64_t>(j));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      acc += coeffs[i] * rng.next_normal();
    }
    out[j] = acc;
  }
  return out;
}

StationaryModel StationaryModel::create(double omega0, double domega,
                                        Eigen::VectorXd density,
                                        std::uint64_t seed) {
  if (density.size() == 0) {
    throw ValidationError("EmptyGrid", "spectral density has no bins");
  }
  if (!(domega > 0.0)) {
    throw ValidationError("EmptyGrid", "frequency spacing must be positive");
  }
  if (!density.allFinite()) {
    throw ValidationError("NonFiniteInput",
                          "spectral density contains NaN/Inf");
  }
  if (density.minCoeff() < 0.0) {
    throw ValidationError("NegativeDensity",
                          "spectral density values must be non-negative");
  }
  return StationaryModel{omega0, domega, std::move(density), seed};
}

Eigen::MatrixXd synth_stationary(const StationaryModel& model,
                                 const std::vector<double>& times,
                                 int n_paths) {
  if (model.bins() == 0) {
    throw ValidationError("EmptyGrid", "spectral density has no bins");
  }
  if (times.empty()) {
    throw ValidationError("EmptyGrid", "time grid is empty");
  }
  for (double t : times) {
    if (!std::isfinite(t)) {
      throw ValidationError("NonFiniteInput", "time grid contains NaN/Inf");
    }
  }
  if (n_paths < 0) {
    throw ValidationError("DimensionMismatch", "negative path count");
  }
  const Eigen::Index bins = model.bins();
  const Eigen::VectorXd amplitude =
      (model.density * model.domega).cwiseSqrt();
  Eigen::MatrixXd paths(n_paths, static_cast<Eigen::Index>(times.size()));
  for (int j = 0; j < n_paths; ++j) {
    SubstreamRng rng(model.seed, static_cast<std::uint64_t>(j));
    Eigen::VectorXd cos_amp(bins);
    Eigen::VectorXd sin_amp(bins);
    for (Eigen::Index k = 0; k < bins; ++k) {
      cos_amp[k] = amplitude[k] * rng.next_normal();
      sin_amp[k] = amplitude[k] * rng.next_normal();
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < bins; ++k) {
        const double phase = model.frequency(k) * times[ti];
        acc += cos_amp[k] * std::cos(phase) + sin_amp[k] * std::sin(phase);
      }
      paths(j, static_cast<Eigen::Index>(ti)) = acc;
    }
  }
  return paths;
}

double target_autocov(const StationaryModel& model, double tau) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < model.bins(); ++k) {
    acc += model.density[k] * model.domega *
           std::cos(model.frequency(k) * tau);
  }
  return acc;
}

AutocovReport autocov_check(const Eigen::MatrixXd& paths,
                            const std::vector<double>& times,
                            const StationaryModel& model,
                            const std::vector<double>& lags) {
  const Eigen::Index n_paths = paths.rows();
  if (n_paths < 100) {
    std::ostringstream msg;
    msg << "autocov_check needs at least 100 paths, got " << n_paths;
    throw ValidationError("InsufficientPaths", msg.str());
  }
  if (static_cast<Eigen::Index>(times.size()) != paths.cols()) {
    throw ValidationError("DimensionMismatch",
                          "time grid does not match the path matrix");
  }
  AutocovReport report;
  report.n_paths = static_cast<int>(n_paths);
  for (double lag : lags) {
    // Admissible pairs: |t_b - t_a - lag| within grid roundoff.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const double tol = 1e-9 * (1.0 + std::abs(lag));
    for (std::size_t a = 0; a < times.size(); ++a) {
      for (std::size_t b = a; b < times.size(); ++b) {
        if (std::abs(times[b] - times[a] - lag) <= tol) {
          pairs.emplace_back(a, b);
        }
      }
    }
    if (pairs.empty()) {
      std::ostringstream msg;
      msg << "lag " << lag << " is not representable on the time grid";
      throw ValidationError("EmptyGrid", msg.str());
    }
    // Per-path pair averages are iid across paths; their spread yields the
    // Monte-Carlo standard error.
    Eigen::VectorXd per_path(n_paths);
    for (Eigen::Index p = 0; p < n_paths; ++p) {
      double acc = 0.0;
      for (const auto& [a, b] : pairs) {
        acc += paths(p, static_cast<Eigen::Index>(a)) *
               paths(p, static_cast<Eigen::Index>(b));
      }
      per_path[p] = acc / static_cast<double>(pairs.size());
    }
    AutocovRow row;
    row.lag = lag;
    row.target = target_autocov(model, lag);
    row.empirical = per_path.mean();
    const double variance =
        (per_path.array() - row.empirical).square().sum() /
        static_cast<double>(n_paths - 1);
    row.std_error = std::sqrt(variance / static_cast<double>(n_paths));
    if (row.std_error > 0.0) {
      row.z_score = (row.empirical - row.target) / row.std_error;
    } else {
      row.z_score = (row.empirical == row.target)
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
    }
    row.flagged = std::abs(row.z_score) > 4.0;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace klfactor
