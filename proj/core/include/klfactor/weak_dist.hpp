#pragma once

// weak_dist.hpp — weak distributions at desk scale: the white-noise map
// defined on a CONS, and synthesis of stationary processes from a discrete
// spectral density, with an empirical autocovariance verification harness.
//
// All randomness is drawn from SubstreamRng (see rng.hpp); draw/path j uses
// the substream (seed, j), so outputs are independent of evaluation order.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "klfactor/errors.hpp"
#include "klfactor/rng.hpp"

namespace klfactor {

// Unitary map sending an orthonormal basis of R^d to iid standard normals;
// the induced covariance basis^T basis is the identity by construction.
class WhiteNoiseMap {
 public:
  static WhiteNoiseMap create(Eigen::Index dim, std::uint64_t seed);
  static WhiteNoiseMap create(Eigen::MatrixXd basis, std::uint64_t seed);

  Eigen::Index dim() const { return basis_.rows(); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::MatrixXd covariance() const { return basis_.transpose() * basis_; }

  // n draws of the scalar variable W(xi); draw j evaluates
  // sum_i <xi, basis_i> z_i with z iid N(0,1) from substream (seed, j).
  // Draws for different xi but equal (seed, j) share the same normals.
  Eigen::VectorXd sample(const Eigen::VectorXd& xi, int n_draws) const;

 private:
  WhiteNoiseMap(Eigen::MatrixXd basis, std::uint64_t seed)
      : basis_(std::move(basis)), seed_(seed) {}

  Eigen::MatrixXd basis_;
  std::uint64_t seed_;
};

// Uniform frequency grid omega_k = omega0 + k * domega with non-negative
// spectral density values.
struct StationaryModel {
  double omega0 = 0.0;
  double domega = 0.0;
  Eigen::VectorXd density;
  std::uint64_t seed = 0;

  static StationaryModel create(double omega0, double domega,
                                Eigen::VectorXd density, std::uint64_t seed);
  double frequency(Eigen::Index k) const { return omega0 + double(k) * domega; }
  Eigen::Index bins() const { return density.size(); }
};

// Discretised spectral representation with a real cosine/sine pair per bin:
// q(t) = sum_k sqrt(S_k domega) (A_k cos(omega_k t) + B_k sin(omega_k t)),
// A, B iid standard normal. Path j uses substream (seed, j). The target
// autocovariance is c(tau) = sum_k S_k domega cos(omega_k tau).
Eigen::MatrixXd synth_stationary(const StationaryModel& model,
                                 const std::vector<double>& times,
                                 int n_paths);

double target_autocov(const StationaryModel& model, double tau);

struct AutocovRow {
  double lag = 0.0;
  double empirical = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool flagged = false;  // |z| > 4
};

struct AutocovReport {
  std::vector<AutocovRow> rows;
  int n_paths = 0;
};

// Empirical autocovariance averaged over paths and admissible time pairs,
// with a Monte-Carlo standard error from the per-path spread.
AutocovReport autocov_check(const Eigen::MatrixXd& paths,
                            const std::vector<double>& times,
                            const StationaryModel& model,
                            const std::vector<double>& lags);

}  // namespace klfactor
