#pragma once

// io.hpp — file formats: CSV for bulk numeric data (17-significant-digit
// decimals, exact round-trip) and JSON for structured configs and reports.
// Complex CSV cells use the "re+imi" form, e.g. "1.5+0.5i", "2-3i", "4".

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "klfactor/algebra.hpp"
#include "klfactor/correlation.hpp"
#include "klfactor/galerkin.hpp"
#include "klfactor/spectral.hpp"
#include "klfactor/weak_dist.hpp"

namespace klfactor {

using Json = nlohmann::ordered_json;

// --- CSV ------------------------------------------------------------------

Eigen::MatrixXd load_matrix_csv(const std::string& path);
Eigen::MatrixXcd load_complex_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix);

std::complex<double> parse_complex_cell(const std::string& cell);
std::string format_double(double value);  // %.17g

// Snapshot CSV: one snapshot per column, optional first row of labels.
struct SnapshotCsv {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
};
SnapshotCsv load_snapshot_csv(const std::string& path);

// Column or row of numbers, flattened.
std::vector<double> load_vector_csv(const std::string& path);

// --- JSON -----------------------------------------------------------------

Json load_json(const std::string& path);
void write_json(const std::string& path, const Json& doc);

// {"model":"function","weights":[...]} or {"model":"matrix","rho":[[...]]}
// where rho rows hold entries that are numbers or [re, im] pairs.
ProbAlgebra algebra_from_json(const Json& doc, bool auto_normalise = false);

// Elements from CSV against a known algebra: function model expects a single
// row of values, matrix model an n x n grid.
Element element_from_csv(const ProbAlgebra& alg, const std::string& path);

// {"fn":"sqrt"} | {"fn":"poly","coeffs":[...]} | {"fn":"power","p":...} |
// {"fn":"indicator","lo":...,"hi":...} | {"fn":"abs"} | {"fn":"exp"}
FnSpec fnspec_from_json(const Json& doc);
Json fnspec_to_json(const FnSpec& fn);

Json measure_to_json(const SpectralMeasure& measure);
SpectralMeasure measure_from_json(const Json& doc);

// {"weights":[...]}
Eigen::VectorXd weights_from_json(const Json& doc);

// {"omega0":..., "domega":..., "S":[...], "seed":...}
StationaryModel stationary_model_from_json(const Json& doc);

// {"weights":[...], "kappa":[...], "u0":[...], "T":..., "steps":...,
//  "f_const":[...] | "f_table":{"times":[...],"values":[[...]]},
//  "keep": n (optional)}
struct GalerkinProblem {
  ProbAlgebra alg;
  Element kappa;
  Element u0;
  LoadSpec load;
  double horizon = 1.0;
  int steps = 1;
  int keep = -1;  // -1: full basis
};
GalerkinProblem galerkin_problem_from_json(const Json& doc);

}  // namespace klfactor
