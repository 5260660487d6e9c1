#include "klfactor/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace klfactor {

namespace {

std::string trim(const std::string& raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(raw[end - 1]))) {
    --end;
  }
  return raw.substr(begin, end - begin);
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("ParseError", "cannot open '" + path + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) {
    throw ValidationError("ParseError", "no rows in '" + path + "'");
  }
  return rows;
}

[[noreturn]] void bad_cell(const std::string& path, std::size_t row,
                           std::size_t col, const std::string& cell) {
  std::ostringstream msg;
  msg << "non-numeric cell '" << cell << "' at row " << row << ", col " << col
      << " of '" << path << "'";
  throw ValidationError("ParseError", msg.str());
}

double parse_real_cell(const std::string& cell) {
  const std::string s = trim(cell);
  if (s.empty()) throw ValidationError("ParseError", "empty cell");
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ValidationError("ParseError", "trailing characters");
  }
  return value;
}

void check_rectangular(const std::string& path,
                       const std::vector<std::vector<std::string>>& rows,
                       std::size_t start_row) {
  const std::size_t width = rows[start_row].size();
  for (std::size_t r = start_row; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      std::ostringstream msg;
      msg << "row " << r + 1 << " of '" << path << "' has " << rows[r].size()
          << " cells; expected " << width;
      throw ValidationError("ParseError", msg.str());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

std::complex<double> parse_complex_cell(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ValidationError("ParseError", "empty cell");
  if (s == "i" || s == "+i") return {0.0, 1.0};
  if (s == "-i") return {0.0, -1.0};
  const char* p = s.c_str();
  char* end = nullptr;
  const double first = std::strtod(p, &end);
  if (end == p) throw ValidationError("ParseError", "not a number");
  if (*end == '\0') return {first, 0.0};
  if (*end == 'i' && *(end + 1) == '\0') return {0.0, first};
  const char* q = end;
  if (*q == '+' && *(q + 1) == 'i' && *(q + 2) == '\0') return {first, 1.0};
  if (*q == '-' && *(q + 1) == 'i' && *(q + 2) == '\0') return {first, -1.0};
  char* end2 = nullptr;
  const double second = std::strtod(q, &end2);
  if (end2 == q || *end2 != 'i' || *(end2 + 1) != '\0') {
    throw ValidationError("ParseError", "malformed complex cell");
  }
  return {first, second};
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  const auto rows = read_csv_cells(path);
  check_rectangular(path, rows, 0);
  Eigen::MatrixXd out(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      try {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            parse_real_cell(rows[r][c]);
      } catch (const ValidationError&) {
        bad_cell(path, r + 1, c + 1, rows[r][c]);
      }
    }
  }
  return out;
}

Eigen::MatrixXcd load_complex_matrix_csv(const std::string& path) {
  const auto rows = read_csv_cells(path);
  check_rectangular(path, rows, 0);
  Eigen::MatrixXcd out(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      try {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            parse_complex_cell(rows[r][c]);
      } catch (const ValidationError&) {
        bad_cell(path, r + 1, c + 1, rows[r][c]);
      }
    }
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("ParseError", "cannot write '" + path + "'");
  }
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(matrix(r, c));
    }
    out << '\n';
  }
}

SnapshotCsv load_snapshot_csv(const std::string& path) {
  const auto rows = read_csv_cells(path);
  // Optional label header: present when the first row fails numeric parsing.
  bool has_labels = false;
  for (const auto& cell : rows[0]) {
    try {
      parse_real_cell(cell);
    } catch (const ValidationError&) {
      has_labels = true;
      break;
    }
  }
  const std::size_t start = has_labels ? 1 : 0;
  if (rows.size() == start) {
    throw ValidationError("ParseError",
                          "no data rows in '" + path + "' below the labels");
  }
  check_rectangular(path, rows, start);
  if (has_labels && rows[0].size() != rows[start].size()) {
    throw ValidationError("ParseError",
                          "label row width does not match the data");
  }
  SnapshotCsv out;
  if (has_labels) out.labels = rows[0];
  out.values.resize(rows.size() - start, rows[start].size());
  for (std::size_t r = start; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      try {
        out.values(static_cast<Eigen::Index>(r - start),
                   static_cast<Eigen::Index>(c)) =
            parse_real_cell(rows[r][c]);
      } catch (const ValidationError&) {
        bad_cell(path, r + 1, c + 1, rows[r][c]);
      }
    }
  }
  return out;
}

std::vector<double> load_vector_csv(const std::string& path) {
  const Eigen::MatrixXd matrix = load_matrix_csv(path);
  if (matrix.rows() != 1 && matrix.cols() != 1) {
    throw ValidationError("ParseError",
                          "'" + path + "' is not a single row or column");
  }
  std::vector<double> out;
  out.reserve(matrix.size());
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      out.push_back(matrix(r, c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError("ParseError",
                          std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

double require_double(const Json& doc, const char* key) {
  const Json& field = require(doc, key);
  if (!field.is_number()) {
    throw ValidationError("ParseError",
                          std::string("field '") + key + "' must be a number");
  }
  return field.get<double>();
}

Eigen::VectorXd require_vector(const Json& doc, const char* key) {
  const Json& field = require(doc, key);
  if (!field.is_array()) {
    throw ValidationError("ParseError",
                          std::string("field '") + key + "' must be an array");
  }
  Eigen::VectorXd out(field.size());
  Eigen::Index i = 0;
  for (const auto& entry : field) {
    if (!entry.is_number()) {
      throw ValidationError(
          "ParseError", std::string("field '") + key + "' must hold numbers");
    }
    out[i++] = entry.get<double>();
  }
  return out;
}

Complex entry_to_complex(const Json& entry, const char* key) {
  if (entry.is_number()) return {entry.get<double>(), 0.0};
  if (entry.is_array() && entry.size() == 2 && entry[0].is_number() &&
      entry[1].is_number()) {
    return {entry[0].get<double>(), entry[1].get<double>()};
  }
  throw ValidationError("ParseError",
                        std::string("entries of '") + key +
                            "' must be numbers or [re, im] pairs");
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("ParseError", "cannot open '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError("ParseError",
                          "invalid JSON in '" + path + "': " + err.what());
  }
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("ParseError", "cannot write '" + path + "'");
  }
  out << doc.dump(2) << '\n';
}

ProbAlgebra algebra_from_json(const Json& doc, bool auto_normalise) {
  const Json& model = require(doc, "model");
  const std::string label = doc.value("label", std::string{});
  if (model == "function") {
    return ProbAlgebra::function(require_vector(doc, "weights"), label,
                                 auto_normalise);
  }
  if (model == "matrix") {
    const Json& rho = require(doc, "rho");
    if (!rho.is_array() || rho.empty()) {
      throw ValidationError("ParseError", "'rho' must be an array of rows");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(rho.size());
    Eigen::MatrixXcd matrix(n, n);
    Eigen::Index r = 0;
    for (const auto& row : rho) {
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ValidationError("ParseError", "'rho' must be square");
      }
      Eigen::Index c = 0;
      for (const auto& entry : row) {
        matrix(r, c++) = entry_to_complex(entry, "rho");
      }
      ++r;
    }
    return ProbAlgebra::matrix(matrix, label, auto_normalise);
  }
  throw ValidationError("ParseError",
                        "field 'model' must be 'function' or 'matrix'");
}

Element element_from_csv(const ProbAlgebra& alg, const std::string& path) {
  const Eigen::MatrixXcd raw = load_complex_matrix_csv(path);
  if (alg.model() == Model::Function) {
    if (raw.rows() != 1 || raw.cols() != alg.dim()) {
      std::ostringstream msg;
      msg << "function-model element must be one row of " << alg.dim()
          << " values; got " << raw.rows() << "x" << raw.cols();
      throw ValidationError("ParseError", msg.str());
    }
    return alg.element(raw.row(0).transpose().eval());
  }
  if (raw.rows() != alg.dim() || raw.cols() != alg.dim()) {
    std::ostringstream msg;
    msg << "matrix-model element must be " << alg.dim() << "x" << alg.dim()
        << "; got " << raw.rows() << "x" << raw.cols();
    throw ValidationError("ParseError", msg.str());
  }
  return alg.element(raw);
}

FnSpec fnspec_from_json(const Json& doc) {
  const Json& name = require(doc, "fn");
  if (name == "sqrt") return FnSpec::sqrt();
  if (name == "abs") return FnSpec::abs();
  if (name == "exp") return FnSpec::exp();
  if (name == "power") return FnSpec::power(require_double(doc, "p"));
  if (name == "poly") {
    const Eigen::VectorXd coeffs = require_vector(doc, "coeffs");
    return FnSpec::polynomial(
        std::vector<double>(coeffs.begin(), coeffs.end()));
  }
  if (name == "indicator") {
    return FnSpec::indicator(require_double(doc, "lo"),
                             require_double(doc, "hi"));
  }
  throw ValidationError("ParseError", "unknown fn kind");
}

Json fnspec_to_json(const FnSpec& fn) {
  Json doc;
  doc["fn"] = fn.name();
  switch (fn.kind) {
    case FnSpec::Kind::Power:
      doc["p"] = fn.exponent;
      break;
    case FnSpec::Kind::Polynomial:
      doc["coeffs"] = fn.coeffs;
      break;
    case FnSpec::Kind::Indicator:
      doc["lo"] = fn.lo;
      doc["hi"] = fn.hi;
      break;
    default:
      break;
  }
  return doc;
}

Json measure_to_json(const SpectralMeasure& measure) {
  Json atoms = Json::array();
  for (const auto& atom : measure.atoms) {
    Json entry;
    entry["x"] = atom.x;
    entry["w"] = atom.w;
    atoms.push_back(std::move(entry));
  }
  Json doc;
  doc["atoms"] = std::move(atoms);
  return doc;
}

SpectralMeasure measure_from_json(const Json& doc) {
  const Json& atoms = require(doc, "atoms");
  if (!atoms.is_array()) {
    throw ValidationError("ParseError", "'atoms' must be an array");
  }
  SpectralMeasure measure;
  for (const auto& entry : atoms) {
    measure.atoms.push_back(
        {require_double(entry, "x"), require_double(entry, "w")});
  }
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    if (measure.atoms[i].w < 0.0) {
      throw ValidationError("ParseError", "atom weights must be >= 0");
    }
    if (i > 0 && !(measure.atoms[i].x > measure.atoms[i - 1].x)) {
      throw ValidationError("ParseError",
                            "atom points must be strictly increasing");
    }
  }
  if (!measure.atoms.empty() &&
      std::abs(measure.total_weight() - 1.0) > 1e-9) {
    throw ValidationError("ParseError", "atom weights must sum to 1");
  }
  return measure;
}

Eigen::VectorXd weights_from_json(const Json& doc) {
  return require_vector(doc, "weights");
}

StationaryModel stationary_model_from_json(const Json& doc) {
  const Json& seed = require(doc, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ValidationError("ParseError", "'seed' must be an integer");
  }
  return StationaryModel::create(require_double(doc, "omega0"),
                                 require_double(doc, "domega"),
                                 require_vector(doc, "S"),
                                 seed.get<std::uint64_t>());
}

GalerkinProblem galerkin_problem_from_json(const Json& doc) {
  ProbAlgebra alg =
      ProbAlgebra::function(require_vector(doc, "weights"), "galerkin");
  Element kappa = alg.element(require_vector(doc, "kappa"));
  Element u0 = alg.element(require_vector(doc, "u0"));
  LoadSpec load = LoadSpec::zero(alg.dim());
  if (doc.contains("f_const")) {
    load = LoadSpec::constant(require_vector(doc, "f_const"));
  } else if (doc.contains("f_table")) {
    const Json& table = doc.at("f_table");
    const Eigen::VectorXd times = require_vector(table, "times");
    const Json& values = require(table, "values");
    if (!values.is_array() ||
        static_cast<Eigen::Index>(values.size()) != times.size()) {
      throw ValidationError("ParseError",
                            "'f_table.values' needs one row per time");
    }
    Eigen::MatrixXd grid(times.size(), alg.dim());
    Eigen::Index r = 0;
    for (const auto& row : values) {
      if (!row.is_array() ||
          static_cast<Eigen::Index>(row.size()) != alg.dim()) {
        throw ValidationError("ParseError",
                              "'f_table.values' rows must match the atom "
                              "count");
      }
      Eigen::Index c = 0;
      for (const auto& entry : row) {
        if (!entry.is_number()) {
          throw ValidationError("ParseError",
                                "'f_table.values' must hold numbers");
        }
        grid(r, c++) = entry.get<double>();
      }
      ++r;
    }
    load = LoadSpec::table(std::vector<double>(times.begin(), times.end()),
                           grid);
  }
  const double horizon = require_double(doc, "T");
  const Json& steps = require(doc, "steps");
  if (!steps.is_number_integer() && !steps.is_number_unsigned()) {
    throw ValidationError("ParseError", "'steps' must be an integer");
  }
  int keep = -1;
  if (doc.contains("keep")) {
    const Json& keep_field = doc.at("keep");
    if (!keep_field.is_number_integer() && !keep_field.is_number_unsigned()) {
      throw ValidationError("ParseError", "'keep' must be an integer");
    }
    keep = keep_field.get<int>();
  }
  return GalerkinProblem{std::move(alg), std::move(kappa), std::move(u0),
                         std::move(load), horizon, steps.get<int>(), keep};
}

}  // namespace klfactor
