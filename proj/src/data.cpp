#include "gbart/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gbart/errors.hpp"
#include "gbart/rng.hpp"

namespace gbart {

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    throw InvalidInput("predictor rows (" + std::to_string(X.rows()) + ") and response length (" +
                       std::to_string(y.size()) + ") differ");
  }
  if (n() == 0 || p() == 0) throw InvalidInput("dataset must have at least one row and column");
  for (double v : X.values()) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite predictor value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite response value");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.X = Matrix(rows.size(), p());
  out.y.reserve(rows.size());
  out.names = names;
  out.target_name = target_name;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = X.row(rows[r]);
    std::copy(src.begin(), src.end(), out.X.row(r).begin());
    out.y.push_back(y[rows[r]]);
  }
  return out;
}

std::vector<std::size_t> FoldSpec::fold_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSpec::other_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

namespace {

void check_case(int case_id) {
  if (case_id < 1 || case_id > 12) {
    throw InvalidCase("synthetic case must be in 1..12, got " + std::to_string(case_id));
  }
}

double sq(double v) { return v * v; }

}  // namespace

std::size_t synthetic_num_predictors(int case_id) {
  check_case(case_id);
  if (case_id <= 5) return 6;
  if (case_id == 12) return 7;
  return 20;
}

double synthetic_noise_sd(int case_id) {
  check_case(case_id);
  return case_id == 12 ? 1.0 : 0.5;
}

double synthetic_signal(int case_id, std::span<const double> x) {
  const std::size_t p = synthetic_num_predictors(case_id);
  if (x.size() < p) throw InvalidInput("synthetic case needs " + std::to_string(p) + " predictors");
  double tail_sq = 0.0;
  double tail = 0.0;
  for (std::size_t j = 6; j < p && case_id != 12; ++j) {
    tail += x[j];
    tail_sq += x[j] * x[j];
  }
  switch (case_id) {
    case 1:
      return sq(x[0] + x[1]) + sq(x[2] + x[3]) + sq(x[4] + x[5]);
    case 2:
      return x[0] * x[1] + x[2] * x[3] + x[4] * x[5];
    case 3:
      return x[0] * x[1] + x[2] + x[3] + x[4];
    case 4:
      return x[0] * x[1] + x[2] * x[3] + x[4] + x[5];
    case 5:
      return std::sin(x[0]) * std::sin(x[1]) + sq(x[2] + x[3]) + sq(x[4] + x[5]);
    case 6:
      return 5 * sq(x[0] + x[1]) + sq(x[2] + x[3]) + 0.2 * sq(x[4] + x[5]) + 0.04 * tail_sq;
    case 7:
      return 5 * x[0] * x[1] + x[2] * x[3] + 0.2 * x[4] * x[5] + 0.04 * tail;
    case 8:
      return 5 * std::sin(x[0]) * std::sin(x[1]) + sq(x[2] + x[3]) + 0.2 * sq(x[4] + x[5]) +
             0.04 * tail;
    case 9:
      return 5 * std::sin(x[0]) * std::sin(x[1]) + x[2] * x[3] + 0.2 * x[4] * x[5] + 0.04 * tail;
    case 10:
      return 5 * sq(x[0] + x[1]) + sq(x[2] + x[3]) + 0.2 * sq(x[4] + x[5]);
    case 11:
      return 5 * x[0] * x[1] + x[2] * x[3] + 0.2 * x[4] * x[5];
    default:
      return 10 * std::sin(std::numbers::pi * x[0] * x[1]) + 20 * sq(x[2] - 0.5) + 10 * x[3] +
             5 * x[4];
  }
}

Dataset generate_synthetic(int case_id, std::size_t n, std::uint64_t seed) {
  const std::size_t p = synthetic_num_predictors(case_id);
  const double noise = synthetic_noise_sd(case_id);
  if (n == 0) throw InvalidInput("synthetic sample size must be positive");
  Rng rng(seed);
  Dataset out;
  out.X = Matrix(n, p);
  out.y.resize(n);
  for (std::size_t j = 0; j < p; ++j) out.names.push_back("x" + std::to_string(j + 1));
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.X.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      row[j] = (case_id != 12 && j < 6) ? rng.normal(1.0, 1.0) : rng.uniform();
    }
    out.y[i] = synthetic_signal(case_id, row) + rng.normal(0.0, noise);
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& ref) {
  auto it = std::find(header.begin(), header.end(), ref);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), index);
  if (ec == std::errc() && ptr == ref.data() + ref.size() && index < header.size()) return index;
  throw SchemaError("column '" + ref + "' not found in header");
}

}  // namespace

namespace {

struct Columns {
  std::vector<std::string> names;
  std::string target_name;
  std::vector<double> predictors;  // row-major
  std::vector<double> target;
  std::size_t rows = 0;
};

Columns read_columns(const std::string& path, const std::string* target,
                     const std::vector<std::string>& drop) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  Columns out;
  const std::size_t none = header.size();
  const std::size_t target_col = target ? resolve_column(header, *target) : none;
  std::vector<bool> keep(header.size(), true);
  if (target) keep[target_col] = false;
  for (const auto& d : drop) keep[resolve_column(header, d)] = false;
  if (target) out.target_name = header[target_col];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (keep[c]) out.names.push_back(header[c]);
  }
  if (out.names.empty()) throw SchemaError(path + ": no predictor columns left");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!keep[c] && c != target_col) continue;
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(path + ": cannot parse '" + cell + "' at row " + std::to_string(row) +
                         ", column '" + header[c] + "'");
      }
      (c == target_col ? out.target : out.predictors).push_back(v);
    }
  }
  out.rows = row;
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target,
                 const std::vector<std::string>& drop) {
  Columns cols = read_columns(path, &target, drop);
  Dataset out;
  out.names = std::move(cols.names);
  out.target_name = cols.target_name;
  out.y = std::move(cols.target);
  out.X = Matrix(cols.rows, out.names.size());
  std::copy(cols.predictors.begin(), cols.predictors.end(), out.X.row(0).data());
  out.validate();
  return out;
}

Matrix load_csv_predictors(const std::string& path, const std::vector<std::string>& drop) {
  Columns cols = read_columns(path, nullptr, drop);
  if (cols.rows == 0) throw InvalidInput(path + ": no data rows");
  Matrix X(cols.rows, cols.names.size());
  std::copy(cols.predictors.begin(), cols.predictors.end(), X.row(0).data());
  return X;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  for (std::size_t j = 0; j < data.p(); ++j) {
    out << (j < data.names.size() ? data.names[j] : "x" + std::to_string(j + 1)) << ',';
  }
  out << data.target_name << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (double v : data.X.row(i)) out << v << ',';
    out << data.y[i] << '\n';
  }
}

FoldSpec kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw InvalidFold("fold count " + std::to_string(k) + " must lie in [2, " + std::to_string(n) +
                      "]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  FoldSpec out;
  out.k = k;
  out.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.assignments[perm[i]] = i % k;
  return out;
}

std::pair<Dataset, Dataset> train_val_split(const Dataset& data, double val_fraction,
                                            std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw InvalidInput("validation fraction must lie in (0, 1)");
  }
  const std::size_t n = data.n();
  const auto n_val = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * val_fraction - 1e-9));
  if (n_val == 0 || n_val >= n) {
    throw InsufficientData("cannot split " + std::to_string(n) + " rows with fraction " +
                           std::to_string(val_fraction));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::span<const std::size_t> all(perm);
  return {data.subset(all.first(n - n_val)), data.subset(all.subspan(n - n_val))};
}

}  // namespace gbart
