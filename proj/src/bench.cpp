#include "gbart/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gbart/errors.hpp"
#include "gbart/parallel.hpp"

namespace gbart {

std::string method_name(Method m) { return m == Method::Gbart ? "GBART" : "BART"; }

Method parse_method(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "gbart") return Method::Gbart;
  if (lower == "bart") return Method::Bart;
  throw InvalidConfig("unknown method '" + name + "'");
}

std::string DatasetSpec::id() const {
  if (!name.empty()) return name;
  if (kind == Kind::Synthetic) {
    return "synthetic:" + std::to_string(case_id) + ":" + std::to_string(n);
  }
  return "csv:" + path + ":" + target;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw InvalidConfig("plan key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidConfig("plan key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidConfig("plan key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfig("plan key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

DatasetSpec parse_dataset_spec(const std::string& text) {
  const auto parts = split(trim(text), ':');
  DatasetSpec spec;
  if (parts.size() == 3 && parts[0] == "synthetic") {
    spec.kind = DatasetSpec::Kind::Synthetic;
    spec.case_id = static_cast<int>(to_size("datasets", parts[1]));
    spec.n = to_size("datasets", parts[2]);
    synthetic_num_predictors(spec.case_id);
    return spec;
  }
  if ((parts.size() == 3 || parts.size() == 4) && parts[0] == "csv") {
    spec.kind = DatasetSpec::Kind::Csv;
    spec.path = parts[1];
    spec.target = parts[2];
    if (parts.size() == 4) spec.drop = split(parts[3], '|');
    return spec;
  }
  throw InvalidConfig("cannot parse dataset spec '" + text + "'");
}

McmcConfig BenchmarkPlan::desk_mcmc() {
  McmcConfig c;
  c.ndpost = 300;
  c.burn_in = 100;
  return c;
}

void BenchmarkPlan::validate() const {
  if (datasets.empty()) throw InvalidConfig("plan needs at least one dataset");
  if (methods.empty()) throw InvalidConfig("plan needs at least one method");
  if (folds < 2) throw InvalidConfig("plan needs folds >= 2");
  if (replications < 1) throw InvalidConfig("plan needs replications >= 1");
  mcmc.validate();
  search.validate();
}

BenchmarkPlan parse_plan(const std::string& text) {
  BenchmarkPlan plan;
  std::optional<std::size_t> stage1_ndpost;
  std::optional<std::size_t> stage1_burn_in;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("plan line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto& m = plan.mcmc;
    auto& s = plan.search;
    if (key == "datasets") {
      for (const auto& d : split(value, ';')) {
        if (!trim(d).empty()) plan.datasets.push_back(parse_dataset_spec(d));
      }
    } else if (key == "methods") {
      plan.methods.clear();
      for (const auto& name : split(value, ',')) plan.methods.push_back(parse_method(trim(name)));
    } else if (key == "folds") {
      plan.folds = to_size(key, value);
    } else if (key == "replications") {
      plan.replications = to_size(key, value);
    } else if (key == "master_seed") {
      plan.master_seed = to_u64(key, value);
    } else if (key == "workers") {
      plan.workers = static_cast<int>(to_size(key, value));
    } else if (key == "record_time") {
      plan.record_time = to_bool(key, value);
    } else if (key == "mcmc.ndpost") {
      m.ndpost = to_size(key, value);
    } else if (key == "mcmc.burn_in") {
      m.burn_in = to_size(key, value);
    } else if (key == "mcmc.alpha") {
      m.alpha = to_double(key, value);
    } else if (key == "mcmc.beta") {
      m.beta = to_double(key, value);
    } else if (key == "mcmc.k") {
      m.k = to_double(key, value);
    } else if (key == "mcmc.nu") {
      m.nu = to_double(key, value);
    } else if (key == "mcmc.q") {
      m.q = to_double(key, value);
    } else if (key == "mcmc.num_cutpoints") {
      m.num_cutpoints = to_size(key, value);
    } else if (key == "mcmc.min_leaf_size") {
      m.min_leaf_size = to_size(key, value);
    } else if (key == "search.stage1_trees") {
      s.stage1_trees = to_size(key, value);
    } else if (key == "search.stage2_trees") {
      s.stage2_trees = to_size(key, value);
    } else if (key == "search.val_fraction") {
      s.val_fraction = to_double(key, value);
    } else if (key == "search.max_rounds") {
      s.max_rounds = to_size(key, value);
    } else if (key == "search.enabled") {
      s.enabled = to_bool(key, value);
    } else if (key == "search.stage1_ndpost") {
      stage1_ndpost = to_size(key, value);
    } else if (key == "search.stage1_burn_in") {
      stage1_burn_in = to_size(key, value);
    } else {
      throw InvalidConfig("plan line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (stage1_ndpost || stage1_burn_in) {
    McmcConfig stage1 = plan.mcmc;
    if (stage1_ndpost) stage1.ndpost = *stage1_ndpost;
    if (stage1_burn_in) stage1.burn_in = *stage1_burn_in;
    plan.search.stage1_mcmc = stage1;
  }
  plan.validate();
  return plan;
}

BenchmarkPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open plan " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plan(buffer.str());
}

std::pair<double, double> summarize(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double r = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / r;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (r - 1.0)) / std::sqrt(r)};
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string ResultTable::to_csv() const {
  std::string out = "dataset,method,mean_mse,std_err,replications,wall_time_s\n";
  for (const auto& r : rows) {
    out += r.dataset + "," + method_name(r.method) + "," + fmt(r.mean_mse) + "," + fmt(r.std_err) +
           "," + std::to_string(r.mses.size()) + "," + fmt(r.wall_time_s) + "\n";
  }
  return out;
}

std::string ResultTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"dataset", r.dataset},
                         {"method", method_name(r.method)},
                         {"mean_mse", r.mean_mse},
                         {"std_err", r.std_err},
                         {"replications", r.mses.size()},
                         {"mses", r.mses},
                         {"wall_time_s", r.wall_time_s}});
  }
  return nlohmann::json{{"rows", rows_json}}.dump(2) + "\n";
}

double evaluate_method(const Dataset& data, Method method, std::size_t folds,
                       const McmcConfig& mcmc, const GroupSearchConfig& search,
                       std::uint64_t fold_seed, std::uint64_t fit_seed) {
  const FoldSpec spec = kfold_split(data.n(), folds, fold_seed);
  double sse = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    const auto train_rows = spec.other_rows(f);
    const auto test_rows = spec.fold_rows(f);
    const Dataset train = data.subset(train_rows);
    const Dataset test = data.subset(test_rows);
    const std::uint64_t seed = derive_seed(fit_seed, {f});
    FitResult fit = method == Method::Gbart
                        ? gbart_fit(train, search, mcmc, seed).fit
                        : fit_grouped(train, Partition::trivial(train.p()), search.stage2_trees,
                                      mcmc, seed);
    sse += validation_mse(fit, test) * static_cast<double>(test.n());
  }
  return sse / static_cast<double>(data.n());
}

double evaluate_method(const Dataset& data, Method method, std::size_t folds,
                       const McmcConfig& mcmc, const GroupSearchConfig& search,
                       std::uint64_t seed) {
  return evaluate_method(data, method, folds, mcmc, search, seed, seed);
}

CellSeeds cell_seeds(std::uint64_t master_seed, const std::string& dataset_id, Method method,
                     std::size_t replication) {
  const std::uint64_t d = label_hash(dataset_id);
  const std::uint64_t rep = replication;
  return {derive_seed(master_seed, {d, rep, label_hash("data")}),
          derive_seed(master_seed, {d, rep, label_hash("folds")}),
          derive_seed(master_seed, {d, rep, label_hash(method_name(method))})};
}

ResultTable run_benchmark(const BenchmarkPlan& plan) {
  plan.validate();
  if (plan.replications == 1) {
    std::cerr << "warning: one replication per cell; standard errors are reported as 0\n";
  }
  // Real datasets are loaded once and shared read-only.
  std::map<std::string, Dataset> loaded;
  for (const auto& d : plan.datasets) {
    if (d.kind == DatasetSpec::Kind::Csv && !loaded.count(d.id())) {
      loaded.emplace(d.id(), load_csv(d.path, d.target, d.drop));
    }
  }

  struct Cell {
    std::size_t dataset;
    std::size_t method;
    std::size_t rep;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      for (std::size_t r = 0; r < plan.replications; ++r) cells.push_back({d, m, r});
    }
  }
  std::vector<double> mse(cells.size());
  std::vector<double> seconds(cells.size());
  parallel_for(cells.size(), plan.workers, [&](std::size_t c) {
    const auto start = std::chrono::steady_clock::now();
    const DatasetSpec& spec = plan.datasets[cells[c].dataset];
    const Method method = plan.methods[cells[c].method];
    const CellSeeds seeds = cell_seeds(plan.master_seed, spec.id(), method, cells[c].rep);
    try {
      if (spec.kind == DatasetSpec::Kind::Synthetic) {
        const Dataset data = generate_synthetic(spec.case_id, spec.n, seeds.data);
        mse[c] = evaluate_method(data, method, plan.folds, plan.mcmc, plan.search, seeds.folds,
                                 seeds.fit);
      } else {
        mse[c] = evaluate_method(loaded.at(spec.id()), method, plan.folds, plan.mcmc, plan.search,
                                 seeds.folds, seeds.fit);
      }
    } catch (const Error& e) {
      throw Error(spec.id() + " / " + method_name(method) + " / replication " +
                  std::to_string(cells[c].rep) + ": " + e.what());
    }
    seconds[c] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  ResultTable table;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      ResultRow row;
      row.dataset = plan.datasets[d].id();
      row.method = plan.methods[m];
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].dataset != d || cells[c].method != m) continue;
        row.mses.push_back(mse[c]);
        if (plan.record_time) row.wall_time_s += seconds[c];
      }
      std::tie(row.mean_mse, row.std_err) = summarize(row.mses);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace gbart
