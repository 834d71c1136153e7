#include "gbart/grouping.hpp"

#include <algorithm>
#include <numeric>

#include "gbart/errors.hpp"
#include "gbart/parallel.hpp"

namespace gbart {

void GroupSearchConfig::validate() const {
  if (stage1_trees == 0 || stage2_trees == 0) throw InvalidConfig("search: tree counts must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw InvalidConfig("search: val_fraction must lie in (0, 1)");
  }
  if (max_rounds == 0) throw InvalidConfig("search: max_rounds must be positive");
  if (stage1_mcmc) stage1_mcmc->validate();
}

namespace {

std::vector<RegressionTree> assign_groups(const Partition& partition, std::size_t num_trees,
                                          Rng& rng) {
  std::vector<RegressionTree> trees;
  trees.reserve(num_trees);
  for (std::size_t b = 0; b < num_trees; ++b) {
    const auto& group = partition.groups()[rng.index(partition.num_groups())];
    trees.emplace_back(group);
  }
  return trees;
}

FitResult fit_with_trees(const Dataset& train, const Partition& partition,
                         std::vector<RegressionTree> trees, const McmcConfig& mcmc, Rng& rng,
                         std::uint64_t seed) {
  FitResult out;
  train.validate();
  const auto [lo, hi] = std::minmax_element(train.y.begin(), train.y.end());
  if (*lo == *hi) {
    // Constant response: every snapshot is a set of zero stumps and the
    // transform maps scaled 0 back onto the constant.
    mcmc.validate();
    out.transform = ResponseTransform{*lo - 0.5, *lo + 0.5};
    out.config = mcmc;
    out.config.num_trees = trees.size();
    out.snapshots.assign(mcmc.ndpost, Ensemble{trees, 1.0});
  } else {
    McmcConfig cfg = mcmc;
    cfg.num_trees = trees.size();
    out = run_chain(train, std::move(trees), cfg, rng);
  }
  out.partition = partition;
  out.seed = seed;
  return out;
}

}  // namespace

FitResult fit_grouped(const Dataset& train, const Partition& partition, std::size_t num_trees,
                      const McmcConfig& mcmc, std::uint64_t seed) {
  if (partition.num_predictors() != train.p()) {
    throw InvalidPartition("partition covers " + std::to_string(partition.num_predictors()) +
                           " predictors but the data has " + std::to_string(train.p()));
  }
  Rng rng(seed);
  auto trees = assign_groups(partition, num_trees, rng);
  return fit_with_trees(train, partition, std::move(trees), mcmc, rng, seed);
}

FitResult fit_ungrouped(const Dataset& train, std::size_t num_trees, const McmcConfig& mcmc,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> all(train.p());
  std::iota(all.begin(), all.end(), 0);
  std::vector<RegressionTree> trees;
  trees.reserve(num_trees);
  for (std::size_t b = 0; b < num_trees; ++b) {
    rng.index(1);  // the group draw of fit_grouped, with a single group
    trees.emplace_back(all);
  }
  return fit_with_trees(train, Partition::trivial(train.p()), std::move(trees), mcmc, rng, seed);
}

double validation_mse(const FitResult& fit, const Dataset& data) {
  const std::vector<double> pred = predict(fit, data.X);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += (pred[i] - data.y[i]) * (pred[i] - data.y[i]);
  return total / static_cast<double>(pred.size());
}

namespace {

using Groups = std::vector<std::vector<int>>;

Partition build(const Groups& accepted, std::initializer_list<std::vector<int>> extra,
                std::size_t p) {
  Groups groups = accepted;
  for (const auto& g : extra) {
    if (!g.empty()) groups.push_back(g);
  }
  return Partition(std::move(groups), p);
}

std::vector<int> without(const std::vector<int>& set, std::initializer_list<int> drop) {
  std::vector<int> out;
  for (int v : set) {
    if (std::find(drop.begin(), drop.end(), v) == drop.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

std::pair<Partition, SearchTrace> isg_search(const Dataset& data, const GroupSearchConfig& cfg,
                                             std::uint64_t seed) {
  cfg.validate();
  data.validate();
  const std::size_t p = data.p();
  if (p < 2) throw InvalidInput("interaction search needs at least two predictors");
  if (data.n() < 20) {
    throw InsufficientData("interaction search needs at least 20 observations, got " +
                           std::to_string(data.n()));
  }
  const McmcConfig mcmc = cfg.stage1_mcmc.value_or(McmcConfig{});
  const auto [train, val] = train_val_split(data, cfg.val_fraction, derive_seed(seed, {label_hash("split")}));

  Groups accepted;
  std::vector<int> remaining(p);
  std::iota(remaining.begin(), remaining.end(), 0);
  SearchTrace trace;

  const auto score = [&](const Partition& partition, std::size_t round, std::size_t candidate) {
    const auto fit = fit_grouped(train, partition, cfg.stage1_trees, mcmc,
                                 derive_seed(seed, {round, candidate}));
    return validation_mse(fit, val);
  };

  for (std::size_t round = 1; remaining.size() > 1 && round <= cfg.max_rounds; ++round) {
    SearchRound rec;
    rec.round = round;

    // Benchmark plus one candidate per isolated variable.
    std::vector<Partition> first;
    first.push_back(build(accepted, {remaining}, p));
    for (int i : remaining) first.push_back(build(accepted, {{i}, without(remaining, {i})}, p));
    std::vector<double> first_err(first.size());
    parallel_for(first.size(), cfg.workers, [&](std::size_t c) {
      const std::size_t id = c == 0 ? 0 : 1 + static_cast<std::size_t>(remaining[c - 1]);
      first_err[c] = score(first[c], round, id);
    });
    rec.e0 = first_err[0];
    for (std::size_t c = 0; c < remaining.size(); ++c) rec.ei[remaining[c]] = first_err[c + 1];
    // argmax with ties to the first variable
    std::size_t best = 0;
    for (std::size_t c = 1; c < remaining.size(); ++c) {
      if (first_err[c + 1] > first_err[best + 1]) best = c;
    }
    rec.i_star = remaining[best];

    std::vector<int> partners = without(remaining, {rec.i_star});
    std::vector<Partition> second;
    for (int k : partners) {
      second.push_back(build(accepted, {{rec.i_star, k}, without(remaining, {rec.i_star, k})}, p));
    }
    std::vector<double> second_err(second.size());
    parallel_for(second.size(), cfg.workers, [&](std::size_t c) {
      second_err[c] = score(second[c], round, 1 + p + static_cast<std::size_t>(partners[c]));
    });
    std::size_t pick = 0;
    for (std::size_t c = 0; c < partners.size(); ++c) {
      rec.ek[partners[c]] = second_err[c];
      if (second_err[c] < second_err[pick]) pick = c;
    }
    rec.k_star = partners[pick];
    rec.accepted = second_err[pick] < rec.e0;
    trace.rounds.push_back(rec);
    if (!rec.accepted) break;
    std::vector<int> pair{rec.i_star, rec.k_star};
    std::sort(pair.begin(), pair.end());
    accepted.push_back(pair);
    remaining = without(remaining, {rec.i_star, rec.k_star});
  }
  if (!remaining.empty()) accepted.push_back(remaining);
  return {Partition(std::move(accepted), p), std::move(trace)};
}

std::uint64_t search_seed(std::uint64_t seed) { return derive_seed(seed, {label_hash("search")}); }

GbartResult gbart_fit(const Dataset& data, const GroupSearchConfig& cfg, const McmcConfig& mcmc,
                      std::uint64_t seed) {
  GbartResult out;
  if (cfg.enabled) {
    GroupSearchConfig search = cfg;
    if (!search.stage1_mcmc) search.stage1_mcmc = mcmc;
    auto [partition, trace] = isg_search(data, search, search_seed(seed));
    out.partition = std::move(partition);
    out.trace = std::move(trace);
  } else {
    out.partition = Partition::trivial(data.p());
  }
  out.fit = fit_grouped(data, out.partition, cfg.stage2_trees, mcmc, seed);
  return out;
}

}  // namespace gbart
