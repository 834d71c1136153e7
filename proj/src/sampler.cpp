#include "gbart/sampler.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gbart/errors.hpp"
#include "gbart/kernels.hpp"

namespace gbart {

void McmcConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig("mcmc: " + what); };
  if (num_trees == 0) fail("num_trees must be positive");
  if (ndpost == 0) fail("ndpost must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(beta >= 0.0)) fail("beta must be non-negative");
  if (!(k > 0.0)) fail("k must be positive");
  if (!(nu > 0.0)) fail("nu must be positive");
  if (!(q > 0.0 && q < 1.0)) fail("q must lie in (0, 1)");
  if (num_cutpoints == 0) fail("num_cutpoints must be positive");
  const auto& pp = proposal_probs;
  if (pp.grow < 0.0 || pp.prune < 0.0 || pp.change < 0.0 ||
      std::abs(pp.grow + pp.prune + pp.change - 1.0) > 1e-12) {
    fail("proposal probabilities must be non-negative and sum to 1");
  }
  if (fixed_sigma && !(*fixed_sigma > 0.0 && std::isfinite(*fixed_sigma))) {
    fail("fixed sigma must be positive and finite");
  }
}

std::pair<std::vector<double>, ResponseTransform> scale_response(std::span<const double> y) {
  if (y.empty()) throw DegenerateResponse("empty response");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (!(*hi > *lo)) throw DegenerateResponse("response is constant");
  ResponseTransform t{*lo, *hi};
  std::vector<double> out(y.size());
  std::transform(y.begin(), y.end(), out.begin(), [&](double v) { return t.scale(v); });
  return {std::move(out), t};
}

double leaf_log_marginal(std::size_t n, double sum, double sumsq, double sigma, double sigma_mu) {
  if (n == 0) return 0.0;
  const double nd = static_cast<double>(n);
  const double s2 = sigma * sigma;
  const double m2 = sigma_mu * sigma_mu;
  const double denom = s2 + nd * m2;
  return -0.5 * nd * std::log(2.0 * std::numbers::pi * s2) + 0.5 * std::log(s2 / denom) -
         sumsq / (2.0 * s2) + m2 * sum * sum / (2.0 * s2 * denom);
}

double sample_leaf_value(std::size_t n, double sum, double sigma, double sigma_mu, Rng& rng) {
  const double precision = static_cast<double>(n) + (sigma * sigma) / (sigma_mu * sigma_mu);
  return sum / precision + sigma / std::sqrt(precision) * rng.normal();
}

RegressionTree sample_leaf_values(const RegressionTree& tree, std::span<const LeafStats> stats,
                                  double sigma, double sigma_mu, Rng& rng) {
  RegressionTree out = tree;
  for (std::size_t id = 0; id < tree.size(); ++id) {
    if (!tree.nodes()[id].is_leaf()) continue;
    const LeafStats& s = stats[id];
    out.set_value(static_cast<int>(id), sample_leaf_value(s.n, s.sum, sigma, sigma_mu, rng));
  }
  return out;
}

double sample_sigma(double sse, std::size_t n, double nu, double lambda, Rng& rng) {
  const double draw = rng.chi_squared(nu + static_cast<double>(n));
  return std::sqrt((nu * lambda + sse) / draw);
}

std::vector<double> make_cutpoints(std::span<const double> column, std::size_t num_cutpoints) {
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  std::vector<double> cuts(num_cutpoints);
  const double step = (*hi - *lo) / static_cast<double>(num_cutpoints + 1);
  for (std::size_t c = 0; c < num_cutpoints; ++c) {
    cuts[c] = *lo + static_cast<double>(c + 1) * step;
  }
  return cuts;
}

TrainingData prepare_training(const Dataset& data, const McmcConfig& config) {
  data.validate();
  config.validate();
  TrainingData out;
  out.n = data.n();
  out.p = data.p();
  auto [scaled, transform] = scale_response(data.y);
  out.y = std::move(scaled);
  out.transform = transform;
  out.columns.resize(out.n * out.p);
  for (std::size_t i = 0; i < out.n; ++i) {
    for (std::size_t j = 0; j < out.p; ++j) out.columns[j * out.n + i] = data.X(i, j);
  }
  out.cutpoints.reserve(out.p);
  for (std::size_t j = 0; j < out.p; ++j) {
    out.cutpoints.push_back(make_cutpoints(
        std::span<const double>(out.columns).subspan(j * out.n, out.n), config.num_cutpoints));
  }

  double mean = 0.0;
  for (double v : out.y) mean += v;
  mean /= static_cast<double>(out.n);
  double ss = 0.0;
  for (double v : out.y) ss += (v - mean) * (v - mean);
  out.sigma_hat = out.n > 1 ? std::sqrt(ss / static_cast<double>(out.n - 1)) : 0.5;
  out.sigma_mu = 0.5 / (config.k * std::sqrt(static_cast<double>(config.num_trees)));
  // Put prior mass q on sigma < sigma_hat.
  const boost::math::chi_squared chi(config.nu);
  const double quantile = boost::math::quantile(chi, 1.0 - config.q);
  out.lambda = out.sigma_hat * out.sigma_hat * quantile / config.nu;
  return out;
}

ChainState initial_state(const TrainingData& data, std::vector<RegressionTree> trees,
                         double sigma) {
  ChainState state;
  state.trees = std::move(trees);
  state.sigma = sigma;
  state.fit.assign(data.n, 0.0);
  state.leaf_of.resize(state.trees.size());
  for (std::size_t b = 0; b < state.trees.size(); ++b) {
    auto& leaf_of = state.leaf_of[b];
    leaf_of.resize(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
      leaf_of[i] = data.route(state.trees[b], i);
      state.fit[i] += state.trees[b].node(leaf_of[i]).value;
    }
  }
  state.residual.resize(data.n);
  state.scratch_leaf.resize(data.n);
  return state;
}

namespace {

double split_prob(const McmcConfig& c, int depth) {
  return c.alpha * std::pow(1.0 + depth, -c.beta);
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

SplitRule draw_rule(const RegressionTree& tree, const TrainingData& data, Rng& rng) {
  const auto& group = tree.group();
  const int variable = group[rng.index(group.size())];
  const auto& cuts = data.cutpoints[static_cast<std::size_t>(variable)];
  return {variable, cuts[rng.index(cuts.size())]};
}

MoveKind draw_kind(const ProposalProbs& pp, Rng& rng) {
  const double u = rng.uniform();
  if (u < pp.grow) return MoveKind::Grow;
  if (u < pp.grow + pp.prune) return MoveKind::Prune;
  return MoveKind::Change;
}

}  // namespace

MoveKind mh_tree_update(std::size_t b, ChainState& state, const TrainingData& data,
                        const McmcConfig& config, Rng& rng, MoveStats& stats) {
  const RegressionTree& tree = state.trees[b];
  std::vector<int>& leaf_of = state.leaf_of[b];
  std::vector<double>& r = state.residual;
  const std::size_t n = data.n;
  const double sigma = state.sigma;
  const double sigma_mu = data.sigma_mu;
  const auto& pp = config.proposal_probs;

  {
    const auto& nodes = tree.nodes();
    for (std::size_t i = 0; i < n; ++i) r[i] = data.y[i] - state.fit[i] + nodes[leaf_of[i]].value;
  }

  const MoveKind kind = draw_kind(pp, rng);
  const auto k = static_cast<std::size_t>(kind);
  ++stats.proposed[k];

  std::optional<RegressionTree> proposal;
  double log_ratio = 0.0;
  const auto lm = [&](const LeafStats& s) {
    return leaf_log_marginal(s.n, s.sum, s.sumsq, sigma, sigma_mu);
  };

  switch (kind) {
    case MoveKind::Grow: {
      const std::vector<int> leaves = tree.leaves();
      const int leaf = leaves[rng.index(leaves.size())];
      const SplitRule rule = draw_rule(tree, data, rng);
      LeafStats left, right;
      for (std::size_t i = 0; i < n; ++i) {
        if (leaf_of[i] != leaf) continue;
        if (data.x(i, rule.variable) <= rule.threshold) {
          left.add(r[i]);
        } else {
          right.add(r[i]);
        }
      }
      if (left.n < config.min_leaf_size || right.n < config.min_leaf_size) {
        ++stats.too_small[k];
        break;
      }
      const double value = tree.node(leaf).value;
      proposal = apply_move(tree, GrowMove{leaf, rule, value, value});
      const int depth = tree.node(leaf).depth;
      const double p_here = split_prob(config, depth);
      const double p_child = split_prob(config, depth + 1);
      const LeafStats parent{left.n + right.n, left.sum + right.sum, left.sumsq + right.sumsq};
      log_ratio = std::log(p_here) + 2.0 * std::log1p(-p_child) - std::log1p(-p_here) +
                  safe_log(pp.prune) - safe_log(pp.grow) +
                  std::log(static_cast<double>(leaves.size())) -
                  std::log(static_cast<double>(proposal->prunable_nodes().size())) + lm(left) +
                  lm(right) - lm(parent);
      break;
    }
    case MoveKind::Prune: {
      const std::vector<int> prunable = tree.prunable_nodes();
      if (prunable.empty()) {
        ++stats.impossible[k];
        break;
      }
      const int id = prunable[rng.index(prunable.size())];
      const auto& node = tree.node(id);
      LeafStats left, right;
      for (std::size_t i = 0; i < n; ++i) {
        if (leaf_of[i] == node.left) {
          left.add(r[i]);
        } else if (leaf_of[i] == node.right) {
          right.add(r[i]);
        }
      }
      proposal = apply_move(tree, PruneMove{id, std::nullopt});
      const double p_here = split_prob(config, node.depth);
      const double p_child = split_prob(config, node.depth + 1);
      const LeafStats parent{left.n + right.n, left.sum + right.sum, left.sumsq + right.sumsq};
      log_ratio = std::log1p(-p_here) - std::log(p_here) - 2.0 * std::log1p(-p_child) +
                  safe_log(pp.grow) - safe_log(pp.prune) +
                  std::log(static_cast<double>(prunable.size())) -
                  std::log(static_cast<double>(proposal->num_leaves())) + lm(parent) - lm(left) -
                  lm(right);
      break;
    }
    case MoveKind::Change: {
      const std::vector<int> internal = tree.internal_nodes();
      if (internal.empty()) {
        ++stats.impossible[k];
        break;
      }
      const int id = internal[rng.index(internal.size())];
      const SplitRule rule = draw_rule(tree, data, rng);
      proposal = apply_move(tree, ChangeMove{id, rule});
      // Node ids are unchanged by CHANGE; mark the subtree below id.
      std::vector<char> below(tree.size(), 0);
      below[id] = 1;
      for (std::size_t j = static_cast<std::size_t>(id) + 1; j < tree.size(); ++j) {
        // Children are always created after their parent.
        const int parent = tree.nodes()[j].parent;
        if (parent >= 0 && below[parent]) below[j] = 1;
      }
      auto& old_stats = state.leaf_stats;
      old_stats.assign(tree.size(), LeafStats{});
      std::vector<LeafStats> new_stats(tree.size());
      auto& moved = state.scratch_leaf;
      for (std::size_t i = 0; i < n; ++i) {
        if (!below[leaf_of[i]]) continue;
        old_stats[leaf_of[i]].add(r[i]);
        const int to = data.route(*proposal, i, id);
        moved[i] = to;
        new_stats[to].add(r[i]);
      }
      bool ok = true;
      double delta = 0.0;
      for (std::size_t j = 0; j < tree.size(); ++j) {
        if (!below[j] || !tree.nodes()[j].is_leaf()) continue;
        if (new_stats[j].n < config.min_leaf_size) ok = false;
        delta += lm(new_stats[j]) - lm(old_stats[j]);
      }
      if (!ok) {
        ++stats.too_small[k];
        proposal.reset();
        break;
      }
      log_ratio = delta;
      break;
    }
  }

  if (proposal && std::log(rng.uniform()) < log_ratio) {
    ++stats.accepted[k];
    state.trees[b] = std::move(*proposal);
    for (std::size_t i = 0; i < n; ++i) leaf_of[i] = data.route(state.trees[b], i);
  }

  // Gibbs redraw of the leaf values and incremental refresh of the fit.
  const RegressionTree& current = state.trees[b];
  auto& leaf_stats = state.leaf_stats;
  leaf_stats.assign(current.size(), LeafStats{});
  for (std::size_t i = 0; i < n; ++i) {
    LeafStats& s = leaf_stats[leaf_of[i]];
    ++s.n;
    s.sum += r[i];
  }
  state.trees[b] = sample_leaf_values(current, leaf_stats, sigma, sigma_mu, rng);
  const auto& nodes = state.trees[b].nodes();
  for (std::size_t i = 0; i < n; ++i) state.fit[i] = data.y[i] - r[i] + nodes[leaf_of[i]].value;
  return kind;
}

void sweep(ChainState& state, const TrainingData& data, const McmcConfig& config, Rng& rng,
           MoveStats& stats) {
  for (std::size_t b = 0; b < state.trees.size(); ++b) {
    mh_tree_update(b, state, data, config, rng, stats);
  }
  if (config.fixed_sigma) {
    state.sigma = *config.fixed_sigma;
    return;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double e = data.y[i] - state.fit[i];
    sse += e * e;
  }
  state.sigma = sample_sigma(sse, data.n, config.nu, data.lambda, rng);
}

double audit_fit(const ChainState& state, const TrainingData& data) {
  double worst = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    double total = 0.0;
    for (const auto& tree : state.trees) total += tree.node(data.route(tree, i)).value;
    worst = std::max(worst, std::abs(total - state.fit[i]));
  }
  return worst;
}

FitResult run_chain(const Dataset& data, std::vector<RegressionTree> trees,
                    const McmcConfig& config, Rng& rng) {
  McmcConfig cfg = config;
  cfg.num_trees = trees.size();
  const TrainingData td = prepare_training(data, cfg);
  for (const auto& t : trees) {
    if (t.group().empty() || t.group().back() >= static_cast<int>(td.p) || t.group().front() < 0) {
      throw InvalidInput("tree group does not fit the predictor count");
    }
  }
  ChainState state = initial_state(td, std::move(trees), cfg.fixed_sigma.value_or(td.sigma_hat));

  FitResult out;
  out.transform = td.transform;
  out.partition = Partition::trivial(td.p);
  out.config = cfg;
  out.snapshots.reserve(cfg.ndpost);
  for (std::size_t s = 0; s < cfg.burn_in + cfg.ndpost; ++s) {
    sweep(state, td, cfg, rng, out.stats);
    if (s >= cfg.burn_in) out.snapshots.push_back(Ensemble{state.trees, state.sigma});
  }
  return out;
}

FitResult run_chain(const Dataset& data, std::vector<RegressionTree> trees,
                    const McmcConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  FitResult out = run_chain(data, std::move(trees), config, rng);
  out.seed = seed;
  return out;
}

std::vector<double> predict(const FitResult& fit, const Matrix& X) {
  return kernels::predict_parallel(fit, X);
}

}  // namespace gbart
