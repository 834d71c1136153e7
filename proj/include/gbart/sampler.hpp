#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gbart/data.hpp"
#include "gbart/partition.hpp"
#include "gbart/rng.hpp"
#include "gbart/tree.hpp"

namespace gbart {

struct ProposalProbs {
  double grow = 0.3;
  double prune = 0.3;
  double change = 0.4;

  bool operator==(const ProposalProbs&) const = default;
};

/// Settings for one back-fitting chain. Defaults are the usual BART choices.
struct McmcConfig {
  std::size_t num_trees = 200;
  std::size_t ndpost = 1000;
  std::size_t burn_in = 100;
  double alpha = 0.95;  // P(split at depth d) = alpha * (1 + d)^-beta
  double beta = 2.0;
  double k = 2.0;       // leaf prior sd = 0.5 / (k * sqrt(num_trees))
  double nu = 3.0;
  double q = 0.90;
  std::size_t num_cutpoints = 100;
  ProposalProbs proposal_probs;
  std::size_t min_leaf_size = 5;
  /// Pins sigma (scaled units) and skips its update. Used to run the chain
  /// against the tree prior alone.
  std::optional<double> fixed_sigma;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;

  bool operator==(const McmcConfig&) const = default;
};

/// Affine map of the response onto [-0.5, 0.5].
struct ResponseTransform {
  double y_min = -0.5;
  double y_max = 0.5;

  double scale(double y) const { return (y - y_min) / (y_max - y_min) - 0.5; }
  double unscale(double s) const { return y_min + (s + 0.5) * (y_max - y_min); }

  bool operator==(const ResponseTransform&) const = default;
};

/// Throws DegenerateResponse when y has fewer than two distinct values.
std::pair<std::vector<double>, ResponseTransform> scale_response(std::span<const double> y);

/// One posterior draw of the sum-of-trees model.
struct Ensemble {
  std::vector<RegressionTree> trees;
  double sigma = 1.0;  // scaled units

  /// Sum of tree outputs in scaled units; no input validation.
  double sum(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.node(t.find_leaf(x)).value;
    return s;
  }

  bool operator==(const Ensemble&) const = default;
};

enum class MoveKind { Grow = 0, Prune = 1, Change = 2 };

/// Acceptance counters, indexed by MoveKind.
struct MoveStats {
  std::array<std::size_t, 3> proposed{};
  std::array<std::size_t, 3> accepted{};
  std::array<std::size_t, 3> impossible{};  // no node of the required shape
  std::array<std::size_t, 3> too_small{};   // a leaf would fall below min_leaf_size

  bool operator==(const MoveStats&) const = default;
};

/// Retained posterior draws plus everything needed to predict with them.
struct FitResult {
  std::vector<Ensemble> snapshots;
  ResponseTransform transform;
  Partition partition;
  McmcConfig config;
  std::uint64_t seed = 0;
  MoveStats stats;

  bool operator==(const FitResult&) const = default;
};

/// Sufficient statistics of residuals falling in one leaf.
struct LeafStats {
  std::size_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double r) {
    ++n;
    sum += r;
    sumsq += r * r;
  }
};

/// log of the integral over mu of prod_i N(r_i; mu, sigma^2) * N(mu; 0, sigma_mu^2).
double leaf_log_marginal(std::size_t n, double sum, double sumsq, double sigma, double sigma_mu);

/// Draws one leaf value from its conjugate normal posterior.
double sample_leaf_value(std::size_t n, double sum, double sigma, double sigma_mu, Rng& rng);

/// Redraws every leaf of the tree. stats is indexed by node id.
RegressionTree sample_leaf_values(const RegressionTree& tree, std::span<const LeafStats> stats,
                                  double sigma, double sigma_mu, Rng& rng);

/// sqrt of a draw of sigma^2 ~ (nu * lambda + sse) / chi^2(nu + n).
double sample_sigma(double sse, std::size_t n, double nu, double lambda, Rng& rng);

/// Scaled response, column-major predictors, cutpoint grids and calibrated
/// prior constants for one chain.
struct TrainingData {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> columns;
  std::vector<double> y;
  std::vector<std::vector<double>> cutpoints;
  ResponseTransform transform;
  double sigma_hat = 1.0;
  double sigma_mu = 1.0;
  double lambda = 1.0;

  double x(std::size_t i, int variable) const {
    return columns[static_cast<std::size_t>(variable) * n + i];
  }

  /// Leaf reached by observation i starting from node start.
  int route(const RegressionTree& tree, std::size_t i, int start = 0) const {
    const auto& nodes = tree.nodes();
    int id = start;
    while (nodes[id].left >= 0) {
      const auto& node = nodes[id];
      id = x(i, node.variable) <= node.threshold ? node.left : node.right;
    }
    return id;
  }
};

/// Validates the data, scales the response and calibrates the priors.
/// Throws DegenerateResponse for a constant response.
TrainingData prepare_training(const Dataset& data, const McmcConfig& config);

/// num_cutpoints values evenly spaced strictly inside [min, max] of a column.
std::vector<double> make_cutpoints(std::span<const double> column, std::size_t num_cutpoints);

/// Running state of the back-fitting chain.
struct ChainState {
  std::vector<RegressionTree> trees;
  double sigma = 1.0;
  std::vector<double> fit;                // sum of tree outputs per observation
  std::vector<std::vector<int>> leaf_of;  // leaf id per tree per observation

  // Workspace reused across updates.
  std::vector<double> residual;
  std::vector<LeafStats> leaf_stats;
  std::vector<int> scratch_leaf;
};

ChainState initial_state(const TrainingData& data, std::vector<RegressionTree> trees,
                         double sigma);

/// One Metropolis-Hastings structural update of tree b followed by a Gibbs
/// redraw of its leaves. Returns the proposed move kind.
MoveKind mh_tree_update(std::size_t b, ChainState& state, const TrainingData& data,
                        const McmcConfig& config, Rng& rng, MoveStats& stats);

/// Updates every tree in order, then sigma (unless pinned).
void sweep(ChainState& state, const TrainingData& data, const McmcConfig& config, Rng& rng,
           MoveStats& stats);

/// Largest absolute gap between the cached fit and a fresh recomputation.
double audit_fit(const ChainState& state, const TrainingData& data);

/// Runs burn_in + ndpost sweeps from the given trees and keeps one snapshot per
/// post-burn-in sweep. The result's partition is trivial; callers that grouped
/// the trees overwrite it.
FitResult run_chain(const Dataset& data, std::vector<RegressionTree> trees,
                    const McmcConfig& config, Rng& rng);
FitResult run_chain(const Dataset& data, std::vector<RegressionTree> trees,
                    const McmcConfig& config, std::uint64_t seed);

/// Posterior-mean prediction on the original response scale.
/// Throws InvalidInput when X does not have the fitted predictor count.
std::vector<double> predict(const FitResult& fit, const Matrix& X);

}  // namespace gbart
