#include "gbart/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gbart/errors.hpp"

namespace gbart {

namespace {

Json node_to_json(const RegressionTree& tree, int id) {
  const auto& n = tree.node(id);
  if (n.is_leaf()) return Json{{"mu", n.value}};
  Json out;
  out["var"] = n.variable;
  out["cut"] = n.threshold;
  out["left"] = node_to_json(tree, n.left);
  out["right"] = node_to_json(tree, n.right);
  return out;
}

void grow_from_json(RegressionTree& tree, int id, const Json& j) {
  if (j.contains("mu")) {
    tree.set_value(id, j.at("mu").get<double>());
    return;
  }
  if (!j.contains("var") || !j.contains("cut") || !j.contains("left") || !j.contains("right")) {
    throw SchemaError("tree node needs either 'mu' or 'var', 'cut', 'left', 'right'");
  }
  const SplitRule rule{j.at("var").get<int>(), j.at("cut").get<double>()};
  tree = apply_move(tree, GrowMove{id, rule, 0.0, 0.0});
  const auto& n = tree.node(id);
  const int left = n.left;
  const int right = n.right;
  grow_from_json(tree, left, j.at("left"));
  grow_from_json(tree, right, j.at("right"));
}

}  // namespace

Json tree_to_json(const RegressionTree& tree) {
  Json out = node_to_json(tree, 0);
  out["group"] = tree.group();
  return out;
}

RegressionTree tree_from_json(const Json& j) {
  try {
    RegressionTree tree(j.at("group").get<std::vector<int>>());
    grow_from_json(tree, 0, j);
    return tree;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed tree: ") + e.what());
  }
}

Json partition_to_json(const Partition& partition) { return Json(partition.groups()); }

Partition partition_from_json(const Json& j, std::size_t p) {
  try {
    return Partition(j.get<std::vector<std::vector<int>>>(), p);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed partition: ") + e.what());
  }
}

Partition partition_from_json(const Json& j) {
  int largest = -1;
  try {
    for (const auto& g : j.get<std::vector<std::vector<int>>>()) {
      for (int v : g) largest = std::max(largest, v);
    }
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed partition: ") + e.what());
  }
  return partition_from_json(j, static_cast<std::size_t>(largest + 1));
}

Json config_to_json(const McmcConfig& c) {
  Json out;
  out["num_trees"] = c.num_trees;
  out["ndpost"] = c.ndpost;
  out["burn_in"] = c.burn_in;
  out["alpha"] = c.alpha;
  out["beta"] = c.beta;
  out["k"] = c.k;
  out["nu"] = c.nu;
  out["q"] = c.q;
  out["num_cutpoints"] = c.num_cutpoints;
  out["proposal_probs"] = {c.proposal_probs.grow, c.proposal_probs.prune, c.proposal_probs.change};
  out["min_leaf_size"] = c.min_leaf_size;
  out["fixed_sigma"] = c.fixed_sigma ? Json(*c.fixed_sigma) : Json(nullptr);
  return out;
}

McmcConfig config_from_json(const Json& j) {
  McmcConfig c;
  try {
    c.num_trees = j.at("num_trees").get<std::size_t>();
    c.ndpost = j.at("ndpost").get<std::size_t>();
    c.burn_in = j.at("burn_in").get<std::size_t>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.k = j.at("k").get<double>();
    c.nu = j.at("nu").get<double>();
    c.q = j.at("q").get<double>();
    c.num_cutpoints = j.at("num_cutpoints").get<std::size_t>();
    const auto probs = j.at("proposal_probs").get<std::vector<double>>();
    if (probs.size() != 3) throw SchemaError("proposal_probs needs three entries");
    c.proposal_probs = {probs[0], probs[1], probs[2]};
    c.min_leaf_size = j.value("min_leaf_size", c.min_leaf_size);
    if (j.contains("fixed_sigma") && !j.at("fixed_sigma").is_null()) {
      c.fixed_sigma = j.at("fixed_sigma").get<double>();
    }
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

Json model_to_json(const FitResult& fit) {
  Json out;
  out["transform"] = {{"y_min", fit.transform.y_min}, {"y_max", fit.transform.y_max}};
  out["partition"] = partition_to_json(fit.partition);
  out["config"] = config_to_json(fit.config);
  out["seed"] = fit.seed;
  Json snapshots = Json::array();
  Json sigmas = Json::array();
  for (const auto& e : fit.snapshots) {
    Json trees = Json::array();
    for (const auto& t : e.trees) trees.push_back(tree_to_json(t));
    snapshots.push_back(std::move(trees));
    sigmas.push_back(e.sigma);
  }
  out["snapshots"] = std::move(snapshots);
  out["sigmas"] = std::move(sigmas);
  return out;
}

FitResult model_from_json(const Json& j) {
  FitResult fit;
  try {
    fit.transform.y_min = j.at("transform").at("y_min").get<double>();
    fit.transform.y_max = j.at("transform").at("y_max").get<double>();
    fit.config = config_from_json(j.at("config"));
    fit.seed = j.at("seed").get<std::uint64_t>();
    fit.partition = partition_from_json(j.at("partition"));
    const auto& snapshots = j.at("snapshots");
    const auto& sigmas = j.at("sigmas");
    if (snapshots.size() != sigmas.size()) {
      throw SchemaError("model has " + std::to_string(snapshots.size()) + " snapshots but " +
                        std::to_string(sigmas.size()) + " sigmas");
    }
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
      Ensemble e;
      e.sigma = sigmas.at(s).get<double>();
      for (const auto& t : snapshots.at(s)) e.trees.push_back(tree_from_json(t));
      fit.snapshots.push_back(std::move(e));
    }
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  }
  if (!(fit.transform.y_max > fit.transform.y_min)) {
    throw SchemaError("model transform needs y_max > y_min");
  }
  return fit;
}

Json round_to_json(const SearchRound& r) {
  Json ei = Json::object();
  for (const auto& [var, err] : r.ei) ei[std::to_string(var)] = err;
  Json ek = Json::object();
  for (const auto& [var, err] : r.ek) ek[std::to_string(var)] = err;
  return Json{{"round", r.round}, {"e0", r.e0},         {"ei", ei},
              {"i_star", r.i_star}, {"ek", ek},         {"k_star", r.k_star},
              {"accepted", r.accepted}};
}

std::string trace_to_jsonl(const SearchTrace& trace) {
  std::string out;
  for (const auto& r : trace.rounds) out += round_to_json(r).dump() + "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

}  // namespace gbart
