#pragma once

#include <string>

#include <json.hpp>

#include "gbart/grouping.hpp"
#include "gbart/partition.hpp"
#include "gbart/sampler.hpp"
#include "gbart/tree.hpp"

namespace gbart {

using Json = nlohmann::json;

// Trees nest as {"var", "cut", "left", "right"} for splits and {"mu"} for
// leaves; the root object also carries "group".
Json tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const Json& j);

Json partition_to_json(const Partition& partition);
Partition partition_from_json(const Json& j, std::size_t p);
/// Infers p as one plus the largest index.
Partition partition_from_json(const Json& j);

Json config_to_json(const McmcConfig& config);
McmcConfig config_from_json(const Json& j);

/// Model file: transform, partition, config, seed, snapshots and sigmas
/// (sigmas in scaled units).
Json model_to_json(const FitResult& fit);
FitResult model_from_json(const Json& j);

Json round_to_json(const SearchRound& round);
/// One JSON object per line, one line per round.
std::string trace_to_jsonl(const SearchTrace& trace);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gbart
