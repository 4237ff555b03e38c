#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "marketsim/algorithms.hpp"
#include "marketsim/core.hpp"
#include "marketsim/oracle.hpp"
#include "marketsim/prefgen.hpp"

namespace marketsim {

using nlohmann::json;

// {"format": 1, "men": [[...]], "women": [[...]]}; every writer stamps the
// format field, readers tolerate its absence
json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

json matching_to_json(const Matching& mu);  // partner arrays, -1 for single

json trace_to_json(const ProposalTrace& trace);  // [{"proposer","target","answer"}]

json blocks_to_json(const BlockDecomposition& d);  // {"separators","relabel","virtual"}

json husbands_to_json(const HusbandEnumeration& e);

json stable_set_to_json(const StableSet& s);

json descriptor_to_json(const ModelDescriptor& d);

// single-person weights: {"weights": [...]} or {"log_weights": [...]},
// optional "support" (defaults to 0..len-1); sorted by support on load
PopularityList weights_from_json(const json& j);

// two-sided weights: {"women": [row per woman], "men": [row per man]?};
// a row is a linear-weight array, [] meaning "no weights, uniform list"
PopularityModel weight_model_from_json(const json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

json parse_json_file(const std::string& path);

// shortest round-trip decimal form, locale-independent
std::string format_double(double v);

std::string csv_header(const std::vector<std::string>& columns);
std::string csv_row(const std::vector<double>& row);
void write_csv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows);

}  // namespace marketsim
