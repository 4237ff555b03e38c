#include "marketsim/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace marketsim {

namespace {

json lists_to_json(const std::vector<PreferenceList>& lists) {
    json out = json::array();
    for (const auto& list : lists) out.push_back(list.order);
    return out;
}

std::vector<PreferenceList> lists_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<PreferenceList> lists;
    lists.reserve(j.size());
    for (const auto& row : j) {
        if (!row.is_array())
            throw std::invalid_argument(std::string(what) + " entries must be arrays");
        PreferenceList list;
        list.order.reserve(row.size());
        for (const auto& v : row) {
            if (!v.is_number_integer())
                throw std::invalid_argument(std::string(what) + " entries must hold integers");
            list.order.push_back(v.get<std::int32_t>());
        }
        lists.push_back(std::move(list));
    }
    return lists;
}

const char* answer_name(Answer a) {
    switch (a) {
        case Answer::Rejected: return "rejected";
        case Answer::Accepted: return "accepted";
        case Answer::Displaced: return "displaced";
    }
    return "unknown";
}

}  // namespace

json instance_to_json(const Instance& inst) {
    return json{{"format", 1}, {"men", lists_to_json(inst.men)}, {"women", lists_to_json(inst.women)}};
}

Instance instance_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");
    if (!j.contains("men") || !j.contains("women"))
        throw std::invalid_argument("instance needs \"men\" and \"women\" arrays");
    Instance inst;
    inst.men = lists_from_json(j.at("men"), "men");
    inst.women = lists_from_json(j.at("women"), "women");
    std::vector<std::string> issues = validate_instance(inst);
    if (!issues.empty()) throw std::invalid_argument("invalid instance: " + issues.front());
    return inst;
}

json matching_to_json(const Matching& mu) {
    return json{{"format", 1}, {"men", mu.man_partners()}, {"women", mu.woman_partners()}};
}

json trace_to_json(const ProposalTrace& trace) {
    json out = json::array();
    for (const ProposalEvent& e : trace)
        out.push_back(json{{"proposer", e.proposer}, {"target", e.target}, {"answer", answer_name(e.answer)}});
    return out;
}

json blocks_to_json(const BlockDecomposition& d) {
    std::vector<std::int32_t> virtual_rows;
    for (std::size_t i = 0; i < d.virtual_row.size(); ++i)
        if (d.virtual_row[i]) virtual_rows.push_back(static_cast<std::int32_t>(i));
    return json{{"format", 1},
                {"separators", d.separators},
                {"relabel", d.relabel},
                {"virtual", virtual_rows}};
}

json husbands_to_json(const HusbandEnumeration& e) {
    return json{{"format", 1},
                {"woman", e.woman},
                {"husbands", e.husbands},
                {"proposals", e.proposals},
                {"initial_proposers", e.initial_proposers}};
}

json stable_set_to_json(const StableSet& s) {
    json matchings = json::array();
    for (const Matching& mu : s.all) matchings.push_back(mu.man_partners());
    return json{{"format", 1},
                {"count", s.all.size()},
                {"matchings", matchings},
                {"man_partners", s.man_partners},
                {"woman_partners", s.woman_partners},
                {"stable_pairs", count_stable_pairs(s)},
                {"multiplicity_fraction", multiplicity_fraction(s)}};
}

json descriptor_to_json(const ModelDescriptor& d) {
    json out{{"format", 1},
             {"model", d.model},
             {"M", d.num_men},
             {"W", d.num_women},
             {"params", json::object()}};
    for (const auto& [k, v] : d.params) out["params"][k] = v;
    if (d.seeded) out["seed"] = d.seed;
    return out;
}

PopularityList weights_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("weights must be a JSON object");
    PopularityList out;
    const bool linear = j.contains("weights");
    const bool logs = j.contains("log_weights");
    if (linear == logs)
        throw std::invalid_argument("weights need exactly one of \"weights\" or \"log_weights\"");
    const json& values = linear ? j.at("weights") : j.at("log_weights");
    if (!values.is_array() || values.empty())
        throw std::invalid_argument("weight values must be a nonempty array");
    for (const auto& v : values) {
        if (!v.is_number()) throw std::invalid_argument("weight values must be numbers");
        double x = v.get<double>();
        if (linear) {
            if (!(x > 0.0)) throw std::invalid_argument("weights must be positive");
            out.log_weight.push_back(std::log(x));
        } else {
            if (!std::isfinite(x)) throw std::invalid_argument("log weights must be finite");
            out.log_weight.push_back(x);
        }
    }
    if (j.contains("support")) {
        const json& support = j.at("support");
        if (!support.is_array() || support.size() != out.log_weight.size())
            throw std::invalid_argument("support must parallel the weights");
        for (const auto& v : support) out.support.push_back(v.get<std::int32_t>());
        // keep support ascending; the odds scan relies on it
        std::vector<std::size_t> idx(out.support.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return out.support[a] < out.support[b]; });
        PopularityList sorted;
        for (std::size_t i : idx) {
            if (!sorted.support.empty() && sorted.support.back() == out.support[i])
                throw std::invalid_argument("support entries must be distinct");
            sorted.support.push_back(out.support[i]);
            sorted.log_weight.push_back(out.log_weight[i]);
        }
        return sorted;
    }
    out.support.resize(out.log_weight.size());
    std::iota(out.support.begin(), out.support.end(), 0);
    return out;
}

PopularityModel weight_model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("women"))
        throw std::invalid_argument("weight model needs a \"women\" array");
    auto side_from = [](const json& rows, const char* what) {
        if (!rows.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
        std::vector<PopularityList> side;
        for (const auto& row : rows) {
            if (!row.is_array())
                throw std::invalid_argument(std::string(what) + " rows must be arrays");
            if (row.empty()) {
                side.emplace_back();  // no weights: uniform list
                continue;
            }
            side.push_back(weights_from_json(json{{"weights", row}}));
        }
        return side;
    };
    PopularityModel model;
    model.women = side_from(j.at("women"), "women");
    if (j.contains("men")) model.men = side_from(j.at("men"), "men");
    return model;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

json parse_json_file(const std::string& path) {
    return json::parse(read_text_file(path));
}

std::string format_double(double v) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buffer, end);
}

std::string csv_header(const std::vector<std::string>& columns) {
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) line += ',';
        line += columns[i];
    }
    line += '\n';
    return line;
}

std::string csv_row(const std::vector<double>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) line += ',';
        line += format_double(row[i]);
    }
    line += '\n';
    return line;
}

void write_csv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) {
    std::string content = csv_header(columns);
    for (const auto& row : rows) content += csv_row(row);
    write_text_file(path, content);
}

}  // namespace marketsim
