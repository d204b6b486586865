#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lattice.hpp"

namespace pmelect {

class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Configuration config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigParseError("configuration must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "nodes" && it.key() != "chirality" && it.key() != "seed")
            throw ConfigParseError("unknown field '" + it.key() + "'");
    }
    if (!j.contains("nodes") || !j["nodes"].is_array()) throw ConfigParseError("missing 'nodes' array");
    Configuration c;
    for (const auto& n : j["nodes"]) {
        if (!n.is_array() || n.size() != 2 || !n[0].is_number_integer() || !n[1].is_number_integer())
            throw ConfigParseError("each node must be [x,y] with integer entries");
        c.nodes.push_back({n[0].get<int>(), n[1].get<int>()});
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ConfigParseError("'seed' must be an integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("chirality")) {
        const auto& ch = j["chirality"];
        if (!ch.is_array() || ch.size() != c.nodes.size())
            throw ConfigParseError("'chirality' must be an array parallel to 'nodes'");
        for (const auto& v : ch) {
            if (v == "S")
                c.chirality.push_back(Chirality::Standard);
            else if (v == "F")
                c.chirality.push_back(Chirality::Flipped);
            else
                throw ConfigParseError("chirality entries must be \"S\" or \"F\"");
        }
    }
    return c;
}

inline nlohmann::json config_to_json(const Configuration& c) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : c.nodes) j["nodes"].push_back({n.x, n.y});
    if (!c.chirality.empty()) {
        j["chirality"] = nlohmann::json::array();
        for (auto ch : c.chirality) j["chirality"].push_back(std::string(1, chirality_char(ch)));
    }
    j["seed"] = c.seed;
    return j;
}

inline Configuration parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigParseError(e.what());
    }
    return config_from_json(j);
}

inline Configuration load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace pmelect
