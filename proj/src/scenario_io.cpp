#include "mprflow/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mprflow {

namespace {

using json = nlohmann::json;
using Kind = ScenarioError::Kind;

void check_keys(const json& object, const std::string& where, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
    if (!object.is_object()) throw ScenarioError(Kind::schema, where + ": expected an object");
    std::set<std::string> allowed;
    for (const char* k : required) {
        allowed.insert(k);
        if (!object.contains(k)) throw ScenarioError(Kind::schema, where + ": missing field '" + k + "'");
    }
    for (const char* k : optional) allowed.insert(k);
    for (const auto& [key, value] : object.items()) {
        if (!allowed.count(key)) throw ScenarioError(Kind::schema, where + ": unknown field '" + key + "'");
    }
}

double number(const json& object, const char* key, const std::string& where) {
    const json& v = object.at(key);
    if (!v.is_number()) throw ScenarioError(Kind::schema, where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ScenarioError(Kind::schema, what + " must be an integer");
    return v.get<int>();
}

std::string text(const json& object, const char* key, const std::string& where) {
    const json& v = object.at(key);
    if (!v.is_string()) throw ScenarioError(Kind::schema, where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

Scenario load_scenario(std::string_view document) {
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ScenarioError(Kind::parse, std::string("scenario is not valid JSON: ") + e.what());
    }
    check_keys(root, "scenario", {"channel", "nodes", "flows"}, {"interference_policy"});

    const json& ch = root.at("channel");
    check_keys(ch, "channel", {"alpha"}, {"v_default"});
    ChannelParams channel;
    channel.alpha = number(ch, "alpha", "channel");
    if (ch.contains("v_default")) channel.v_default = number(ch, "v_default", "channel");

    InterferencePolicy policy = InterferencePolicy::path_nodes;
    if (root.contains("interference_policy")) {
        const std::string p = text(root, "interference_policy", "scenario");
        auto parsed = parse_policy(p);
        if (!parsed) throw ScenarioError(Kind::schema, "unknown interference_policy '" + p + "'");
        policy = *parsed;
    }

    if (!root.at("nodes").is_array()) throw ScenarioError(Kind::schema, "nodes must be a list");
    std::vector<NodeSpec> nodes;
    for (const json& n : root.at("nodes")) {
        const std::string where = "nodes[" + std::to_string(nodes.size()) + "]";
        check_keys(n, where, {"id", "x_m", "y_m", "tx_power_w", "noise_w", "sinr_threshold", "role", "q"});
        NodeSpec spec;
        spec.id = integer(n.at("id"), where + ".id");
        spec.x_m = number(n, "x_m", where);
        spec.y_m = number(n, "y_m", where);
        spec.radio.tx_power = number(n, "tx_power_w", where);
        spec.radio.noise = number(n, "noise_w", where);
        spec.radio.sinr_threshold = number(n, "sinr_threshold", where);
        const std::string role = text(n, "role", where);
        auto parsed = parse_role(role);
        if (!parsed) throw ScenarioError(Kind::schema, where + ": unknown role '" + role + "'");
        spec.role = *parsed;
        spec.q = number(n, "q", where);
        nodes.push_back(spec);
    }

    if (!root.at("flows").is_array()) throw ScenarioError(Kind::schema, "flows must be a list");
    std::vector<Flow> flows;
    for (const json& f : root.at("flows")) {
        const std::string where = "flows[" + std::to_string(flows.size()) + "]";
        check_keys(f, where, {"id", "source", "path"});
        Flow flow;
        flow.id = integer(f.at("id"), where + ".id");
        flow.source = integer(f.at("source"), where + ".source");
        if (!f.at("path").is_array()) throw ScenarioError(Kind::schema, where + ".path must be a list");
        for (const json& hop : f.at("path")) flow.path.push_back(integer(hop, where + ".path entry"));
        flows.push_back(std::move(flow));
    }

    return Scenario(std::move(nodes), std::move(flows), channel, policy);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(Kind::parse, "cannot read scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    return load_scenario(read_text_file(path));
}

std::string serialize(const Scenario& scenario) {
    json root;
    root["channel"] = {{"alpha", scenario.channel().alpha}, {"v_default", scenario.channel().v_default}};
    root["interference_policy"] = to_string(scenario.policy());
    root["nodes"] = json::array();
    for (const NodeSpec& n : scenario.nodes()) {
        root["nodes"].push_back({{"id", n.id},
                                 {"x_m", n.x_m},
                                 {"y_m", n.y_m},
                                 {"tx_power_w", n.radio.tx_power},
                                 {"noise_w", n.radio.noise},
                                 {"sinr_threshold", n.radio.sinr_threshold},
                                 {"role", to_string(n.role)},
                                 {"q", n.q}});
    }
    root["flows"] = json::array();
    for (const Flow& f : scenario.flows()) {
        root["flows"].push_back({{"id", f.id}, {"source", f.source}, {"path", f.path}});
    }
    return root.dump(2) + "\n";
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mprflow
