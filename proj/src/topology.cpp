#include "mprflow/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mprflow {

namespace {

std::string node_label(NodeId id) { return "node " + std::to_string(id); }
std::string flow_label(FlowId id) { return "flow " + std::to_string(id); }

[[noreturn]] void reject(ScenarioError::Kind kind, const std::string& what) {
    throw ScenarioError(kind, what);
}

} // namespace

const char* to_string(Role role) {
    switch (role) {
    case Role::source: return "source";
    case Role::relay: return "relay";
    case Role::destination: return "destination";
    }
    return "?";
}

const char* to_string(InterferencePolicy policy) {
    return policy == InterferencePolicy::all_nodes ? "all_nodes" : "path_nodes";
}

std::optional<Role> parse_role(std::string_view text) {
    if (text == "source") return Role::source;
    if (text == "relay") return Role::relay;
    if (text == "destination") return Role::destination;
    return std::nullopt;
}

std::optional<InterferencePolicy> parse_policy(std::string_view text) {
    if (text == "all_nodes") return InterferencePolicy::all_nodes;
    if (text == "path_nodes") return InterferencePolicy::path_nodes;
    return std::nullopt;
}

std::string to_string(const Link& link) {
    return "(" + std::to_string(link.tx) + "," + std::to_string(link.rx) + ")";
}

std::vector<Link> Flow::links() const {
    std::vector<Link> out;
    for (std::size_t h = 0; h + 1 < path.size(); ++h) out.push_back({path[h], path[h + 1]});
    return out;
}

Scenario::Scenario(std::vector<NodeSpec> nodes, std::vector<Flow> flows, ChannelParams channel,
                   InterferencePolicy policy)
    : nodes_(std::move(nodes)), flows_(std::move(flows)), channel_(channel), policy_(policy) {
    validate();
}

void Scenario::validate() {
    using Kind = ScenarioError::Kind;
    try {
        channel_.validate();
    } catch (const std::invalid_argument& e) {
        reject(Kind::invalid_value, e.what());
    }

    std::set<NodeId> ids;
    std::optional<NodeId> destination;
    for (const NodeSpec& n : nodes_) {
        if (!ids.insert(n.id).second) reject(Kind::duplicate_id, "duplicate node id " + std::to_string(n.id));
        try {
            n.radio.validate();
        } catch (const std::invalid_argument& e) {
            reject(Kind::invalid_value, node_label(n.id) + ": " + e.what());
        }
        if (!std::isfinite(n.x_m) || !std::isfinite(n.y_m)) {
            reject(Kind::invalid_value, node_label(n.id) + ": coordinates must be finite");
        }
        if (!(n.q >= 0.0 && n.q <= 1.0)) reject(Kind::invalid_value, node_label(n.id) + ": q must lie in [0, 1]");
        if (n.role == Role::destination) {
            if (destination) {
                reject(Kind::destination, "more than one destination: nodes " + std::to_string(*destination) +
                                              " and " + std::to_string(n.id));
            }
            destination = n.id;
        }
    }
    if (!destination) reject(Kind::destination, "scenario has no destination node");
    destination_ = *destination;

    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes_.size(); ++b) {
            if (nodes_[a].x_m == nodes_[b].x_m && nodes_[a].y_m == nodes_[b].y_m) {
                reject(Kind::invalid_value, node_label(nodes_[a].id) + " and " + node_label(nodes_[b].id) +
                                                " share a position");
            }
        }
    }

    radio_nodes_.clear();
    for (const NodeSpec& n : nodes_) radio_nodes_.push_back({n.x_m, n.y_m, n.radio});

    std::set<FlowId> flow_ids;
    std::set<NodeId> used;
    for (const Flow& f : flows_) {
        if (!flow_ids.insert(f.id).second) reject(Kind::duplicate_id, "duplicate flow id " + std::to_string(f.id));
        if (!ids.count(f.source)) reject(Kind::unknown_node, flow_label(f.id) + ": unknown source " + node_label(f.source));
        if (node(f.source).role != Role::source) {
            reject(Kind::bad_path, flow_label(f.id) + ": " + node_label(f.source) + " is not a source");
        }
        if (f.path.size() < 2) reject(Kind::bad_path, flow_label(f.id) + ": path needs at least one link");
        if (f.path.front() != f.source) {
            reject(Kind::bad_path, flow_label(f.id) + ": path does not start at its source");
        }
        if (f.path.back() != destination_) {
            reject(Kind::bad_path, flow_label(f.id) + ": path does not end at the destination");
        }
        std::set<NodeId> seen;
        for (std::size_t h = 0; h < f.path.size(); ++h) {
            const NodeId id = f.path[h];
            if (!ids.count(id)) reject(Kind::unknown_node, flow_label(f.id) + ": path references unknown " + node_label(id));
            if (!seen.insert(id).second) reject(Kind::bad_path, flow_label(f.id) + ": path repeats " + node_label(id));
            const bool interior = h > 0 && h + 1 < f.path.size();
            if (interior && node(id).role != Role::relay) {
                reject(Kind::bad_path, flow_label(f.id) + ": interior " + node_label(id) + " is not a relay");
            }
            if (id == destination_) continue;
            if (!used.insert(id).second) {
                reject(Kind::not_disjoint, flow_label(f.id) + ": " + node_label(id) + " already lies on another path");
            }
        }
    }
}

bool Scenario::has_node(NodeId id) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [id](const NodeSpec& n) { return n.id == id; });
}

std::size_t Scenario::index_of(NodeId id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) return i;
    }
    throw ContractViolation("unknown " + node_label(id));
}

const NodeSpec& Scenario::node(NodeId id) const { return nodes_[index_of(id)]; }

const Flow& Scenario::flow(FlowId id) const {
    for (const Flow& f : flows_) {
        if (f.id == id) return f;
    }
    throw ContractViolation("unknown " + flow_label(id));
}

const Flow* Scenario::flow_from(NodeId id) const {
    for (const Flow& f : flows_) {
        if (f.source == id) return &f;
    }
    return nullptr;
}

bool Scenario::on_any_path(NodeId id) const {
    return std::any_of(flows_.begin(), flows_.end(), [id](const Flow& f) {
        return std::find(f.path.begin(), f.path.end(), id) != f.path.end();
    });
}

bool Scenario::has_link(const Link& link) const {
    for (const Flow& f : flows_) {
        for (const Link& l : f.links()) {
            if (l == link) return true;
        }
    }
    return false;
}

double Scenario::power_factor(NodeId tx, NodeId rx) const {
    const RadioNode& a = radio_nodes_[index_of(tx)];
    const RadioNode& b = radio_nodes_[index_of(rx)];
    return rx_power_factor(a.radio.tx_power, distance(a, b), channel_.alpha);
}

double Scenario::success_probability(NodeId tx, NodeId rx, const std::vector<NodeId>& active) const {
    std::vector<std::size_t> indices;
    indices.reserve(active.size());
    for (NodeId id : active) indices.push_back(index_of(id));
    return mprflow::success_probability(index_of(tx), index_of(rx), indices, radio_nodes_, channel_);
}

std::vector<NodeId> Scenario::interferer_set(const Link& link) const {
    if (!has_link(link)) throw ContractViolation("link " + to_string(link) + " is not on any flow path");
    std::vector<NodeId> out;
    for (const NodeSpec& n : nodes_) {
        if (n.id == link.tx || n.id == link.rx || n.id == destination_) continue;
        if (policy_ == InterferencePolicy::path_nodes && !on_any_path(n.id)) continue;
        out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double Scenario::end_to_end_success(const Flow& flow) const {
    double p = 1.0;
    for (const Link& l : flow.links()) p *= success_probability(l.tx, l.rx, {l.tx});
    return p;
}

const Flow& Scenario::best_path() const {
    if (flows_.empty()) throw ContractViolation("best_path: scenario has no flows");
    const Flow* best = nullptr;
    double best_p = -1.0;
    for (const Flow& f : flows_) {
        const double p = end_to_end_success(f);
        if (p > best_p || (p == best_p && f.id < best->id)) {
            best = &f;
            best_p = p;
        }
    }
    return *best;
}

Scenario Scenario::with_sinr_threshold(double gamma) const {
    std::vector<NodeSpec> nodes = nodes_;
    for (NodeSpec& n : nodes) n.radio.sinr_threshold = gamma;
    return Scenario(std::move(nodes), flows_, channel_, policy_);
}

Scenario Scenario::with_policy(InterferencePolicy policy) const {
    return Scenario(nodes_, flows_, channel_, policy);
}

Scenario Scenario::restricted_to(FlowId id) const {
    return Scenario(nodes_, {flow(id)}, channel_, policy_);
}

std::optional<double> Scenario::uniform_sinr_threshold() const {
    if (nodes_.empty()) return std::nullopt;
    const double gamma = nodes_.front().radio.sinr_threshold;
    for (const NodeSpec& n : nodes_) {
        if (n.radio.sinr_threshold != gamma) return std::nullopt;
    }
    return gamma;
}

} // namespace mprflow
