#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mprflow/channel.hpp"

namespace mprflow {

using NodeId = int;
using FlowId = int;

enum class Role { source, relay, destination };
enum class InterferencePolicy { all_nodes, path_nodes };

const char* to_string(Role role);
const char* to_string(InterferencePolicy policy);
std::optional<Role> parse_role(std::string_view text);
std::optional<InterferencePolicy> parse_policy(std::string_view text);

struct NodeSpec {
    NodeId id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    RadioSpec radio;
    Role role = Role::relay;
    /// Transmit probability for relays; a placeholder for sources, whose rate
    /// is a decision variable; unused for the destination.
    double q = 0.0;
};

/// Ordered transmitter -> receiver pair.
struct Link {
    NodeId tx = 0;
    NodeId rx = 0;
    auto operator<=>(const Link&) const = default;
};

std::string to_string(const Link& link);

struct Flow {
    FlowId id = 0;
    NodeId source = 0;
    std::vector<NodeId> path; ///< source first, destination last

    std::vector<Link> links() const;
    std::size_t hops() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Every way a scenario can be rejected. The message names the element.
class ScenarioError : public std::runtime_error {
public:
    enum class Kind {
        parse,
        schema,
        invalid_value,
        duplicate_id,
        unknown_node,
        destination,
        bad_path,
        not_disjoint,
        shape,
    };

    ScenarioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Validated, immutable network description: nodes, flows with explicit
/// disjoint paths, channel parameters and the interference policy.
class Scenario {
public:
    /// Validates every invariant and throws ScenarioError on the first breach.
    Scenario(std::vector<NodeSpec> nodes, std::vector<Flow> flows, ChannelParams channel,
             InterferencePolicy policy = InterferencePolicy::path_nodes);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<Flow>& flows() const { return flows_; }
    const ChannelParams& channel() const { return channel_; }
    InterferencePolicy policy() const { return policy_; }
    NodeId destination() const { return destination_; }

    bool has_node(NodeId id) const;
    std::size_t index_of(NodeId id) const;
    const NodeSpec& node(NodeId id) const;
    const Flow& flow(FlowId id) const;
    /// Flow originating at `id`, if any.
    const Flow* flow_from(NodeId id) const;
    bool on_any_path(NodeId id) const;
    bool has_link(const Link& link) const;

    /// Placements in node-list order, for the channel layer.
    const std::vector<RadioNode>& radio_nodes() const { return radio_nodes_; }

    /// g(i, j) = P_tx(i) * r(i, j)^-alpha.
    double power_factor(NodeId tx, NodeId rx) const;

    /// Success probability of tx -> rx when `active` transmit (tx included).
    double success_probability(NodeId tx, NodeId rx, const std::vector<NodeId>& active) const;

    /// Nodes that interfere with `link`, ascending by id. Their position in
    /// the list is the bit position used by the subset enumeration.
    std::vector<NodeId> interferer_set(const Link& link) const;

    /// Product over the path's links of the interference-free success probability.
    double end_to_end_success(const Flow& flow) const;

    /// Flow whose path has the highest end-to-end success; ties go to the lowest id.
    const Flow& best_path() const;

    Scenario with_sinr_threshold(double gamma) const;
    Scenario with_policy(InterferencePolicy policy) const;
    /// Keeps a single flow; nodes are unchanged.
    Scenario restricted_to(FlowId id) const;

    /// True when every node shares one SINR threshold.
    std::optional<double> uniform_sinr_threshold() const;

private:
    void validate();

    std::vector<NodeSpec> nodes_;
    std::vector<Flow> flows_;
    ChannelParams channel_;
    InterferencePolicy policy_;
    NodeId destination_ = 0;
    std::vector<RadioNode> radio_nodes_;
};

} // namespace mprflow
