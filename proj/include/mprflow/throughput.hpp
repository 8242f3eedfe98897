#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mprflow/topology.hpp"

namespace mprflow {

/// Source injection rate per flow id, each in [0, 1] packets/slot.
class RateVector {
public:
    RateVector() = default;
    explicit RateVector(std::map<FlowId, double> rates);

    /// Zero for flows without an entry.
    double at(FlowId flow) const;
    void set(FlowId flow, double rate);
    const std::map<FlowId, double>& values() const { return rates_; }

    static RateVector uniform(const Scenario& scenario, double rate);

private:
    std::map<FlowId, double> rates_;
};

struct LinkThroughputResult {
    Link link;
    double value = 0.0;              ///< packets/slot
    std::uint64_t terms_evaluated = 0; ///< 2^|interferers|
};

class IntractableEnumeration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest interferer set the subset enumeration accepts.
inline constexpr std::size_t kMaxInterferers = 24;

/// Activity probability of a node: a flow originator's rate, zero for the
/// destination, the configured q otherwise.
double activity_probability(NodeId node, const RateVector& rates, const Scenario& scenario);

/// activity_probability for every node, in scenario node order.
std::vector<double> activity_vector(const RateVector& rates, const Scenario& scenario);

/// q_{i,j}: q_i when j is the destination, q_i (1 - q_j) otherwise.
double effective_tx_prob(NodeId tx, NodeId rx, const RateVector& rates, const Scenario& scenario);

/// One link with its interferers and the success probability of every
/// interferer subset. Bit n of a subset index marks interferers[n] active.
struct LinkModel {
    Link link;
    FlowId flow = 0;
    std::vector<NodeId> interferers;
    std::vector<double> subset_success;

    // Node-list indices, for evaluation against an activity_vector.
    std::size_t tx_index = 0;
    std::size_t rx_index = 0;
    bool rx_is_destination = false;
    std::vector<std::size_t> interferer_index;

    /// Average throughput under independent Bernoulli activity.
    double throughput(std::span<const double> activity, std::vector<double>& scratch) const;
};

/// Enumerates every interferer subset of `link`. Throws IntractableEnumeration
/// when the link has more than kMaxInterferers interferers.
LinkModel build_link_model(const Scenario& scenario, FlowId flow, const Link& link);

/// Precomputed link models for every path link of a scenario. Rates can
/// then be re-evaluated without touching the channel model again.
class ThroughputModel {
public:
    /// Throws IntractableEnumeration when a link has more interferers than kMaxInterferers.
    explicit ThroughputModel(const Scenario& scenario);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<LinkModel>& links() const { return links_; }
    const LinkModel& link_model(const Link& link) const;

    LinkThroughputResult link_throughput(const Link& link, const RateVector& rates) const;
    /// Minimum over the flow's links.
    double path_throughput(const Flow& flow, const RateVector& rates) const;
    double aggregate_throughput(const RateVector& rates) const;

    /// Link throughputs for every flow, per flow in hop order.
    std::map<FlowId, std::vector<double>> all_link_throughputs(const RateVector& rates) const;

private:
    Scenario scenario_;
    std::vector<LinkModel> links_;
};

LinkThroughputResult link_throughput(const Link& link, const RateVector& rates, const Scenario& scenario);
double path_throughput(const Flow& flow, const RateVector& rates, const Scenario& scenario);
double aggregate_throughput(const RateVector& rates, const Scenario& scenario);

} // namespace mprflow
