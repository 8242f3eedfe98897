#include "mprflow/throughput.hpp"

#include <algorithm>
#include <limits>

namespace mprflow {

RateVector::RateVector(std::map<FlowId, double> rates) : rates_(std::move(rates)) {
    for (const auto& [flow, rate] : rates_) set(flow, rate);
}

double RateVector::at(FlowId flow) const {
    auto it = rates_.find(flow);
    return it == rates_.end() ? 0.0 : it->second;
}

void RateVector::set(FlowId flow, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("rate of flow " + std::to_string(flow) + " must lie in [0, 1]");
    }
    rates_[flow] = rate;
}

RateVector RateVector::uniform(const Scenario& scenario, double rate) {
    RateVector out;
    for (const Flow& f : scenario.flows()) out.set(f.id, rate);
    return out;
}

double activity_probability(NodeId node, const RateVector& rates, const Scenario& scenario) {
    if (node == scenario.destination()) return 0.0;
    if (const Flow* f = scenario.flow_from(node)) return rates.at(f->id);
    return scenario.node(node).q;
}

double effective_tx_prob(NodeId tx, NodeId rx, const RateVector& rates, const Scenario& scenario) {
    const double q_tx = activity_probability(tx, rates, scenario);
    if (rx == scenario.destination()) return q_tx;
    return q_tx * (1.0 - activity_probability(rx, rates, scenario));
}

std::vector<double> activity_vector(const RateVector& rates, const Scenario& scenario) {
    std::vector<double> out;
    out.reserve(scenario.nodes().size());
    for (const NodeSpec& n : scenario.nodes()) out.push_back(activity_probability(n.id, rates, scenario));
    return out;
}

double LinkModel::throughput(std::span<const double> activity, std::vector<double>& scratch) const {
    const double attempt = rx_is_destination ? activity[tx_index]
                                             : activity[tx_index] * (1.0 - activity[rx_index]);
    if (attempt == 0.0) return 0.0;
    // Marginalise one interferer at a time, highest bit first:
    // sum_l P_l prod_n q_n^b (1-q_n)^(1-b), folded in place.
    scratch.assign(subset_success.begin(), subset_success.end());
    for (std::size_t n = interferer_index.size(); n-- > 0;) {
        const double q = activity[interferer_index[n]];
        const std::size_t half = std::size_t{1} << n;
        for (std::size_t l = 0; l < half; ++l) scratch[l] = (1.0 - q) * scratch[l] + q * scratch[l + half];
    }
    return attempt * scratch[0];
}

LinkModel build_link_model(const Scenario& scenario, FlowId flow, const Link& link) {
    LinkModel model;
    model.link = link;
    model.flow = flow;
    model.interferers = scenario.interferer_set(link);
    model.tx_index = scenario.index_of(link.tx);
    model.rx_index = scenario.index_of(link.rx);
    model.rx_is_destination = link.rx == scenario.destination();
    for (NodeId id : model.interferers) model.interferer_index.push_back(scenario.index_of(id));
    const std::size_t size = model.interferers.size();
    if (size > kMaxInterferers) {
        throw IntractableEnumeration("link " + to_string(link) + " has " + std::to_string(size) +
                                     " interferers; subset enumeration is capped at " +
                                     std::to_string(kMaxInterferers));
    }
    const std::size_t subsets = std::size_t{1} << size;
    model.subset_success.resize(subsets);
    std::vector<NodeId> active;
    for (std::size_t l = 0; l < subsets; ++l) {
        active.assign(1, link.tx);
        for (std::size_t n = 0; n < size; ++n) {
            if (l & (std::size_t{1} << n)) active.push_back(model.interferers[n]);
        }
        model.subset_success[l] = scenario.success_probability(link.tx, link.rx, active);
    }
    return model;
}

ThroughputModel::ThroughputModel(const Scenario& scenario) : scenario_(scenario) {
    for (const Flow& f : scenario_.flows()) {
        for (const Link& link : f.links()) links_.push_back(build_link_model(scenario_, f.id, link));
    }
}

const LinkModel& ThroughputModel::link_model(const Link& link) const {
    for (const LinkModel& m : links_) {
        if (m.link == link) return m;
    }
    throw ContractViolation("link " + to_string(link) + " is not on any flow path");
}

LinkThroughputResult ThroughputModel::link_throughput(const Link& link, const RateVector& rates) const {
    const LinkModel& m = link_model(link);
    std::vector<double> scratch;
    return {link, m.throughput(activity_vector(rates, scenario_), scratch), std::uint64_t{1} << m.interferers.size()};
}

double ThroughputModel::path_throughput(const Flow& flow, const RateVector& rates) const {
    const std::vector<double> activity = activity_vector(rates, scenario_);
    std::vector<double> scratch;
    double best = std::numeric_limits<double>::infinity();
    for (const Link& link : flow.links()) best = std::min(best, link_model(link).throughput(activity, scratch));
    return flow.links().empty() ? 0.0 : best;
}

double ThroughputModel::aggregate_throughput(const RateVector& rates) const {
    double total = 0.0;
    for (const auto& [flow, values] : all_link_throughputs(rates)) {
        total += *std::min_element(values.begin(), values.end());
    }
    return total;
}

std::map<FlowId, std::vector<double>> ThroughputModel::all_link_throughputs(const RateVector& rates) const {
    std::map<FlowId, std::vector<double>> out;
    const std::vector<double> activity = activity_vector(rates, scenario_);
    std::vector<double> scratch;
    for (const LinkModel& m : links_) out[m.flow].push_back(m.throughput(activity, scratch));
    return out;
}

LinkThroughputResult link_throughput(const Link& link, const RateVector& rates, const Scenario& scenario) {
    // Only the requested link is enumerated.
    for (const Flow& f : scenario.flows()) {
        for (const Link& l : f.links()) {
            if (l != link) continue;
            const LinkModel model = build_link_model(scenario, f.id, link);
            std::vector<double> scratch;
            return {link, model.throughput(activity_vector(rates, scenario), scratch),
                    std::uint64_t{1} << model.interferers.size()};
        }
    }
    throw ContractViolation("link " + to_string(link) + " is not on any flow path");
}

double path_throughput(const Flow& flow, const RateVector& rates, const Scenario& scenario) {
    return ThroughputModel(scenario).path_throughput(flow, rates);
}

double aggregate_throughput(const RateVector& rates, const Scenario& scenario) {
    return ThroughputModel(scenario).aggregate_throughput(rates);
}

} // namespace mprflow
