#include "mprflow/simulator.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace mprflow {

const char* to_string(RelayDiscipline discipline) {
    return discipline == RelayDiscipline::saturated ? "saturated" : "queue_gated";
}

std::optional<RelayDiscipline> parse_relay_discipline(std::string_view text) {
    if (text == "queue_gated") return RelayDiscipline::queue_gated;
    if (text == "saturated") return RelayDiscipline::saturated;
    return std::nullopt;
}

void SimConfig::validate() const {
    if (warmup_slots >= slots) throw std::invalid_argument("warmup_slots must be smaller than slots");
    if (trace_stride == 0) throw std::invalid_argument("trace_stride must be positive");
}

void QueueTrend::add(double t, double y) {
    n += 1.0;
    sum_t += t;
    sum_tt += t * t;
    sum_y += y;
    sum_ty += t * y;
}

double QueueTrend::slope() const {
    if (n < 2.0) return 0.0;
    const double denom = n * sum_tt - sum_t * sum_t;
    return denom == 0.0 ? 0.0 : (n * sum_ty - sum_t * sum_y) / denom;
}

namespace {

enum class NodeKind { source, relay, background, silent };

struct NodeState {
    NodeKind kind = NodeKind::silent;
    NodeId id = 0;
    FlowId flow = 0;
    int next_hop = -1; ///< node index, -1 for none
    double q = 0.0;
    double gamma = 1.0;
    double noise = 0.0;
    bool pending = false;          ///< source holds an unsent or failed packet
    std::uint64_t pending_born = 0;
    std::deque<std::uint64_t> queue; ///< relay FIFO of injection slots
};

} // namespace

SimStats run(const Scenario& scenario, const SimConfig& config) {
    config.validate();
    const std::size_t count = scenario.nodes().size();
    const double v = scenario.channel().v_default;
    const std::size_t dest = scenario.index_of(scenario.destination());

    std::vector<NodeState> nodes(count);
    for (std::size_t i = 0; i < count; ++i) {
        const NodeSpec& spec = scenario.nodes()[i];
        NodeState& n = nodes[i];
        n.id = spec.id;
        n.gamma = spec.radio.sinr_threshold;
        n.noise = spec.radio.noise;
        if (i == dest) continue;
        if (scenario.on_any_path(spec.id)) {
            for (const Flow& f : scenario.flows()) {
                auto it = std::find(f.path.begin(), f.path.end(), spec.id);
                if (it == f.path.end()) continue;
                n.flow = f.id;
                n.next_hop = static_cast<int>(scenario.index_of(*(it + 1)));
                n.kind = it == f.path.begin() ? NodeKind::source : NodeKind::relay;
                n.q = n.kind == NodeKind::source ? config.rates.at(f.id) : spec.q;
            }
        } else if (scenario.policy() == InterferencePolicy::all_nodes) {
            n.kind = NodeKind::background;
            n.q = spec.q;
        }
    }

    std::vector<double> gain(count * count, 0.0);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            if (a != b) gain[a * count + b] = scenario.power_factor(scenario.nodes()[a].id, scenario.nodes()[b].id);
        }
    }

    SimStats stats;
    stats.measured_slots = config.slots - config.warmup_slots;
    for (const Flow& f : scenario.flows()) {
        stats.per_flow_throughput[f.id] = 0.0;
        for (const Link& l : f.links()) stats.links[l] = {};
    }
    std::vector<Link> node_link(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (nodes[i].next_hop >= 0) node_link[i] = {nodes[i].id, nodes[static_cast<std::size_t>(nodes[i].next_hop)].id};
        if (nodes[i].kind == NodeKind::relay) {
            stats.max_queue[nodes[i].id] = 0;
            stats.queue_trend[nodes[i].id] = {};
            stats.queue_trace[nodes[i].id] = {};
        }
    }
    std::map<FlowId, std::vector<std::uint32_t>> delays;
    std::map<FlowId, std::uint64_t> deliveries;

    Rng rng = make_rng(config.seed, 0);
    std::vector<char> transmitting(count);
    std::vector<std::size_t> active;
    std::vector<double> fading(count * count);   // [receiver * count + transmitter]
    std::vector<std::uint64_t> fading_stamp(count, 0);
    std::vector<std::size_t> successes;

    for (std::uint64_t slot = 0; slot < config.slots; ++slot) {
        const bool measured = slot >= config.warmup_slots;
        active.clear();
        for (std::size_t i = 0; i < count; ++i) {
            NodeState& n = nodes[i];
            transmitting[i] = 0;
            if (n.kind == NodeKind::silent) continue;
            const bool coin = uniform01(rng) < n.q;
            switch (n.kind) {
            case NodeKind::source:
                if (coin) {
                    if (!n.pending) {
                        n.pending = true;
                        n.pending_born = slot;
                        ++stats.injected;
                    }
                    transmitting[i] = 1;
                }
                break;
            case NodeKind::relay:
                transmitting[i] = coin && (config.relay_discipline == RelayDiscipline::saturated || !n.queue.empty());
                break;
            case NodeKind::background:
                transmitting[i] = coin;
                break;
            case NodeKind::silent:
                break;
            }
            if (transmitting[i]) active.push_back(i);
        }

        // Decode every transmission against the fading drawn at its receiver.
        successes.clear();
        for (std::size_t i : active) {
            const NodeState& n = nodes[i];
            if (n.next_hop < 0) continue;
            const auto j = static_cast<std::size_t>(n.next_hop);
            if (measured) ++stats.links[node_link[i]].attempts;
            if (transmitting[j]) continue; // half-duplex
            // One fading draw per (transmitter, receiver) pair per slot.
            double* at_j = &fading[j * count];
            if (fading_stamp[j] != slot + 1) {
                for (std::size_t k : active) at_j[k] = sample_fading(rng, v);
                fading_stamp[j] = slot + 1;
            }
            double interference = 0.0;
            for (std::size_t k : active) {
                if (k != i) interference += at_j[k] * gain[k * count + j];
            }
            const double signal = at_j[i] * gain[i * count + j];
            if (signal >= nodes[j].gamma * (nodes[j].noise + interference)) successes.push_back(i);
        }

        for (std::size_t i : successes) {
            NodeState& n = nodes[i];
            const auto j = static_cast<std::size_t>(n.next_hop);
            if (measured) ++stats.links[node_link[i]].successes;
            std::uint64_t born = 0;
            if (n.kind == NodeKind::source) {
                born = n.pending_born;
                n.pending = false;
            } else if (!n.queue.empty()) {
                born = n.queue.front();
                n.queue.pop_front();
            } else {
                continue; // filler from a saturated relay
            }
            if (j == dest) {
                ++stats.delivered;
                if (measured) {
                    ++deliveries[n.flow];
                    delays[n.flow].push_back(static_cast<std::uint32_t>(slot - born + 1));
                }
            } else {
                nodes[j].queue.push_back(born);
            }
        }

        if (measured) {
            const auto t = static_cast<double>(slot - config.warmup_slots);
            const bool sample = (slot - config.warmup_slots) % config.trace_stride == 0;
            for (const NodeState& n : nodes) {
                if (n.kind != NodeKind::relay) continue;
                const std::size_t len = n.queue.size();
                stats.queue_trend[n.id].add(t, static_cast<double>(len));
                std::size_t& peak = stats.max_queue[n.id];
                peak = std::max(peak, len);
                if (sample) stats.queue_trace[n.id].push_back(static_cast<std::uint32_t>(len));
            }
        }
    }

    const auto measured_slots = static_cast<double>(stats.measured_slots);
    for (auto& [flow, value] : stats.per_flow_throughput) {
        value = static_cast<double>(deliveries[flow]) / measured_slots;
        stats.aat += value;
    }
    for (auto& [link, l] : stats.links) {
        l.success_rate = l.attempts ? static_cast<double>(l.successes) / static_cast<double>(l.attempts) : 0.0;
        l.throughput = static_cast<double>(l.successes) / measured_slots;
    }
    for (const Flow& f : scenario.flows()) {
        DelayStats d;
        std::vector<std::uint32_t>& samples = delays[f.id];
        d.samples = samples.size();
        if (!samples.empty()) {
            d.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
            const std::size_t rank = (samples.size() * 99 + 99) / 100 - 1;
            std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank), samples.end());
            d.p99 = samples[rank];
        }
        stats.delay[f.id] = d;
    }
    for (const NodeState& n : nodes) {
        stats.in_network += n.queue.size() + (n.pending ? 1 : 0);
    }
    return stats;
}

bool delay_bounded(const SimStats& stats, const Scenario& scenario) {
    if (stats.measured_slots < kMinDelaySlots) {
        throw ContractViolation("delay_bounded needs at least " + std::to_string(kMinDelaySlots) + " measured slots");
    }
    for (const auto& [node, trend] : stats.queue_trend) {
        if (!scenario.has_node(node)) throw ContractViolation("stats do not belong to this scenario");
        if (trend.slope() > kQueueSlopeBound) return false;
    }
    return true;
}

} // namespace mprflow
