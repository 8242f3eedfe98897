#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "mprflow/throughput.hpp"

namespace mprflow {

/// When a relay may transmit.
enum class RelayDiscipline {
    /// Transmit the head-of-line packet with probability q; an empty queue stays silent.
    queue_gated,
    /// Transmit with probability q every slot, as if always backlogged. An
    /// empty relay sends filler that interferes but carries no flow packet.
    saturated,
};

const char* to_string(RelayDiscipline discipline);
std::optional<RelayDiscipline> parse_relay_discipline(std::string_view text);

struct SimConfig {
    std::uint64_t slots = 1'000'000;
    std::uint64_t warmup_slots = 10'000; ///< excluded from every statistic
    std::uint64_t seed = 1;
    RateVector rates;
    RelayDiscipline relay_discipline = RelayDiscipline::queue_gated;
    std::uint64_t trace_stride = 1000; ///< queue trace sampling interval, in slots

    void validate() const;
};

struct DelayStats {
    double mean = 0.0;       ///< slots
    double p99 = 0.0;        ///< slots
    std::uint64_t samples = 0;
};

struct LinkStats {
    std::uint64_t attempts = 0;  ///< slots the transmitter sent on this link
    std::uint64_t successes = 0;
    double success_rate = 0.0;   ///< successes / attempts
    double throughput = 0.0;     ///< successes per measured slot
};

/// Online least-squares fit of queue length against slot index.
struct QueueTrend {
    double n = 0.0;
    double sum_t = 0.0;
    double sum_tt = 0.0;
    double sum_y = 0.0;
    double sum_ty = 0.0;

    void add(double t, double y);
    /// Packets per slot; zero with fewer than two samples.
    double slope() const;
};

struct SimStats {
    std::uint64_t measured_slots = 0;
    std::map<FlowId, double> per_flow_throughput; ///< deliveries per measured slot
    double aat = 0.0;
    std::map<Link, LinkStats> links;
    /// Delay runs from the slot a packet is first sent by its source to the
    /// slot it is decoded at the destination, both inclusive.
    std::map<FlowId, DelayStats> delay;
    std::map<NodeId, std::size_t> max_queue;
    std::map<NodeId, QueueTrend> queue_trend;
    std::map<NodeId, std::vector<std::uint32_t>> queue_trace;

    // Whole-run packet accounting. No packet is ever dropped, so
    // injected == delivered + in_network.
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t in_network = 0;
};

/// Slotted random-access run: Bernoulli transmissions, per-slot Rayleigh
/// fading, SINR capture with multi-packet reception, FIFO relay queues with
/// unlimited retransmission.
SimStats run(const Scenario& scenario, const SimConfig& config);

/// Slope threshold used by delay_bounded, packets/slot.
inline constexpr double kQueueSlopeBound = 1e-4;
inline constexpr std::uint64_t kMinDelaySlots = 100'000;

/// True iff no relay queue shows a least-squares growth above kQueueSlopeBound.
/// Requires at least kMinDelaySlots measured slots.
bool delay_bounded(const SimStats& stats, const Scenario& scenario);

} // namespace mprflow
