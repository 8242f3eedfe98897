#include "mprflow/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mprflow {

namespace {

constexpr std::size_t kLogSpaceFactors = 32;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void ChannelParams::validate() const {
    if (!(alpha >= 2.0 && alpha <= 6.0)) {
        throw std::invalid_argument("channel.alpha must lie in [2, 6], got " + std::to_string(alpha));
    }
    if (!(v_default > 0.0)) {
        throw std::invalid_argument("channel.v_default must be positive");
    }
}

void RadioSpec::validate() const {
    if (!(tx_power > 0.0)) throw std::invalid_argument("tx_power must be positive");
    if (!(noise >= 0.0)) throw std::invalid_argument("noise must be non-negative");
    if (!(sinr_threshold > 0.0)) throw std::invalid_argument("sinr_threshold must be positive");
}

double rx_power_factor(double tx_power, double distance, double alpha) {
    if (!(distance > 0.0)) {
        throw std::domain_error("rx_power_factor: distance must be positive");
    }
    return tx_power * std::pow(distance, -alpha);
}

double success_probability(double signal, std::span<const double> interferers,
                           double noise, double sinr_threshold, double v) {
    if (!(signal > 0.0)) throw std::domain_error("success_probability: signal factor must be positive");
    const double noise_exponent = -sinr_threshold * noise / (v * signal);
    if (interferers.size() > kLogSpaceFactors) {
        double log_p = noise_exponent;
        for (double g : interferers) log_p -= std::log1p(sinr_threshold * g / signal);
        return std::exp(log_p);
    }
    double p = std::exp(noise_exponent);
    for (double g : interferers) p /= 1.0 + sinr_threshold * g / signal;
    return p;
}

double distance(const RadioNode& a, const RadioNode& b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

double success_probability(std::size_t tx, std::size_t rx,
                           std::span<const std::size_t> active,
                           std::span<const RadioNode> nodes,
                           const ChannelParams& channel) {
    if (tx >= nodes.size() || rx >= nodes.size()) {
        throw ContractViolation("success_probability: node index out of range");
    }
    if (std::find(active.begin(), active.end(), rx) != active.end()) {
        throw ContractViolation("success_probability: receiver " + std::to_string(rx) +
                                " is transmitting (half-duplex)");
    }
    if (std::find(active.begin(), active.end(), tx) == active.end()) {
        throw ContractViolation("success_probability: transmitter not in the active set");
    }
    const RadioNode& receiver = nodes[rx];
    const double signal = rx_power_factor(nodes[tx].radio.tx_power, distance(nodes[tx], receiver), channel.alpha);

    std::vector<double> interference;
    interference.reserve(active.size());
    for (std::size_t k : active) {
        if (k == tx) continue;
        interference.push_back(rx_power_factor(nodes[k].radio.tx_power, distance(nodes[k], receiver), channel.alpha));
    }
    // v is uniform, so v(k,j)/v(i,j) cancels inside the product.
    return success_probability(signal, interference, receiver.radio.noise,
                               receiver.radio.sinr_threshold, channel.v_default);
}

Rng make_rng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
    std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_fading(Rng& rng, double v) {
    // 1 - u lies in (0, 1], so the log is finite.
    return -v * std::log(1.0 - uniform01(rng));
}

} // namespace mprflow
