#pragma once

// Physical-layer model: path-loss power factors, Rayleigh-fading success
// probabilities under SINR capture, and fading sampling.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace mprflow {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct ChannelParams {
    double alpha = 4.0;     ///< path-loss exponent, in [2, 6]
    double v_default = 1.0; ///< Rayleigh mean parameter, applied to every link

    void validate() const;
};

struct RadioSpec {
    double tx_power = 0.1;      ///< watts
    double noise = 0.0;         ///< watts
    double sinr_threshold = 1.0;

    void validate() const;
};

/// g = tx_power * distance^-alpha. Throws std::domain_error for distance <= 0.
double rx_power_factor(double tx_power, double distance, double alpha);

/// Probability that a packet with received power factor `signal` survives
/// Rayleigh fading against `noise` and the listed interferer power factors:
///
///   exp(-gamma*noise/(v*signal)) * prod_k (1 + gamma*g_k/signal)^-1
///
/// The product switches to log-space once it has more than 32 factors.
double success_probability(double signal, std::span<const double> interferers,
                           double noise, double sinr_threshold, double v);

/// Node placement plus radio, indexed densely by the caller.
struct RadioNode {
    double x_m = 0.0;
    double y_m = 0.0;
    RadioSpec radio;
};

double distance(const RadioNode& a, const RadioNode& b);

/// Success probability of link tx -> rx when the nodes in `active` transmit
/// in the same slot. `active` must contain tx and must not contain rx.
double success_probability(std::size_t tx, std::size_t rx,
                           std::span<const std::size_t> active,
                           std::span<const RadioNode> nodes,
                           const ChannelParams& channel);

using Rng = std::mt19937_64;

/// Independent engine for stream `index` of a master seed.
Rng make_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform in [0, 1) from the top 53 bits of one engine draw. Unlike
/// std::uniform_real_distribution this is identical on every standard library.
double uniform01(Rng& rng);

/// Exponential fading gain with mean v, so P(A > x) = exp(-x / v).
double sample_fading(Rng& rng, double v);

} // namespace mprflow
