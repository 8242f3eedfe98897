#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mprflow/optimizer.hpp"
#include "mprflow/simulator.hpp"

namespace mprflow {

/// Bad flags or flag combinations (exit code 1).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int scenario = 2;
inline constexpr int internal = 3;
} // namespace exit_code

/// SINR thresholds applied uniformly to every node.
struct SweepSpec {
    std::vector<double> gamma_values;

    /// "start:stop:step"; stop is included when it lands on the grid.
    static SweepSpec parse(std::string_view text);
};

std::vector<double> parse_rate_list(std::string_view text);

struct ScenarioInput {
    Scenario scenario;
    std::string hash; ///< content hash of the file bytes
};

ScenarioInput load_input(const std::string& path, std::optional<InterferencePolicy> policy = std::nullopt);

struct CommandOptions {
    std::optional<SweepSpec> sweep;
    std::optional<double> gamma;
    SolverConfig solver;
    std::uint64_t slots = 1'000'000;
    std::uint64_t warmup = 10'000;
    std::optional<std::vector<double>> rates; ///< one per flow, scenario order
    RelayDiscipline relay_discipline = RelayDiscipline::queue_gated;
    int workers = 0; ///< sweep workers; 0 picks the hardware concurrency
};

/// One CSV row per gamma: gamma, rate_f*, throughput_f*, aat, feasible, seed.
std::string cmd_solve(const ScenarioInput& input, const CommandOptions& options);

/// One CSV row per gamma: gamma, sim_throughput_f*, sim_aat, analytic_aat,
/// relative_gap, delay_mean_f*, delay_p99_f*, delay_bounded. Rates come from
/// options.rates or, when absent, from solving each gamma first.
std::string cmd_simulate(const ScenarioInput& input, const CommandOptions& options);

struct BaselineReport {
    std::string csv; ///< gamma, multipath_aat, best_path_aat, ratio
    double mean_ratio = 0.0;
};
BaselineReport cmd_baseline(const ScenarioInput& input, const CommandOptions& options);

/// "lhs=..\nrhs=..\nholds=true|false\n".
std::string cmd_check_convexity(const ScenarioInput& input, const CommandOptions& options);

std::string cmd_dump_problem(const ScenarioInput& input, const CommandOptions& options);

/// Seed of the run at position `index` of a sweep.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

} // namespace mprflow
