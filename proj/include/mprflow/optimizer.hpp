#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mprflow/throughput.hpp"

namespace mprflow {

enum class ConstraintSet { S1, S2, S3, S4 };
const char* to_string(ConstraintSet set);

struct Variable {
    enum class Kind { rate, auxiliary };
    Kind kind = Kind::rate;
    FlowId flow = 0;
    std::string name;
};

struct ObjectiveTerm {
    enum class Kind { link_throughput, auxiliary };
    Kind kind = Kind::link_throughput;
    FlowId flow = 0;
    Link link;                ///< used by link_throughput terms
    std::size_t variable = 0; ///< used by auxiliary terms
};

/// One scalar constraint of the smooth problem.
///   S1/S3: 0 <= x or x <= 1 for `variable` (`upper` picks which)
///   S2:    T(upstream) <= T(downstream) on consecutive links of `flow`
///   S4:    x_aux <= T(link)
struct Constraint {
    ConstraintSet set = ConstraintSet::S1;
    std::string label; ///< g1, g2, ...
    FlowId flow = 0;
    std::size_t variable = 0;
    bool upper = false;
    Link upstream;
    Link downstream;
    Link link;
};

struct Evaluation {
    double objective = 0.0;
    std::vector<double> violations; ///< max(0, lhs - rhs), one per constraint

    double max_violation() const;
    double total_violation() const;
};

/// Smooth throughput-maximisation problem with an auxiliary variable per
/// multi-hop path. Variables are ordered: one rate per decision flow in
/// scenario order, then one auxiliary per multi-hop decision flow.
///
/// Flows outside `decision_flows` keep rate zero but stay in the
/// interference model, so their relays still interfere.
class AllocationProblem {
public:
    explicit AllocationProblem(const Scenario& scenario);
    AllocationProblem(const Scenario& scenario, const std::vector<FlowId>& decision_flows);

    const Scenario& scenario() const { return model_->scenario(); }
    const ThroughputModel& model() const { return *model_; }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<ObjectiveTerm>& objective() const { return objective_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    std::size_t rate_count() const { return decision_flows_.size(); }
    const std::vector<FlowId>& decision_flows() const { return decision_flows_; }
    std::size_t count(ConstraintSet set) const;

    /// Evaluates every objective term and constraint at an explicit point.
    /// Rates outside [0, 1] are clamped for the throughput terms; S1 still
    /// reports the raw excursion. Throws std::invalid_argument on a size mismatch.
    Evaluation evaluate(std::span<const double> point) const;

    /// Same problem with every auxiliary replaced by its path's minimum
    /// link throughput. `rates` holds one value per decision flow.
    Evaluation evaluate_eliminated(std::span<const double> rates) const;

    /// Full point whose auxiliaries sit at their path minimum.
    std::vector<double> complete_point(std::span<const double> rates) const;

    RateVector rate_vector(std::span<const double> rates) const;

    /// Stable text listing of variables, objective and constraints.
    std::string dump() const;

private:
    std::shared_ptr<const ThroughputModel> model_;
    std::vector<Variable> variables_;
    std::vector<ObjectiveTerm> objective_;
    std::vector<Constraint> constraints_;
    std::vector<FlowId> decision_flows_;
};

AllocationProblem build_problem(const Scenario& scenario);
AllocationProblem build_single_flow_problem(const Scenario& scenario, FlowId flow);

struct SolverConfig {
    std::uint64_t seed = 1;
    int restarts = 8;
    double initial_temperature = 1.0;
    double cooling_factor = 0.95;
    int iterations_per_temperature = 200;
    double min_temperature = 1e-4;
    double step_sigma = 0.05;
    double penalty_coefficient = 100.0;
    /// Worker threads for restarts; 0 picks the hardware concurrency.
    int threads = 1;

    void validate() const;
};

/// Feasibility tolerance applied to the final point.
inline constexpr double kFeasibilityTolerance = 1e-6;
/// Rates below this are reported as zero (path left unused).
inline constexpr double kUnusedRate = 1e-4;

struct AllocationResult {
    RateVector rates;
    double aat = 0.0;
    bool feasible = false;
    double max_violation = 0.0;
    std::map<FlowId, double> per_flow; ///< path throughput
    int winning_restart = -1;
};

/// Simulated annealing over the source rates (auxiliaries eliminated),
/// penalising S2 violations, followed by feasibility repair and a compass
/// search polish. Deterministic for a given seed, whatever the thread count.
AllocationResult solve(const AllocationProblem& problem, const SolverConfig& config);

/// Reduces source rates until every S2 constraint holds. Each link
/// throughput is affine in any single source rate, so the largest feasible
/// rate of a flow is found exactly from two evaluations. Returns false if
/// some flow cannot be made feasible by lowering its rate.
bool repair(const AllocationProblem& problem, std::vector<double>& rates);

/// Routes everything over the flow with the best end-to-end success: the
/// single-flow problem with every other rate fixed at zero.
AllocationResult solve_best_path(const Scenario& scenario, const SolverConfig& config);

/// Success probabilities that enter the non-convexity condition of the
/// two-path toy topology: flow a -> b -> D and flow c -> D.
struct ToyProbabilities {
    double relay_alone = 0.0;        ///< b -> D, b transmits alone
    double relay_with_1 = 0.0;       ///< b -> D, a active
    double relay_with_3 = 0.0;       ///< b -> D, c active
    double relay_with_1_3 = 0.0;     ///< b -> D, a and c active
    double first_alone = 0.0;        ///< a -> b alone
    double first_with_3 = 0.0;       ///< a -> b, c active
};

struct ConvexityCheck {
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// The problem is non-convex when
///   p(b|b,c) - p(b|a,b,c) < (1-q_b)/q_b (p(a|a) - p(a|a,c)) + p(b|b) - p(b|a,b).
ConvexityCheck nonconvexity_condition(const ToyProbabilities& p, double relay_q);

/// Extracts the probabilities from a toy-shaped scenario. Throws
/// ScenarioError(Kind::shape) for any other topology.
ToyProbabilities toy_probabilities(const Scenario& scenario);
ConvexityCheck nonconvexity_condition(const Scenario& scenario);

} // namespace mprflow
