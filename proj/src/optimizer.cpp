#include "mprflow/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace mprflow {

const char* to_string(ConstraintSet set) {
    switch (set) {
    case ConstraintSet::S1: return "S1";
    case ConstraintSet::S2: return "S2";
    case ConstraintSet::S3: return "S3";
    case ConstraintSet::S4: return "S4";
    }
    return "?";
}

double Evaluation::max_violation() const {
    return violations.empty() ? 0.0 : *std::max_element(violations.begin(), violations.end());
}

double Evaluation::total_violation() const {
    return std::accumulate(violations.begin(), violations.end(), 0.0);
}

namespace {

std::vector<FlowId> all_flow_ids(const Scenario& scenario) {
    std::vector<FlowId> ids;
    for (const Flow& f : scenario.flows()) ids.push_back(f.id);
    return ids;
}

std::string link_term(const Link& link) { return "T" + to_string(link); }

} // namespace

AllocationProblem::AllocationProblem(const Scenario& scenario)
    : AllocationProblem(scenario, all_flow_ids(scenario)) {}

AllocationProblem::AllocationProblem(const Scenario& scenario, const std::vector<FlowId>& decision_flows)
    : model_(std::make_shared<const ThroughputModel>(scenario)) {
    for (const Flow& f : scenario.flows()) {
        if (std::find(decision_flows.begin(), decision_flows.end(), f.id) != decision_flows.end()) {
            decision_flows_.push_back(f.id);
        }
    }
    if (decision_flows_.size() != decision_flows.size()) {
        throw ContractViolation("decision flows must be distinct flows of the scenario");
    }

    std::map<FlowId, std::size_t> aux;
    for (FlowId id : decision_flows_) {
        variables_.push_back({Variable::Kind::rate, id, "rate_f" + std::to_string(id)});
    }
    for (FlowId id : decision_flows_) {
        if (scenario.flow(id).hops() > 1) {
            aux[id] = variables_.size();
            variables_.push_back({Variable::Kind::auxiliary, id, "aux_f" + std::to_string(id)});
        }
    }

    for (FlowId id : decision_flows_) {
        const Flow& f = scenario.flow(id);
        if (f.hops() == 1) {
            objective_.push_back({ObjectiveTerm::Kind::link_throughput, id, f.links().front(), 0});
        } else {
            objective_.push_back({ObjectiveTerm::Kind::auxiliary, id, {}, aux.at(id)});
        }
    }

    // Listing order: S1, S2, S4, S3.
    auto add = [this](Constraint c) {
        c.label = "g" + std::to_string(constraints_.size() + 1);
        constraints_.push_back(std::move(c));
    };
    for (std::size_t v = 0; v < decision_flows_.size(); ++v) {
        for (bool upper : {false, true}) {
            Constraint c;
            c.set = ConstraintSet::S1;
            c.flow = decision_flows_[v];
            c.variable = v;
            c.upper = upper;
            add(c);
        }
    }
    for (FlowId id : decision_flows_) {
        const std::vector<Link> links = scenario.flow(id).links();
        for (std::size_t h = 0; h + 1 < links.size(); ++h) {
            Constraint c;
            c.set = ConstraintSet::S2;
            c.flow = id;
            c.upstream = links[h];
            c.downstream = links[h + 1];
            add(c);
        }
    }
    for (FlowId id : decision_flows_) {
        if (!aux.count(id)) continue;
        for (const Link& link : scenario.flow(id).links()) {
            Constraint c;
            c.set = ConstraintSet::S4;
            c.flow = id;
            c.variable = aux.at(id);
            c.link = link;
            add(c);
        }
    }
    for (FlowId id : decision_flows_) {
        if (!aux.count(id)) continue;
        for (bool upper : {false, true}) {
            Constraint c;
            c.set = ConstraintSet::S3;
            c.flow = id;
            c.variable = aux.at(id);
            c.upper = upper;
            add(c);
        }
    }
}

std::size_t AllocationProblem::count(ConstraintSet set) const {
    return static_cast<std::size_t>(std::count_if(constraints_.begin(), constraints_.end(),
                                                  [set](const Constraint& c) { return c.set == set; }));
}

RateVector AllocationProblem::rate_vector(std::span<const double> rates) const {
    if (rates.size() < decision_flows_.size()) throw std::invalid_argument("rate_vector: too few rates");
    RateVector out = RateVector::uniform(scenario(), 0.0);
    for (std::size_t v = 0; v < decision_flows_.size(); ++v) {
        out.set(decision_flows_[v], std::clamp(rates[v], 0.0, 1.0));
    }
    return out;
}

Evaluation AllocationProblem::evaluate(std::span<const double> point) const {
    if (point.size() != variables_.size()) {
        throw std::invalid_argument("evaluate: point has " + std::to_string(point.size()) + " entries, problem has " +
                                    std::to_string(variables_.size()) + " variables");
    }
    const RateVector rates = rate_vector(point);
    const std::vector<double> activity = activity_vector(rates, scenario());
    std::map<Link, double> throughput;
    std::vector<double> scratch;
    for (const LinkModel& m : model_->links()) throughput[m.link] = m.throughput(activity, scratch);

    Evaluation out;
    for (const ObjectiveTerm& term : objective_) {
        out.objective += term.kind == ObjectiveTerm::Kind::auxiliary ? point[term.variable] : throughput.at(term.link);
    }
    out.violations.reserve(constraints_.size());
    for (const Constraint& c : constraints_) {
        double excess = 0.0;
        switch (c.set) {
        case ConstraintSet::S1:
        case ConstraintSet::S3:
            excess = c.upper ? point[c.variable] - 1.0 : -point[c.variable];
            break;
        case ConstraintSet::S2:
            excess = throughput.at(c.upstream) - throughput.at(c.downstream);
            break;
        case ConstraintSet::S4:
            excess = point[c.variable] - throughput.at(c.link);
            break;
        }
        out.violations.push_back(std::max(0.0, excess));
    }
    return out;
}

std::vector<double> AllocationProblem::complete_point(std::span<const double> rates) const {
    if (rates.size() != decision_flows_.size()) throw std::invalid_argument("complete_point: wrong number of rates");
    std::vector<double> point(rates.begin(), rates.end());
    point.resize(variables_.size(), 0.0);
    const RateVector rv = rate_vector(rates);
    for (std::size_t v = rates.size(); v < variables_.size(); ++v) {
        point[v] = model_->path_throughput(scenario().flow(variables_[v].flow), rv);
    }
    return point;
}

Evaluation AllocationProblem::evaluate_eliminated(std::span<const double> rates) const {
    if (rates.size() != decision_flows_.size()) {
        throw std::invalid_argument("evaluate_eliminated: expected " + std::to_string(decision_flows_.size()) +
                                    " rates, got " + std::to_string(rates.size()));
    }
    const RateVector rv = rate_vector(rates);
    const auto per_link = model_->all_link_throughputs(rv);

    Evaluation out;
    for (FlowId id : decision_flows_) {
        const std::vector<double>& t = per_link.at(id);
        out.objective += *std::min_element(t.begin(), t.end());
    }
    for (const Constraint& c : constraints_) {
        double excess = 0.0;
        switch (c.set) {
        case ConstraintSet::S1:
            excess = c.upper ? rates[c.variable] - 1.0 : -rates[c.variable];
            break;
        case ConstraintSet::S2: {
            const Flow& f = scenario().flow(c.flow);
            const std::vector<Link> links = f.links();
            const auto h = static_cast<std::size_t>(std::find(links.begin(), links.end(), c.upstream) - links.begin());
            excess = per_link.at(c.flow)[h] - per_link.at(c.flow)[h + 1];
            break;
        }
        case ConstraintSet::S3:
        case ConstraintSet::S4:
            break; // the eliminated auxiliary sits on its bounds
        }
        out.violations.push_back(std::max(0.0, excess));
    }
    return out;
}

std::string AllocationProblem::dump() const {
    std::ostringstream out;
    out << "variables (" << variables_.size() << "):\n";
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        const Variable& var = variables_[v];
        out << "  x" << v << "  " << var.name << "  ";
        if (var.kind == Variable::Kind::rate) {
            out << "rate of flow " << var.flow << " (source node " << scenario().flow(var.flow).source << ")";
        } else {
            out << "auxiliary of flow " << var.flow;
        }
        out << "\n";
    }
    out << "objective: maximize\n";
    for (const ObjectiveTerm& term : objective_) {
        out << "  + ";
        if (term.kind == ObjectiveTerm::Kind::auxiliary) {
            out << variables_[term.variable].name;
        } else {
            out << link_term(term.link);
        }
        out << "\n";
    }
    out << "constraints (" << constraints_.size() << "):\n";
    for (const Constraint& c : constraints_) {
        out << "  " << c.label << " [" << to_string(c.set) << "] ";
        switch (c.set) {
        case ConstraintSet::S1:
        case ConstraintSet::S3:
            out << (c.upper ? variables_[c.variable].name + " <= 1" : "0 <= " + variables_[c.variable].name);
            break;
        case ConstraintSet::S2:
            out << link_term(c.upstream) << " <= " << link_term(c.downstream);
            break;
        case ConstraintSet::S4:
            out << variables_[c.variable].name << " <= " << link_term(c.link);
            break;
        }
        out << "\n";
    }
    return out.str();
}

AllocationProblem build_problem(const Scenario& scenario) { return AllocationProblem(scenario); }

AllocationProblem build_single_flow_problem(const Scenario& scenario, FlowId flow) {
    return AllocationProblem(scenario, {flow});
}

void SolverConfig::validate() const {
    if (restarts < 1 || iterations_per_temperature < 1) {
        throw std::invalid_argument("solver restarts and iterations must be at least 1");
    }
    if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) {
        throw std::invalid_argument("cooling_factor must lie in (0, 1)");
    }
    if (!(initial_temperature > 0.0) || !(min_temperature > 0.0)) {
        throw std::invalid_argument("temperatures must be positive");
    }
    if (!(step_sigma > 0.0)) throw std::invalid_argument("step_sigma must be positive");
    if (!(penalty_coefficient >= 0.0)) throw std::invalid_argument("penalty_coefficient must be non-negative");
    if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

bool repair(const AllocationProblem& problem, std::vector<double>& rates) {
    const Scenario& scenario = problem.scenario();
    const ThroughputModel& model = problem.model();
    constexpr int kMaxRounds = 100;
    bool feasible = true;
    for (int round = 0; round < kMaxRounds; ++round) {
        bool changed = false;
        feasible = true;
        for (std::size_t v = 0; v < rates.size(); ++v) {
            const FlowId id = problem.decision_flows()[v];
            const Flow& f = scenario.flow(id);
            if (f.hops() < 2) continue;

            std::vector<double> probe = rates;
            probe[v] = 0.0;
            const std::vector<double> at0 = model.all_link_throughputs(problem.rate_vector(probe)).at(id);
            probe[v] = 1.0;
            const std::vector<double> at1 = model.all_link_throughputs(problem.rate_vector(probe)).at(id);

            // S2 pair h: d(q) = d0 + slope*q <= 0.
            double lo = 0.0;
            double hi = 1.0;
            for (std::size_t h = 0; h + 1 < at0.size(); ++h) {
                const double d0 = at0[h] - at0[h + 1];
                const double slope = (at1[h] - at1[h + 1]) - d0;
                if (slope > 0.0) {
                    hi = std::min(hi, -d0 / slope);
                } else if (slope < 0.0) {
                    lo = std::max(lo, -d0 / slope);
                } else if (d0 > 0.0) {
                    hi = -1.0;
                }
            }
            if (hi < lo || hi < 0.0 || rates[v] < lo) {
                feasible = false;
                continue;
            }
            if (rates[v] > hi) {
                rates[v] = std::max(0.0, hi);
                changed = true;
            }
        }
        if (!changed) break;
    }
    return feasible;
}

namespace {

struct Candidate {
    std::vector<double> rates;
    double objective = -1.0;
    bool feasible = false;
};

class Annealer {
public:
    Annealer(const AllocationProblem& problem, const SolverConfig& config) : problem_(problem), config_(config) {}

    Candidate run(int restart) const {
        Rng rng = make_rng(config_.seed, static_cast<std::uint64_t>(restart));
        const std::size_t dim = problem_.rate_count();
        std::vector<double> x(dim);
        for (double& v : x) v = uniform01(rng);
        double fx = penalized(x);
        std::vector<double> best = x;
        double best_f = fx;

        std::vector<double> y(dim);
        for (double t = config_.initial_temperature; t > config_.min_temperature; t *= config_.cooling_factor) {
            for (int it = 0; it < config_.iterations_per_temperature; ++it) {
                for (std::size_t d = 0; d < dim; ++d) {
                    y[d] = std::clamp(x[d] + config_.step_sigma * gaussian(rng), 0.0, 1.0);
                }
                const double fy = penalized(y);
                const double delta = fy - fx;
                // Draw unconditionally so the stream does not depend on the outcome.
                const double u = uniform01(rng);
                if (delta <= 0.0 || u < std::exp(-delta / t)) {
                    x.swap(y);
                    fx = fy;
                    if (fx < best_f) {
                        best_f = fx;
                        best = x;
                    }
                }
            }
        }
        return polish(std::move(best));
    }

    Candidate finish(std::vector<double> rates) const {
        Candidate c;
        repair(problem_, rates);
        for (double& r : rates) {
            if (r < kUnusedRate) r = 0.0;
        }
        const bool repairable = repair(problem_, rates);
        const Evaluation e = problem_.evaluate(problem_.complete_point(rates));
        c.feasible = repairable && e.max_violation() <= kFeasibilityTolerance;
        c.objective = e.objective;
        c.rates = std::move(rates);
        return c;
    }

private:
    double penalized(const std::vector<double>& x) const {
        const Evaluation e = problem_.evaluate_eliminated(x);
        return -e.objective + config_.penalty_coefficient * e.total_violation();
    }

    static double gaussian(Rng& rng) {
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Value of a repaired point, or -1 if repair fails.
    double repaired_value(std::vector<double>& x) const {
        if (!repair(problem_, x)) return -1.0;
        const Evaluation e = problem_.evaluate_eliminated(x);
        return e.max_violation() <= kFeasibilityTolerance * 1e-3 ? e.objective : -1.0;
    }

    /// Compass search over repaired points with a halving step.
    Candidate polish(std::vector<double> x) const {
        constexpr double kInitialStep = 0.05;
        constexpr double kFinalStep = 1e-9;
        constexpr int kMaxEvaluations = 20000;
        double fx = repaired_value(x);
        int evaluations = 0;
        std::vector<double> y;
        for (double step = kInitialStep; step > kFinalStep && evaluations < kMaxEvaluations;) {
            bool improved = false;
            for (std::size_t d = 0; d < x.size() && !improved; ++d) {
                for (double sign : {1.0, -1.0}) {
                    y = x;
                    y[d] = std::clamp(x[d] + sign * step, 0.0, 1.0);
                    if (y[d] == x[d]) continue;
                    const double fy = repaired_value(y);
                    ++evaluations;
                    if (fy > fx + 1e-15) {
                        x = y;
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return finish(std::move(x));
    }

    const AllocationProblem& problem_;
    const SolverConfig& config_;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.objective > b.objective;
}

AllocationResult make_result(const AllocationProblem& problem, const Candidate& best, int restart) {
    AllocationResult out;
    out.rates = problem.rate_vector(best.rates);
    const Evaluation e = problem.evaluate(problem.complete_point(best.rates));
    out.aat = problem.model().aggregate_throughput(out.rates);
    out.feasible = best.feasible;
    out.max_violation = e.max_violation();
    for (const Flow& f : problem.scenario().flows()) out.per_flow[f.id] = problem.model().path_throughput(f, out.rates);
    out.winning_restart = restart;
    return out;
}

} // namespace

AllocationResult solve(const AllocationProblem& problem, const SolverConfig& config) {
    config.validate();
    const Annealer annealer(problem, config);
    if (problem.rate_count() == 0) return make_result(problem, annealer.finish({}), 0);

    std::vector<Candidate> results(static_cast<std::size_t>(config.restarts));
    int threads = config.threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                                      : config.threads;
    threads = std::min(threads, config.restarts);
    if (threads <= 1) {
        for (int r = 0; r < config.restarts; ++r) results[static_cast<std::size_t>(r)] = annealer.run(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < config.restarts; r = next++) results[static_cast<std::size_t>(r)] = annealer.run(r);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    // Strict comparison keeps the lowest restart index on ties.
    int winner = 0;
    for (int r = 1; r < config.restarts; ++r) {
        if (better(results[static_cast<std::size_t>(r)], results[static_cast<std::size_t>(winner)])) winner = r;
    }
    return make_result(problem, results[static_cast<std::size_t>(winner)], winner);
}

AllocationResult solve_best_path(const Scenario& scenario, const SolverConfig& config) {
    const Flow& best = scenario.best_path();
    return solve(build_single_flow_problem(scenario, best.id), config);
}

ConvexityCheck nonconvexity_condition(const ToyProbabilities& p, double relay_q) {
    if (!(relay_q > 0.0 && relay_q <= 1.0)) {
        throw ContractViolation("nonconvexity_condition: relay q must lie in (0, 1]");
    }
    ConvexityCheck out;
    out.lhs = p.relay_with_3 - p.relay_with_1_3;
    out.rhs = (1.0 - relay_q) / relay_q * (p.first_alone - p.first_with_3) + p.relay_alone - p.relay_with_1;
    out.holds = out.lhs < out.rhs;
    return out;
}

namespace {

struct ToyRoles {
    NodeId first = 0; // "1": source of the two-hop path
    NodeId relay = 0; // "2"
    NodeId other = 0; // "3": source of the single-hop path
};

ToyRoles toy_roles(const Scenario& scenario) {
    auto shape_error = [] {
        return ScenarioError(ScenarioError::Kind::shape,
                             "scenario is not the two-path toy shape (one two-hop path and one single-hop path)");
    };
    if (scenario.flows().size() != 2) throw shape_error();
    const Flow* two_hop = nullptr;
    const Flow* one_hop = nullptr;
    for (const Flow& f : scenario.flows()) {
        if (f.hops() == 2) two_hop = &f;
        if (f.hops() == 1) one_hop = &f;
    }
    if (!two_hop || !one_hop) throw shape_error();
    if (scenario.policy() == InterferencePolicy::all_nodes && scenario.nodes().size() != 4) throw shape_error();
    return {two_hop->path[0], two_hop->path[1], one_hop->path[0]};
}

} // namespace

ToyProbabilities toy_probabilities(const Scenario& scenario) {
    const ToyRoles r = toy_roles(scenario);
    const NodeId dest = scenario.destination();
    ToyProbabilities p;
    p.relay_alone = scenario.success_probability(r.relay, dest, {r.relay});
    p.relay_with_1 = scenario.success_probability(r.relay, dest, {r.relay, r.first});
    p.relay_with_3 = scenario.success_probability(r.relay, dest, {r.relay, r.other});
    p.relay_with_1_3 = scenario.success_probability(r.relay, dest, {r.relay, r.first, r.other});
    p.first_alone = scenario.success_probability(r.first, r.relay, {r.first});
    p.first_with_3 = scenario.success_probability(r.first, r.relay, {r.first, r.other});
    return p;
}

ConvexityCheck nonconvexity_condition(const Scenario& scenario) {
    const ToyRoles r = toy_roles(scenario);
    return nonconvexity_condition(toy_probabilities(scenario), scenario.node(r.relay).q);
}

} // namespace mprflow
