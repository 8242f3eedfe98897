// mprflow: throughput-optimal multipath rate allocation for random-access
// wireless networks with multi-packet reception.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mprflow/commands.hpp"

namespace {

struct Args {
    std::string scenario;
    std::string sweep;
    std::optional<double> gamma;
    std::uint64_t seed = 1;
    std::uint64_t slots = 1'000'000;
    std::uint64_t warmup = 10'000;
    int restarts = 8;
    int workers = 0;
    std::string rates;
    std::string out;
    std::string policy;
    std::string relay_discipline = "queue_gated";
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw mprflow::UsageError("cannot write " + path);
    file << text;
}

mprflow::CommandOptions to_options(const Args& a) {
    mprflow::CommandOptions o;
    if (!a.sweep.empty()) o.sweep = mprflow::SweepSpec::parse(a.sweep);
    if (a.gamma) {
        if (!(*a.gamma > 0.0)) throw mprflow::UsageError("--gamma must be positive");
        o.gamma = a.gamma;
    }
    o.solver.seed = a.seed;
    o.solver.restarts = a.restarts;
    if (a.restarts < 1) throw mprflow::UsageError("--restarts must be at least 1");
    o.slots = a.slots;
    o.warmup = a.warmup;
    o.workers = a.workers;
    if (!a.rates.empty()) o.rates = mprflow::parse_rate_list(a.rates);
    o.relay_discipline = *mprflow::parse_relay_discipline(a.relay_discipline);
    return o;
}

std::optional<mprflow::InterferencePolicy> policy_of(const Args& a) {
    if (a.policy.empty()) return std::nullopt;
    return mprflow::parse_policy(a.policy);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Throughput-optimal flow allocation over disjoint paths with multi-packet reception"};
    app.set_version_flag("--version", std::string(MPRFLOW_VERSION));
    app.require_subcommand(1);
    Args args;

    auto add_common = [&args](CLI::App* cmd) {
        cmd->add_option("scenario", args.scenario, "Scenario file (JSON)")->required();
        cmd->add_option("--interference-policy", args.policy, "Override the scenario's interference policy")
            ->check(CLI::IsMember({"all_nodes", "path_nodes"}));
    };
    auto add_sweep = [&args](CLI::App* cmd) {
        cmd->add_option("--sweep-gamma", args.sweep, "SINR threshold sweep start:stop:step");
        cmd->add_option("--gamma", args.gamma, "Single SINR threshold applied to every node");
        cmd->add_option("--seed", args.seed, "Solver / simulator seed");
        cmd->add_option("--restarts", args.restarts, "Simulated annealing restarts");
        cmd->add_option("--workers", args.workers, "Sweep worker threads (0 = all cores)");
        cmd->add_option("--out", args.out, "Output CSV path (default stdout)");
    };

    CLI::App* solve = app.add_subcommand("solve", "Throughput-optimal rates per SINR threshold");
    add_common(solve);
    add_sweep(solve);

    CLI::App* simulate = app.add_subcommand("simulate", "Slotted Monte Carlo run against the analytic model");
    add_common(simulate);
    add_sweep(simulate);
    simulate->add_option("--slots", args.slots, "Slots per run");
    simulate->add_option("--warmup", args.warmup, "Warm-up slots excluded from statistics");
    simulate->add_option("--relay-discipline", args.relay_discipline,
                         "queue_gated: empty relays stay silent; saturated: relays always contend")
        ->check(CLI::IsMember({"queue_gated", "saturated"}));
    simulate->add_option("--rates", args.rates, "Comma-separated source rates in flow order (default: solve first)");

    CLI::App* baseline = app.add_subcommand("baseline", "Multipath allocation versus the best single path");
    add_common(baseline);
    add_sweep(baseline);

    CLI::App* convexity = app.add_subcommand("check-convexity", "Evaluate the toy-topology non-convexity condition");
    add_common(convexity);
    convexity->add_option("--gamma", args.gamma, "SINR threshold applied to every node");

    CLI::App* dump = app.add_subcommand("dump-problem", "Print the optimisation problem");
    add_common(dump);
    dump->add_option("--gamma", args.gamma, "SINR threshold applied to every node");
    dump->add_option("--out", args.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? mprflow::exit_code::ok : mprflow::exit_code::usage;
    }

    try {
        const mprflow::CommandOptions options = to_options(args);
        const mprflow::ScenarioInput input = mprflow::load_input(args.scenario, policy_of(args));
        if (solve->parsed()) {
            write_output(args.out, mprflow::cmd_solve(input, options));
        } else if (simulate->parsed()) {
            write_output(args.out, mprflow::cmd_simulate(input, options));
        } else if (baseline->parsed()) {
            const mprflow::BaselineReport report = mprflow::cmd_baseline(input, options);
            write_output(args.out, report.csv);
            (args.out.empty() ? std::cerr : std::cout) << "mean_ratio=" << report.mean_ratio << "\n";
        } else if (convexity->parsed()) {
            std::cout << mprflow::cmd_check_convexity(input, options);
        } else if (dump->parsed()) {
            write_output(args.out, mprflow::cmd_dump_problem(input, options));
        }
    } catch (const mprflow::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return mprflow::exit_code::usage;
    } catch (const mprflow::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return mprflow::exit_code::scenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mprflow::exit_code::internal;
    }
    return mprflow::exit_code::ok;
}
