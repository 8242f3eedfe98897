#include "mprflow/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "mprflow/scenario_io.hpp"

namespace mprflow {

namespace {

std::string num(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string header_comment(const char* command, const ScenarioInput& input, std::uint64_t seed) {
    return std::string("# mprflow ") + MPRFLOW_VERSION + " command=" + command + " seed=" + std::to_string(seed) +
           " scenario=" + input.hash + "\n";
}

struct SweepPoint {
    std::string label; ///< gamma column text
    Scenario scenario;
};

std::vector<SweepPoint> sweep_points(const ScenarioInput& input, const CommandOptions& options) {
    std::vector<SweepPoint> points;
    if (options.sweep) {
        for (double g : options.sweep->gamma_values) points.push_back({num(g), input.scenario.with_sinr_threshold(g)});
    } else if (options.gamma) {
        points.push_back({num(*options.gamma), input.scenario.with_sinr_threshold(*options.gamma)});
    } else {
        const auto g = input.scenario.uniform_sinr_threshold();
        points.push_back({g ? num(*g) : std::string("mixed"), input.scenario});
    }
    return points;
}

/// Runs fn(0..n-1) on a worker pool; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    int threads = workers == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : workers;
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        slots[i].emplace(fn(i));
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

SolverConfig sweep_solver(const CommandOptions& options) {
    SolverConfig cfg = options.solver;
    cfg.threads = 1; // parallelism lives at the sweep level
    return cfg;
}

RateVector explicit_rates(const Scenario& scenario, const std::vector<double>& values) {
    if (values.size() != scenario.flows().size()) {
        throw UsageError("--rates needs " + std::to_string(scenario.flows().size()) + " values, got " +
                         std::to_string(values.size()));
    }
    RateVector rates;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] >= 0.0 && values[k] <= 1.0)) throw UsageError("--rates entries must lie in [0, 1]");
        rates.set(scenario.flows()[k].id, values[k]);
    }
    return rates;
}

} // namespace

SweepSpec SweepSpec::parse(std::string_view text) {
    double start = 0, stop = 0, step = 0;
    char tail = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &tail) != 3) {
        throw UsageError("sweep must be start:stop:step, got '" + s + "'");
    }
    if (!(start > 0.0) || !(step > 0.0) || !(stop >= start)) {
        throw UsageError("sweep needs 0 < start <= stop and step > 0");
    }
    SweepSpec spec;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= n; ++k) spec.gamma_values.push_back(start + static_cast<double>(k) * step);
    return spec;
}

std::vector<double> parse_rate_list(std::string_view text) {
    std::vector<double> out;
    std::stringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw UsageError("cannot parse rate '" + item + "'");
        out.push_back(value);
    }
    if (out.empty()) throw UsageError("--rates is empty");
    return out;
}

ScenarioInput load_input(const std::string& path, std::optional<InterferencePolicy> policy) {
    const std::string text = read_text_file(path);
    Scenario scenario = load_scenario(text);
    if (policy) scenario = scenario.with_policy(*policy);
    return {std::move(scenario), content_hash(text)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    Rng rng = make_rng(seed, index);
    return rng();
}

std::string cmd_solve(const ScenarioInput& input, const CommandOptions& options) {
    const std::vector<SweepPoint> points = sweep_points(input, options);
    const SolverConfig cfg = sweep_solver(options);
    const auto results = parallel_map<AllocationResult>(points.size(), options.workers, [&](std::size_t i) {
        return solve(build_problem(points[i].scenario), cfg);
    });

    const auto& flows = input.scenario.flows();
    std::ostringstream out;
    out << header_comment("solve", input, cfg.seed);
    out << "gamma";
    for (const Flow& f : flows) out << ",rate_f" << f.id;
    for (const Flow& f : flows) out << ",throughput_f" << f.id;
    out << ",aat,feasible,seed\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const AllocationResult& r = results[i];
        out << points[i].label;
        for (const Flow& f : flows) out << "," << num(r.rates.at(f.id));
        for (const Flow& f : flows) out << "," << num(r.per_flow.at(f.id));
        out << "," << num(r.aat) << "," << (r.feasible ? "true" : "false") << "," << cfg.seed << "\n";
    }
    return out.str();
}

std::string cmd_simulate(const ScenarioInput& input, const CommandOptions& options) {
    if (options.warmup >= options.slots) throw UsageError("--slots must exceed --warmup");
    const std::vector<SweepPoint> points = sweep_points(input, options);
    const SolverConfig cfg = sweep_solver(options);
    std::optional<RateVector> fixed;
    if (options.rates) fixed = explicit_rates(input.scenario, *options.rates);

    struct Row {
        SimStats stats;
        double analytic = 0.0;
        std::optional<bool> bounded;
    };
    const auto rows = parallel_map<Row>(points.size(), options.workers, [&](std::size_t i) {
        const Scenario& sc = points[i].scenario;
        RateVector rates = fixed ? *fixed : solve(build_problem(sc), cfg).rates;
        SimConfig sim;
        sim.slots = options.slots;
        sim.warmup_slots = options.warmup;
        sim.seed = derive_seed(cfg.seed, i);
        sim.rates = rates;
        sim.relay_discipline = options.relay_discipline;
        Row row;
        row.stats = run(sc, sim);
        row.analytic = aggregate_throughput(rates, sc);
        if (row.stats.measured_slots >= kMinDelaySlots) row.bounded = delay_bounded(row.stats, sc);
        return row;
    });

    const auto& flows = input.scenario.flows();
    std::ostringstream out;
    out << header_comment("simulate", input, cfg.seed);
    out << "gamma";
    for (const Flow& f : flows) out << ",sim_throughput_f" << f.id;
    out << ",sim_aat,analytic_aat,relative_gap";
    for (const Flow& f : flows) out << ",delay_mean_f" << f.id << ",delay_p99_f" << f.id;
    out << ",delay_bounded\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Row& r = rows[i];
        out << points[i].label;
        for (const Flow& f : flows) out << "," << num(r.stats.per_flow_throughput.at(f.id));
        const double gap = r.analytic > 0.0 ? (r.stats.aat - r.analytic) / r.analytic : 0.0;
        out << "," << num(r.stats.aat) << "," << num(r.analytic) << "," << num(gap);
        for (const Flow& f : flows) {
            const DelayStats& d = r.stats.delay.at(f.id);
            out << "," << num(d.mean) << "," << num(d.p99);
        }
        out << "," << (r.bounded ? (*r.bounded ? "true" : "false") : "na") << "\n";
    }
    return out.str();
}

BaselineReport cmd_baseline(const ScenarioInput& input, const CommandOptions& options) {
    const std::vector<SweepPoint> points = sweep_points(input, options);
    const SolverConfig cfg = sweep_solver(options);
    struct Row {
        double multipath = 0.0;
        double best = 0.0;
    };
    const auto rows = parallel_map<Row>(points.size(), options.workers, [&](std::size_t i) {
        const Scenario& sc = points[i].scenario;
        return Row{solve(build_problem(sc), cfg).aat, solve_best_path(sc, cfg).aat};
    });

    BaselineReport report;
    std::ostringstream out;
    out << header_comment("baseline", input, cfg.seed);
    out << "gamma,multipath_aat,best_path_aat,ratio\n";
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Row& r = rows[i];
        // Identical allocations (single flow) report exactly 1.
        const double ratio = r.multipath == r.best ? 1.0 : r.multipath / r.best;
        total += ratio;
        out << points[i].label << "," << num(r.multipath) << "," << num(r.best) << "," << num(ratio) << "\n";
    }
    report.csv = out.str();
    report.mean_ratio = points.empty() ? 0.0 : total / static_cast<double>(points.size());
    return report;
}

std::string cmd_check_convexity(const ScenarioInput& input, const CommandOptions& options) {
    const Scenario sc = options.gamma ? input.scenario.with_sinr_threshold(*options.gamma) : input.scenario;
    const ConvexityCheck c = nonconvexity_condition(sc);
    return "lhs=" + num(c.lhs) + "\nrhs=" + num(c.rhs) + "\nholds=" + (c.holds ? "true" : "false") + "\n";
}

std::string cmd_dump_problem(const ScenarioInput& input, const CommandOptions& options) {
    const Scenario sc = options.gamma ? input.scenario.with_sinr_threshold(*options.gamma) : input.scenario;
    return "# mprflow " + std::string(MPRFLOW_VERSION) + " command=dump-problem scenario=" + input.hash + "\n" +
           build_problem(sc).dump();
}

} // namespace mprflow
