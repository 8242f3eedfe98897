// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mprflow/optimizer.hpp"
#include "mprflow/simulator.hpp"
#include "oracles.hpp"

using namespace mprflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> sweep() {
    std::vector<double> g;
    for (int k = 1; k <= 8; ++k) g.push_back(0.25 * k);
    return g;
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(const std::string& text) {
    std::printf("  info: %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Solved {
    Scenario scenario;
    AllocationResult result;
};

// Every solver output produced in this run, for the feasibility audit.
std::vector<Solved> audit_log;

AllocationResult solve_logged(const AllocationProblem& problem, const SolverConfig& config) {
    AllocationResult r = solve(problem, config);
    audit_log.push_back({problem.scenario(), r});
    return r;
}

std::vector<AllocationResult> toy_sweep;

void toy_policy() {
    const Scenario toy = oracle::load("toy");
    const auto t0 = Clock::now();
    for (double gamma : sweep()) toy_sweep.push_back(solve_logged(build_problem(toy.with_sinr_threshold(gamma)), {}));
    const double elapsed = seconds_since(t0);

    bool ok = elapsed < 10.0;
    const auto gammas = sweep();
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        const AllocationResult& r = toy_sweep[k];
        info(fmt("gamma=%.2f q1=%.6f q3=%.6f aat=%.6f", gammas[k], r.rates.at(1), r.rates.at(2), r.aat));
        ok = ok && r.feasible;
        if (gammas[k] <= 1.0 + 1e-9) {
            ok = ok && std::abs(r.rates.at(1) - 1.0) <= 1e-3 && std::abs(r.rates.at(2) - 1.0) <= 1e-3;
        } else if (k > 0 && gammas[k - 1] > 1.0 + 1e-9) {
            ok = ok && r.rates.at(2) < toy_sweep[k - 1].rates.at(2);
        }
    }
    report(1, ok, fmt("toy sweep full rate up to 1.0, r2 strictly decreasing above, %.2f s", elapsed));
}

void grid_rates() {
    const Scenario grid = oracle::load("grid_three_flows");
    const AllocationResult r = solve_logged(build_problem(grid), {});
    const double expected[] = {0.496, 0.222, 0.496};
    bool ok = r.feasible;
    for (int f = 1; f <= 3; ++f) ok = ok && std::abs(r.rates.at(f) - expected[f - 1]) <= 0.02;
    report(2, ok, fmt("grid three flows at gamma=0.5: (%.4f, %.4f, %.4f)", r.rates.at(1), r.rates.at(2), r.rates.at(3)));
}

void closed_form() {
    const Scenario toy = oracle::load("toy");
    Rng rng = make_rng(2718, 0);
    double worst = 0.0;
    int points = 0;
    for (double gamma : sweep()) {
        const Scenario s = toy.with_sinr_threshold(gamma);
        oracle::ToyClosedForm cf;
        cf.gamma = gamma;
        for (int k = 0; k < 125; ++k, ++points) {
            const double q1 = uniform01(rng), q3 = uniform01(rng);
            const RateVector r({{1, q1}, {2, q3}});
            const double got[] = {link_throughput({1, 2}, r, s).value, link_throughput({2, 0}, r, s).value,
                                  link_throughput({3, 0}, r, s).value};
            const double want[] = {cf.t12(q1, q3), cf.t20(q1, q3), cf.t30(q1, q3)};
            for (int l = 0; l < 3; ++l) worst = std::max(worst, std::abs(got[l] - want[l]));
        }
    }
    report(3, worst <= 1e-12, fmt("%d random points, max abs error %.3g", points, worst));
}

void simulation_agreement() {
    bool ok = true;
    std::string detail;
    const char* names[] = {"toy", "grid_two_flows", "grid_three_flows"};
    for (const char* name : names) {
        const Scenario s = oracle::load(name);
        const AllocationResult opt = solve_logged(build_problem(s), {});
        for (auto discipline : {RelayDiscipline::saturated, RelayDiscipline::queue_gated}) {
            SimConfig c;
            c.rates = opt.rates;
            c.seed = 11;
            c.relay_discipline = discipline;
            const auto t0 = Clock::now();
            const SimStats stats = run(s, c);
            const double elapsed = seconds_since(t0);
            const double gap = std::abs(stats.aat - opt.aat) / opt.aat;
            if (discipline == RelayDiscipline::saturated) {
                ok = ok && gap < 0.05 && elapsed < 60.0;
                detail += fmt("%s %.2f%% (%.1f s) ", name, 100 * gap, elapsed);
            } else {
                info(fmt("%s with queue-gated relays: sim %.4f vs analytic %.4f, gap %.1f%%", name, stats.aat, opt.aat,
                         100 * gap));
            }
        }
    }
    report(4, ok, "saturated relays, 10^6 slots: " + detail);
}

void multipath_dominance() {
    bool ok = true;
    double mean_gain[2] = {0, 0};
    const char* names[] = {"grid_two_flows", "grid_three_flows"};
    for (int n = 0; n < 2; ++n) {
        const Scenario base = oracle::load(names[n]);
        for (double gamma : sweep()) {
            const Scenario s = base.with_sinr_threshold(gamma);
            const AllocationResult multi = solve_logged(build_problem(s), {});
            const AllocationResult single = solve_best_path(s, {});
            audit_log.push_back({s, single});
            ok = ok && multi.aat >= single.aat;
            mean_gain[n] += (multi.aat / single.aat - 1.0) / 8.0;
        }
        info(fmt("%s mean improvement over best path %.1f%%", names[n], 100 * mean_gain[n]));
    }
    ok = ok && mean_gain[1] > mean_gain[0];
    report(5, ok, fmt("multipath >= best path on both sweeps, mean gain %.1f%% vs %.1f%%", 100 * mean_gain[1],
                      100 * mean_gain[0]));
}

void grid_search() {
    bool ok = toy_sweep.size() == 8;
    double worst = 0.0;
    const auto gammas = sweep();
    for (std::size_t k = 0; k < toy_sweep.size(); ++k) {
        oracle::ToyClosedForm cf;
        cf.gamma = gammas[k];
        const oracle::GridOptimum best = oracle::toy_grid_search(cf);
        worst = std::max(worst, best.objective - toy_sweep[k].aat);
        ok = ok && toy_sweep[k].aat >= best.objective - 1e-3;
    }
    report(6, ok, fmt("largest shortfall against the 101x101 grid %.3g", worst));
}

void feasibility_audit() {
    bool ok = true;
    int audited = 0;
    double worst = 0.0;
    for (const Solved& s : audit_log) {
        if (!s.result.feasible) continue;
        const AllocationProblem p = build_problem(s.scenario);
        std::vector<double> rates;
        for (FlowId f : p.decision_flows()) rates.push_back(s.result.rates.at(f));
        const Evaluation e = p.evaluate(p.complete_point(rates));
        worst = std::max(worst, e.max_violation());
        ok = ok && e.max_violation() <= kFeasibilityTolerance;
        ++audited;
    }

    // Rate vectors that break flow conservation on a relay.
    struct Case {
        const char* name;
        double gamma;
        std::vector<double> rates;
    };
    const Case cases[] = {{"toy", 2.0, {1.0, 0.0}}, {"grid_three_flows", 0.5, {0.99, 0.222, 0.496}}};
    int flipped = 0;
    for (const Case& c : cases) {
        const Scenario s = oracle::load(c.name).with_sinr_threshold(c.gamma);
        const AllocationProblem p = build_problem(s);
        const bool violates = p.evaluate_eliminated(c.rates).max_violation() > kFeasibilityTolerance;
        SimConfig cfg;
        cfg.rates = p.rate_vector(c.rates);
        cfg.seed = 5;
        const bool bounded = delay_bounded(run(s, cfg), s);
        flipped += violates && !bounded;
    }
    ok = ok && audited > 0 && flipped == 2;
    report(7, ok, fmt("%d solver outputs re-verified (max violation %.3g), %d/2 violating inputs unbounded", audited,
                      worst, flipped));
}

void channel_oracle() {
    Rng cfg = make_rng(31337, 0);
    int within = 0;
    const int configs = 20;
    for (int c = 0; c < configs; ++c) {
        const double v = 0.5 + 1.5 * uniform01(cfg);
        const double signal = 1e-9 * (0.1 + uniform01(cfg));
        const int count = static_cast<int>(uniform01(cfg) * 6);
        std::vector<double> ks;
        for (int k = 0; k < count; ++k) ks.push_back(1e-9 * 0.3 * uniform01(cfg));
        const double noise = 2e-10 * uniform01(cfg);
        const double gamma = 0.1 + 1.9 * uniform01(cfg);
        const double expected = success_probability(signal, ks, noise, gamma, v);

        Rng rng = make_rng(31337, 1 + static_cast<std::uint64_t>(c));
        const int n = 200'000;
        int hits = 0;
        for (int i = 0; i < n; ++i) {
            const double s = sample_fading(rng, v) * signal;
            double interference = 0.0;
            for (double g : ks) interference += sample_fading(rng, v) * g;
            hits += s >= gamma * (noise + interference);
        }
        within += std::abs(double(hits) / n - expected) <= oracle::three_sigma(expected, n);
    }
    report(8, within == configs, fmt("%d/%d randomized configurations within 3 sigma", within, configs));
}

} // namespace

int main() {
    try {
        toy_policy();
        grid_rates();
        closed_form();
        simulation_agreement();
        multipath_dominance();
        grid_search();
        feasibility_audit();
        channel_oracle();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
