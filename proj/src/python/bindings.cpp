#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mprflow/commands.hpp"
#include "mprflow/optimizer.hpp"
#include "mprflow/scenario_io.hpp"
#include "mprflow/simulator.hpp"

namespace py = pybind11;
using namespace mprflow;

namespace {

SolverConfig solver_config(std::uint64_t seed, int restarts) {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    return cfg;
}

py::dict to_dict(const AllocationResult& r) {
    py::dict d;
    d["rates"] = r.rates.values();
    d["aat"] = r.aat;
    d["feasible"] = r.feasible;
    d["max_violation"] = r.max_violation;
    d["per_flow"] = r.per_flow;
    return d;
}

py::dict to_dict(const SimStats& s) {
    py::dict d;
    d["measured_slots"] = s.measured_slots;
    d["per_flow_throughput"] = s.per_flow_throughput;
    d["aat"] = s.aat;
    py::dict links;
    for (const auto& [link, l] : s.links) {
        py::dict entry;
        entry["attempts"] = l.attempts;
        entry["successes"] = l.successes;
        entry["success_rate"] = l.success_rate;
        entry["throughput"] = l.throughput;
        links[py::make_tuple(link.tx, link.rx)] = entry;
    }
    d["links"] = links;
    py::dict delay;
    for (const auto& [flow, ds] : s.delay) delay[py::int_(flow)] = py::make_tuple(ds.mean, ds.p99, ds.samples);
    d["delay"] = delay;
    d["max_queue"] = s.max_queue;
    py::dict slopes;
    for (const auto& [node, trend] : s.queue_trend) slopes[py::int_(node)] = trend.slope();
    d["queue_slope"] = slopes;
    d["injected"] = s.injected;
    d["delivered"] = s.delivered;
    d["in_network"] = s.in_network;
    return d;
}

} // namespace

PYBIND11_MODULE(_mprflow, m) {
    m.doc() = "Throughput-optimal multipath rate allocation with multi-packet reception";
    m.attr("__version__") = MPRFLOW_VERSION;

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<IntractableEnumeration>(m, "IntractableEnumeration", PyExc_RuntimeError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

    m.def("rx_power_factor", &rx_power_factor, py::arg("tx_power"), py::arg("distance"), py::arg("alpha"));
    m.def(
        "success_probability",
        [](double signal, const std::vector<double>& interferers, double noise, double gamma, double v) {
            return success_probability(signal, interferers, noise, gamma, v);
        },
        py::arg("signal"), py::arg("interferers"), py::arg("noise"), py::arg("sinr_threshold"), py::arg("v") = 1.0);

    py::class_<Scenario>(m, "Scenario")
        .def_static("from_json", &load_scenario, py::arg("text"))
        .def_static("from_file", [](const std::string& path) { return load_scenario_file(path); }, py::arg("path"))
        .def("to_json", &serialize)
        .def_property_readonly("destination", &Scenario::destination)
        .def_property_readonly("node_ids", [](const Scenario& s) {
            std::vector<NodeId> ids;
            for (const NodeSpec& n : s.nodes()) ids.push_back(n.id);
            return ids;
        })
        .def_property_readonly("flows", [](const Scenario& s) {
            std::vector<std::pair<FlowId, std::vector<NodeId>>> out;
            for (const Flow& f : s.flows()) out.emplace_back(f.id, f.path);
            return out;
        })
        .def("interferer_set", [](const Scenario& s, NodeId tx, NodeId rx) { return s.interferer_set({tx, rx}); })
        .def("end_to_end_success", [](const Scenario& s, FlowId id) { return s.end_to_end_success(s.flow(id)); })
        .def("best_path", [](const Scenario& s) { return s.best_path().id; })
        .def("with_sinr_threshold", &Scenario::with_sinr_threshold, py::arg("gamma"))
        .def("success_probability", &Scenario::success_probability, py::arg("tx"), py::arg("rx"), py::arg("active"));

    m.def(
        "link_throughput",
        [](const Scenario& s, NodeId tx, NodeId rx, const std::map<FlowId, double>& rates) {
            const LinkThroughputResult r = link_throughput({tx, rx}, RateVector(rates), s);
            return py::make_tuple(r.value, r.terms_evaluated);
        },
        py::arg("scenario"), py::arg("tx"), py::arg("rx"), py::arg("rates"));
    m.def(
        "path_throughput",
        [](const Scenario& s, FlowId flow, const std::map<FlowId, double>& rates) {
            return path_throughput(s.flow(flow), RateVector(rates), s);
        },
        py::arg("scenario"), py::arg("flow"), py::arg("rates"));
    m.def(
        "aggregate_throughput",
        [](const Scenario& s, const std::map<FlowId, double>& rates) { return aggregate_throughput(RateVector(rates), s); },
        py::arg("scenario"), py::arg("rates"));

    py::class_<AllocationProblem>(m, "AllocationProblem")
        .def(py::init<const Scenario&>(), py::arg("scenario"))
        .def_property_readonly("variables", [](const AllocationProblem& p) {
            std::vector<std::string> names;
            for (const Variable& v : p.variables()) names.push_back(v.name);
            return names;
        })
        .def_property_readonly("constraint_count", [](const AllocationProblem& p) { return p.constraints().size(); })
        .def("dump", &AllocationProblem::dump)
        .def("evaluate", [](const AllocationProblem& p, const std::vector<double>& point) {
            const Evaluation e = p.evaluate(point);
            return py::make_tuple(e.objective, e.violations);
        });

    m.def(
        "solve",
        [](const Scenario& s, std::uint64_t seed, int restarts) {
            AllocationResult r;
            {
                py::gil_scoped_release release;
                r = solve(build_problem(s), solver_config(seed, restarts));
            }
            return to_dict(r);
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("restarts") = 8);
    m.def(
        "solve_best_path",
        [](const Scenario& s, std::uint64_t seed, int restarts) {
            return to_dict(solve_best_path(s, solver_config(seed, restarts)));
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("restarts") = 8);

    m.def(
        "simulate",
        [](const Scenario& s, const std::map<FlowId, double>& rates, std::uint64_t slots, std::uint64_t warmup,
           std::uint64_t seed, const std::string& relay_discipline) {
            const auto discipline = parse_relay_discipline(relay_discipline);
            if (!discipline) throw py::value_error("unknown relay discipline '" + relay_discipline + "'");
            SimConfig cfg;
            cfg.relay_discipline = *discipline;
            cfg.slots = slots;
            cfg.warmup_slots = warmup;
            cfg.seed = seed;
            cfg.rates = RateVector(rates);
            SimStats stats;
            {
                py::gil_scoped_release release;
                stats = run(s, cfg);
            }
            py::dict d = to_dict(stats);
            d["delay_bounded"] = stats.measured_slots >= kMinDelaySlots ? py::cast(delay_bounded(stats, s)) : py::none();
            return d;
        },
        py::arg("scenario"), py::arg("rates"), py::arg("slots") = 1'000'000, py::arg("warmup") = 10'000,
        py::arg("seed") = 1, py::arg("relay_discipline") = "queue_gated");

    m.def(
        "nonconvexity_condition",
        [](const Scenario& s) {
            const ConvexityCheck c = nonconvexity_condition(s);
            return py::make_tuple(c.holds, c.lhs, c.rhs);
        },
        py::arg("scenario"));
}
