#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mprflow/channel.hpp"
#include "mprflow/scenario_io.hpp"
#include "oracles.hpp"

using namespace mprflow;

namespace {

NodeSpec node(NodeId id, double x, double y, Role role, double q = 0.0) {
    return {id, x, y, RadioSpec{0.1, 7e-11, 0.5}, role, q};
}

ScenarioError::Kind kind_of(auto&& build) {
    try {
        build();
    } catch (const ScenarioError& e) {
        return e.kind();
    }
    FAIL("expected ScenarioError");
    return ScenarioError::Kind::parse;
}

} // namespace

TEST_CASE("the bundled grid loads with sixteen nodes") {
    const Scenario grid = oracle::load("grid_two_flows");
    CHECK(grid.nodes().size() == 16);
    CHECK(grid.flows().size() == 2);
    CHECK(grid.destination() == 15);
    CHECK(grid.flow(1).path == std::vector<NodeId>{3, 7, 11, 15});
    CHECK(grid.flow(2).path == std::vector<NodeId>{0, 5, 10, 15});
    CHECK(oracle::load("grid_three_flows").flows().size() == 3);
}

TEST_CASE("flows must be node-disjoint apart from the destination") {
    std::vector<NodeSpec> nodes{node(0, 0, 0, Role::destination), node(1, 200, 0, Role::source),
                                node(2, 0, 200, Role::source), node(5, 100, 100, Role::relay, 0.5)};
    std::vector<Flow> flows{{1, 1, {1, 5, 0}}, {2, 2, {2, 5, 0}}};
    CHECK(kind_of([&] { Scenario s(nodes, flows, {}); }) == ScenarioError::Kind::not_disjoint);

    CHECK_NOTHROW(Scenario(nodes, {}, {}));
}

TEST_CASE("each malformed scenario reports its own error kind") {
    const std::vector<NodeSpec> good{node(0, 0, 0, Role::destination), node(1, 100, 0, Role::source),
                                     node(2, 50, 50, Role::relay, 0.3)};
    const ChannelParams ch{};
    using K = ScenarioError::Kind;

    auto with = [&](auto mutate) {
        auto nodes = good;
        std::vector<Flow> flows{{1, 1, {1, 2, 0}}};
        mutate(nodes, flows);
        return kind_of([&] { Scenario s(nodes, flows, ch); });
    };

    CHECK(with([](auto& n, auto&) { n[2].id = 1; }) == K::duplicate_id);
    CHECK(with([](auto& n, auto&) { n[0].role = Role::relay; }) == K::destination);
    CHECK(with([](auto& n, auto&) { n[2].role = Role::destination; }) == K::destination);
    CHECK(with([](auto&, auto& f) { f[0].path = {1, 9, 0}; }) == K::unknown_node);
    CHECK(with([](auto&, auto& f) { f[0].path = {1, 2}; }) == K::bad_path);
    CHECK(with([](auto&, auto& f) { f[0].path = {2, 0}; }) == K::bad_path);
    CHECK(with([](auto&, auto& f) { f[0].path = {1}; }) == K::bad_path);
    CHECK(with([](auto& n, auto&) { n[2].q = 1.5; }) == K::invalid_value);
    CHECK(with([](auto& n, auto&) { n[2].radio.tx_power = -1.0; }) == K::invalid_value);
    CHECK(with([](auto& n, auto&) { n[2].x_m = 100; n[2].y_m = 0; }) == K::invalid_value);

    CHECK(kind_of([] { load_scenario("{not json"); }) == K::parse);
    CHECK(kind_of([] { load_scenario_file("/nonexistent/nowhere.json"); }) == K::parse);
    CHECK(kind_of([] { load_scenario(R"({"channel":{"alpha":4},"nodes":[],"flows":[],"extra":1})"); }) == K::schema);
    CHECK(kind_of([] { load_scenario(R"({"channel":{"alpha":4},"nodes":[{"id":0}],"flows":[]})"); }) == K::schema);
}

TEST_CASE("interferer sets exclude the link ends and the destination") {
    const Scenario toy = oracle::load("toy");
    CHECK(toy.interferer_set({2, 0}) == std::vector<NodeId>{1, 3});
    CHECK(toy.interferer_set({1, 2}) == std::vector<NodeId>{3});
    CHECK(toy.interferer_set({3, 0}) == std::vector<NodeId>{1, 2});

    const Scenario grid = oracle::load("grid_two_flows");
    CHECK(grid.interferer_set({3, 7}) == std::vector<NodeId>{0, 5, 10, 11});
    CHECK(grid.with_policy(InterferencePolicy::all_nodes).interferer_set({3, 7}).size() == 13);
    CHECK_THROWS_AS(grid.interferer_set({1, 2}), ContractViolation);

    const Scenario single = oracle::load("single_link");
    CHECK(single.interferer_set({1, 0}).empty());

    for (const char* name : {"grid_two_flows", "grid_three_flows", "toy"}) {
        const Scenario s = oracle::load(name);
        for (auto policy : {InterferencePolicy::all_nodes, InterferencePolicy::path_nodes}) {
            const Scenario p = s.with_policy(policy);
            for (const Flow& f : p.flows()) {
                for (const Link& l : f.links()) {
                    const auto set = p.interferer_set(l);
                    CHECK(std::is_sorted(set.begin(), set.end()));
                    CHECK(std::find(set.begin(), set.end(), l.tx) == set.end());
                    CHECK(std::find(set.begin(), set.end(), l.rx) == set.end());
                    CHECK(std::find(set.begin(), set.end(), p.destination()) == set.end());
                }
            }
        }
    }
}

TEST_CASE("end-to-end success of interference-free paths") {
    const Scenario single = oracle::load("single_link");
    const double g = single.power_factor(1, 0);
    const auto& rx = single.node(0).radio;
    CHECK(single.end_to_end_success(single.flows()[0]) ==
          doctest::Approx(std::exp(-rx.sinr_threshold * rx.noise / g)).epsilon(1e-14));

    const Scenario noiseless = load_scenario(R"({"channel":{"alpha":4},"nodes":[
        {"id":0,"x_m":0,"y_m":0,"tx_power_w":0.1,"noise_w":0,"sinr_threshold":1,"role":"destination","q":0},
        {"id":1,"x_m":10,"y_m":0,"tx_power_w":0.1,"noise_w":0,"sinr_threshold":1,"role":"source","q":0}],
        "flows":[{"id":1,"source":1,"path":[1,0]}]})");
    CHECK(noiseless.end_to_end_success(noiseless.flows()[0]) == 1.0);

    const Scenario toy = oracle::load("toy");
    double previous_r1 = 2.0;
    for (double gamma = 0.25; gamma <= 2.0 + 1e-9; gamma += 0.25) {
        const Scenario s = toy.with_sinr_threshold(gamma);
        const double r1 = s.end_to_end_success(s.flow(1));
        const double r2 = s.end_to_end_success(s.flow(2));
        CHECK(r1 > r2);
        CHECK(r1 <= previous_r1);
        previous_r1 = r1;
    }
}

TEST_CASE("best path picks the most reliable flow, lowest id on ties") {
    CHECK(oracle::load("grid_two_flows").best_path().id == 1);
    CHECK(oracle::load("grid_three_flows").best_path().id == 1);
    CHECK(oracle::load("toy").best_path().id == 1);

    std::vector<NodeSpec> nodes{node(0, 0, 0, Role::destination), node(1, 100, 0, Role::source),
                                node(2, 0, 100, Role::source)};
    const Scenario mirrored(nodes, {{5, 1, {1, 0}}, {2, 2, {2, 0}}}, {});
    CHECK(mirrored.best_path().id == 2);
}

TEST_CASE("serialization round-trips") {
    for (const char* name : {"grid_two_flows", "grid_three_flows", "toy", "toy_degenerate", "single_link"}) {
        const Scenario s = oracle::load(name);
        const std::string text = serialize(s);
        CHECK(serialize(load_scenario(text)) == text);
    }

    Rng rng = make_rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<NodeSpec> nodes{node(0, 0, 0, Role::destination)};
        std::vector<Flow> flows;
        NodeId next = 1;
        const int flow_count = 1 + static_cast<int>(uniform01(rng) * 3);
        for (int f = 0; f < flow_count; ++f) {
            const int hops = 1 + static_cast<int>(uniform01(rng) * 3);
            Flow flow{f + 1, next, {}};
            for (int h = 0; h < hops; ++h) {
                const Role role = h == 0 ? Role::source : Role::relay;
                nodes.push_back({next, 1 + 999 * uniform01(rng), 1 + 999 * uniform01(rng),
                                 RadioSpec{1e-3 + uniform01(rng), 1e-12 * uniform01(rng), 0.1 + uniform01(rng)},
                                 role, uniform01(rng)});
                flow.path.push_back(next++);
            }
            flow.path.push_back(0);
            flows.push_back(flow);
        }
        const auto policy = uniform01(rng) < 0.5 ? InterferencePolicy::all_nodes : InterferencePolicy::path_nodes;
        const Scenario s(nodes, flows, {2.0 + 4.0 * uniform01(rng), 0.5 + uniform01(rng)}, policy);
        const Scenario back = load_scenario(serialize(s));
        CHECK(serialize(back) == serialize(s));
        CHECK(back.nodes().size() == s.nodes().size());
        CHECK(back.channel().alpha == s.channel().alpha);
        CHECK(back.nodes().back().x_m == s.nodes().back().x_m);
    }
}

TEST_CASE("threshold and policy variants") {
    const Scenario toy = oracle::load("toy");
    const Scenario t2 = toy.with_sinr_threshold(2.0);
    CHECK(t2.uniform_sinr_threshold() == 2.0);
    CHECK(toy.uniform_sinr_threshold() == 0.5);
    CHECK(toy.with_policy(InterferencePolicy::path_nodes).policy() == InterferencePolicy::path_nodes);
    const Scenario only = toy.restricted_to(2);
    CHECK(only.flows().size() == 1);
    CHECK(only.nodes().size() == toy.nodes().size());
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("abc") != content_hash("abd"));
    CHECK(content_hash("").size() == 16);
}
