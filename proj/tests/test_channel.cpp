#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "joulebits/channel.hpp"
#include "joulebits/rng.hpp"
#include "oracles.hpp"

using namespace joulebits;

namespace {

DiscreteChannel make_channel(std::vector<std::vector<double>> matrix) {
    DiscreteChannel ch;
    for (std::size_t a = 0; a < matrix.size(); ++a)
        ch.inputs.push_back("a" + std::to_string(a));
    for (std::size_t o = 0; o < matrix[0].size(); ++o)
        ch.outputs.push_back("o" + std::to_string(o));
    ch.matrix = std::move(matrix);
    return ch;
}

// rows strictly inside the simplex so every KL stays finite
std::vector<double> soft_row(SplitRng& rng, std::size_t n, double mix) {
    auto row = rng.simplex(n);
    for (auto& p : row) p = (1.0 - mix) * p + mix / static_cast<double>(n);
    return row;
}

}  // namespace

TEST_CASE("channel validation") {
    auto ch = make_channel({{0.5, 0.5}, {1.0, 0.0}});
    ch.validate();
    ch.matrix[0][0] = 0.6;
    CHECK_THROWS_AS(ch.validate(), validation_error);
    ch.matrix[0][0] = -0.5;
    CHECK_THROWS_AS(ch.validate(), validation_error);
}

TEST_CASE("blahut-arimoto closed forms") {
    auto identity4 = make_channel({{1, 0, 0, 0},
                                   {0, 1, 0, 0},
                                   {0, 0, 1, 0},
                                   {0, 0, 0, 1}});
    auto r4 = ba_capacity(identity4, 1e-10);
    CHECK(r4.capacity_bits == Catch::Approx(2.0).margin(1e-9));
    CHECK(r4.upper_bound_bits >= r4.capacity_bits);

    auto bsc = make_channel({{0.9, 0.1}, {0.1, 0.9}});
    // 1 - H(0.1)
    CHECK(ba_capacity(bsc, 1e-12).capacity_bits ==
          Catch::Approx(0.5310044064107188).margin(1e-9));

    DiscreteChannel erasure;
    erasure.inputs = {"0", "1"};
    erasure.outputs = {"0", "e", "1"};
    erasure.matrix = {{0.75, 0.25, 0.0}, {0.0, 0.25, 0.75}};
    CHECK(ba_capacity(erasure, 1e-12).capacity_bits ==
          Catch::Approx(0.75).margin(1e-9));
}

TEST_CASE("useless channel has exactly zero capacity") {
    auto ch = make_channel({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
    auto r = ba_capacity(ch);
    CHECK(r.capacity_bits == 0.0);
    CHECK(r.iterations == 0);
}

TEST_CASE("blahut-arimoto matches simplex grid search") {
    SplitRng rng(21, 0);
    for (int rep = 0; rep < 8; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        DiscreteChannel ch = make_channel(
            {soft_row(sub, 3, 0.3), soft_row(sub, 3, 0.3), soft_row(sub, 3, 0.3)});
        double ba = ba_capacity(ch, 1e-10).capacity_bits;
        double grid = oracle::grid_capacity_3(ch.matrix, 0.01);
        CHECK(ba == Catch::Approx(grid).margin(1e-3));
        CHECK(ba >= grid - 1e-9);  // grid search is a lower bound
    }
}

TEST_CASE("effective costs apply the convention") {
    CostedChannel cch;
    cch.channel = make_channel({{1, 0}, {0, 1}, {0.5, 0.5}});
    cch.cost_J = {2.0, 3.0, 1.0};
    cch.baseline_energy_J = 10.0;
    cch.null_input = "a2";

    auto total = effective_costs(cch, CostConvention::total);
    CHECK(total == std::vector<double>{12.0, 13.0, 11.0});

    auto inc = effective_costs(cch, CostConvention::incremental);
    CHECK(inc == std::vector<double>{1.0, 2.0, 0.0});

    cch.null_input.reset();
    CHECK_THROWS_AS(effective_costs(cch, CostConvention::incremental),
                    configuration_error);

    cch.null_input = "a1";  // not the cheapest input
    CHECK_THROWS_AS(effective_costs(cch, CostConvention::incremental),
                    validation_error);
}

TEST_CASE("cost constrained capacity endpoints") {
    CostedChannel cch;
    cch.channel = make_channel({{1, 0}, {0, 1}});
    cch.cost_J = {0.0, 1.0};
    cch.convention = CostConvention::total;

    // large budget: unconstrained, lambda 0
    auto slack = cost_constrained_capacity(cch, 10.0);
    CHECK(slack.capacity_bits == Catch::Approx(1.0).margin(1e-9));
    CHECK(slack.lambda_bits_per_J == 0.0);

    // budget 0: only the free input is usable, its subchannel carries nothing
    auto pinched = cost_constrained_capacity(cch, 0.0);
    CHECK(pinched.capacity_bits == Catch::Approx(0.0).margin(1e-12));
    CHECK(pinched.expected_cost_J == Catch::Approx(0.0).margin(1e-12));
    CHECK(pinched.lambda_bits_per_J > 0.0);  // secant slope toward capacity

    // interior budget: spend exactly the budget
    auto mid = cost_constrained_capacity(cch, 0.25);
    CHECK(mid.expected_cost_J == Catch::Approx(0.25).margin(1e-8));
    CHECK(mid.capacity_bits > 0.0);
    CHECK(mid.capacity_bits < 1.0);

    CHECK_THROWS_AS(cost_constrained_capacity(cch, -0.5), infeasibility_error);
}

TEST_CASE("binary symmetric capacity-cost curve against direct search") {
    // 2-input channel: capacity at expected cost b is achieved by p1 = b, so
    // C(b) = I((1-b, b)) by concavity and symmetry in this construction.
    CostedChannel cch;
    cch.channel = make_channel({{1, 0}, {0, 1}});
    cch.cost_J = {0.0, 1.0};
    cch.convention = CostConvention::total;
    for (double budget : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        auto r = cost_constrained_capacity(cch, budget, 1e-10);
        double direct = oracle::channel_mi(cch.channel.matrix,
                                           {1.0 - budget, budget});
        CHECK(r.capacity_bits == Catch::Approx(direct).margin(1e-7));
    }
}

TEST_CASE("empowerment curve shape") {
    SplitRng rng(33, 0);
    auto sub = rng.split(0);
    CostedChannel cch;
    cch.channel = make_channel({soft_row(sub, 4, 0.2), soft_row(sub, 4, 0.2),
                                soft_row(sub, 4, 0.2), soft_row(sub, 4, 0.2)});
    cch.cost_J = {0.0, 0.7, 1.3, 2.1};
    cch.convention = CostConvention::total;
    auto curve =
        empowerment_curve(cch, {0.1, 0.3, 0.6, 1.0, 1.5, 2.1}, 1e-10);
    REQUIRE(curve.points.size() == 6);
    CHECK(curve.nondecreasing(1e-9));
    CHECK(curve.concavity_violation() <= 1e-6);

    CHECK_THROWS_AS(empowerment_curve(cch, {}), validation_error);
    CHECK_THROWS_AS(empowerment_curve(cch, {0.5, 0.5}), validation_error);
}

TEST_CASE("curve helpers flag violations") {
    EmpowermentCurve c;
    c.points = {{0.0, 0.0, 0.0, {}}, {1.0, 0.8, 0.0, {}}, {2.0, 0.3, 0.0, {}}};
    CHECK_FALSE(c.nondecreasing(1e-6));
    EmpowermentCurve convex;
    convex.points = {{0.0, 0.0, 0.0, {}}, {1.0, 0.1, 0.0, {}},
                     {2.0, 1.0, 0.0, {}}};
    CHECK(convex.concavity_violation() == Catch::Approx(0.4).margin(1e-12));
}

TEST_CASE("capacity per unit cost matches the relative entropy formula") {
    SplitRng rng(55, 0);
    for (int rep = 0; rep < 5; ++rep) {
        auto sub = rng.split(static_cast<std::uint64_t>(rep));
        CostedChannel cch;
        cch.channel =
            make_channel({soft_row(sub, 3, 0.5), soft_row(sub, 3, 0.5),
                          soft_row(sub, 3, 0.5), soft_row(sub, 3, 0.5)});
        cch.cost_J = {0.0, sub.uniform(0.5, 2.0), sub.uniform(0.5, 2.0),
                      sub.uniform(0.5, 2.0)};
        cch.null_input = "a0";
        cch.convention = CostConvention::incremental;

        auto r = capacity_per_unit_cost(cch, CostConvention::incremental, 1e-10);
        REQUIRE_FALSE(r.unbounded);
        double ref =
            oracle::best_kl_per_cost(cch.channel.matrix, cch.cost_J, 0);
        CHECK(r.bits_per_joule == Catch::Approx(ref).margin(1e-4));
        REQUIRE(r.relative_entropy_bits_per_joule.has_value());
        CHECK(*r.relative_entropy_bits_per_joule ==
              Catch::Approx(ref).margin(1e-12));
    }
}

TEST_CASE("capacity per unit cost degeneracies") {
    CostedChannel cch;
    cch.channel = make_channel({{1, 0}, {0, 1}});
    cch.cost_J = {0.0, 0.0};
    cch.convention = CostConvention::total;
    CHECK_THROWS_AS(capacity_per_unit_cost(cch, CostConvention::total),
                    degeneracy_error);

    // deterministic distinguishability from a free null: unbounded
    cch.cost_J = {0.0, 1.0};
    cch.null_input = "a0";
    auto r = capacity_per_unit_cost(cch, CostConvention::total);
    CHECK(r.unbounded);
    CHECK_FALSE(r.warnings.empty());

    // two distinct free inputs: control for free
    CostedChannel free2;
    free2.channel = make_channel({{1, 0}, {0, 1}, {0.5, 0.5}});
    free2.cost_J = {0.0, 0.0, 1.0};
    free2.convention = CostConvention::total;
    CHECK(capacity_per_unit_cost(free2, CostConvention::total).unbounded);
}

TEST_CASE("mdp unrolling matches recursive enumeration") {
    SplitRng rng(77, 0);
    MdpSpec m;
    m.states = {"s0", "s1", "s2"};
    m.actions = {"go", "stay"};
    for (std::size_t s = 0; s < 3; ++s) {
        std::vector<std::vector<double>> per_action;
        for (std::size_t a = 0; a < 2; ++a) per_action.push_back(rng.simplex(3));
        m.transition.push_back(per_action);
    }
    m.observation_map = {"lo", "hi", "hi"};  // s1 and s2 alias
    m.action_cost_J = {1.5, 0.0};
    m.initial_state = "s1";
    m.horizon = 3;
    m.baseline_energy_J = 0.25;
    m.null_action = "stay";

    for (Endpoint ep : {Endpoint::observation, Endpoint::state}) {
        CostedChannel cch = unroll_mdp(m, ep);
        REQUIRE(cch.channel.inputs.size() == 8);
        CHECK(cch.baseline_energy_J == 0.25);
        REQUIRE(cch.null_input.has_value());
        CHECK(*cch.null_input == "stay,stay,stay");

        oracle::EnumeratedMdp ref;
        oracle::enumerate_rec(m.states, m.actions, m.transition,
                              m.observation_map, m.action_cost_J,
                              {0.0, 1.0, 0.0}, "", 0.0, m.horizon,
                              ep == Endpoint::state, ref);
        REQUIRE(ref.rows.size() == 8);
        for (std::size_t i = 0; i < cch.channel.inputs.size(); ++i) {
            const auto& label = cch.channel.inputs[i];
            REQUIRE(ref.rows.count(label) == 1);
            const auto& [dist, cost] = ref.rows.at(label);
            CHECK(cch.cost_J[i] == Catch::Approx(cost).margin(1e-12));
            double checked = 0.0;
            for (std::size_t o = 0; o < cch.channel.outputs.size(); ++o) {
                double want = 0.0;
                auto it = dist.find(cch.channel.outputs[o]);
                if (it != dist.end()) want = it->second;
                CHECK(cch.channel.matrix[i][o] ==
                      Catch::Approx(want).margin(1e-12));
                checked += cch.channel.matrix[i][o];
            }
            CHECK(checked == Catch::Approx(1.0).margin(1e-12));
        }
    }

    // observation endpoint merges the s1/s2 alias into one column
    CHECK(unroll_mdp(m, Endpoint::observation).channel.outputs.size() == 2);
    CHECK(unroll_mdp(m, Endpoint::state).channel.outputs.size() == 3);
}

TEST_CASE("mdp unrolling guards") {
    MdpSpec m;
    m.states = {"s0"};
    m.actions = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    m.transition = {std::vector<std::vector<double>>(10, {1.0})};
    m.observation_map = {"o"};
    m.action_cost_J.assign(10, 0.0);
    m.initial_state = "s0";
    m.horizon = 9;  // 10^9 sequences
    CHECK_THROWS_AS(unroll_mdp(m), capacity_error);

    m.horizon = 0;
    CHECK_THROWS_AS(unroll_mdp(m), validation_error);
    m.horizon = 1;
    m.null_action = "zz";
    CHECK_THROWS_AS(unroll_mdp(m), validation_error);
}
