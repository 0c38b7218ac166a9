#include "doctest.h"

#include "mprb/app/instances.hpp"
#include "mprb/errors.hpp"
#include "mprb/rbsde.hpp"

#include <cmath>
#include <numbers>

using namespace mprb;

namespace {
GivenGenerators constant_data(const ScenarioTree& tree, double xi, double f, double h) {
    GivenGenerators gen;
    gen.xi = NodeProcess(tree.size(), xi);
    gen.f = NodeProcess(tree.size(), f);
    gen.g = NodeProcess(tree.size(), 0.0);
    gen.h = NodeProcess(tree.size(), h);
    return gen;
}

app::InstanceLimits limits(std::size_t steps, std::size_t marks) {
    app::InstanceLimits l;
    l.max_steps = steps;
    l.max_marks = marks;
    return l;
}
} // namespace

TEST_CASE("constant terminal with an inactive barrier") {
    const auto tree = ScenarioTree::build(TimeGrid::uniform(3, 1.0), MarkSet::numbered(2),
                                          CompensatorSpec::linear(0.8, {0.5, 0.5}));
    const auto gen = constant_data(tree, 5.0, 0.0, -10.0);
    const auto sol = solve_given_generators(tree, gen);
    for (NodeId id = 0; id < tree.size(); ++id) {
        CHECK(sol.Y[id] == doctest::Approx(5.0).epsilon(1e-15));
        CHECK(std::abs(sol.Z[id]) <= 1e-15);
        CHECK(std::abs(sol.U[id][0]) <= 1e-15);
        CHECK(sol.K[id] == 0.0);
    }
    const auto res = check_equation_residual(tree, sol, gen);
    CHECK(res.max_abs_branch <= 1e-14);
}

TEST_CASE("E2: reflected at the root") {
    const auto e2 = app::fixture_e2();
    const auto sol = solve_given_generators(e2.tree, e2.gen);
    CHECK(sol.Y[0] == 0.5);
    CHECK(sol.dK[0] == 0.5);
    CHECK(sol.Z[0] == doctest::Approx(1.0).epsilon(1e-15));
    const auto rep = check_skorohod(e2.tree, sol, e2.gen);
    CHECK(rep.max_product == 0.0);
    CHECK(rep.passed());
}

TEST_CASE("E3: jump fixture") {
    const auto e3 = app::fixture_e3();
    const auto sol = solve_given_generators(e3.tree, e3.gen);
    CHECK(std::abs(sol.Y[0] - 0.5) <= 1e-12);
    CHECK(std::abs(sol.U[0][0] - 1.0) <= 1e-12);
    for (NodeId id = 0; id < e3.tree.size(); ++id)
        CHECK(sol.K[id] == 0.0);
    const auto res = check_equation_residual(e3.tree, sol, e3.gen);
    for (NodeId c = 1; c < e3.tree.size(); ++c)
        CHECK(std::abs(res.branch[c]) <= 1e-15);
}

TEST_CASE("cross-term payoff: residual has zero mean and equals the lattice residual") {
    auto e3 = app::fixture_e3();
    for (NodeId id = 0; id < e3.tree.size(); ++id)
        if (e3.tree.is_leaf(id))
            e3.gen.xi[id] = e3.tree.node(id).w * e3.tree.node(id).jumps;
    const auto sol = solve_given_generators(e3.tree, e3.gen);
    const auto res = check_equation_residual(e3.tree, sol, e3.gen);
    // Four equally likely branches with W N in {1, 0, -1, 0}: z = 1/2, u = 0,
    // residual ±1/2 on every branch.
    CHECK(sol.Z[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(sol.U[0][0]) <= 1e-14);
    CHECK(std::abs(res.conditional_mean[0]) <= 1e-12);
    for (NodeId c = 1; c < e3.tree.size(); ++c)
        CHECK(std::abs(res.branch[c]) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(res.magnitude[0] == doctest::Approx(sol.residual[0]).epsilon(1e-14));
    CHECK(sol.residual[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("corrupted push is caught by the Skorohod check") {
    auto inst = app::random_given_instance(3, limits(3, 1));
    auto sol = solve_given_generators(inst.tree, inst.gen);
    NodeId pushed = no_node, slack = no_node;
    for (NodeId id = 0; id < inst.tree.size(); ++id) {
        if (inst.tree.is_leaf(id))
            continue;
        if (sol.dK[id] > 0.0 && pushed == no_node)
            pushed = id;
        if (sol.Y[id] > inst.gen.h[id] + 1e-3 && slack == no_node)
            slack = id;
    }
    REQUIRE(pushed != no_node);
    REQUIRE(slack != no_node);
    sol.dK[slack] += sol.dK[pushed];
    sol.dK[pushed] = 0.0;
    const auto rep = check_skorohod(inst.tree, sol, inst.gen);
    CHECK_FALSE(rep.passed());
    CHECK(rep.worst_product_node == slack);
}

TEST_CASE("solver invariants and the Snell route on random instances") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = app::random_given_instance(seed, limits(4, 2));
        const auto& tree = inst.tree;
        const auto sol = solve_given_generators(tree, inst.gen);
        const auto again = solve_given_generators(tree, inst.gen);
        CHECK(sol.Y == again.Y);

        const auto sk = check_skorohod(tree, sol, inst.gen);
        CHECK(sk.passed());

        const auto res = check_equation_residual(tree, sol, inst.gen);
        CHECK(res.max_abs_mean <= 1e-10);
        for (NodeId id = 0; id < tree.size(); ++id)
            if (!tree.is_leaf(id))
                CHECK(std::abs(res.magnitude[id] - sol.residual[id]) <= 1e-10);

        const auto snell = solve_via_snell(tree, inst.gen);
        const NodeProcess I = running_integrals(tree, inst.gen);
        const NodeProcess R = snell_envelope(tree, reward_process(tree, inst.gen));
        for (NodeId id = 0; id < tree.size(); ++id) {
            CHECK(std::abs(sol.Y[id] - snell.Y[id]) <= 1e-10);
            CHECK(std::abs(sol.K[id] - snell.K[id]) <= 1e-10);
            CHECK(std::abs(sol.Y[id] + I[id] - R[id]) <= 1e-10);
            if (!tree.is_leaf(id)) {
                CHECK(std::abs(sol.Z[id] - snell.Z[id]) <= 1e-10);
                for (std::size_t e = 0; e < tree.mark_count(); ++e)
                    CHECK(std::abs(sol.U[id][e] - snell.U[id][e]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("invalid data is rejected") {
    auto e2 = app::fixture_e2();
    e2.gen.h[1] = 10.0;
    CHECK_THROWS_AS(solve_given_generators(e2.tree, e2.gen), std::invalid_argument);
}

TEST_CASE("jump-only mode") {
    SUBCASE("E3 without Brownian branching") {
        const auto e3 = app::fixture_e3(false);
        const auto sol = solve_mpp_only(e3.tree, e3.gen);
        CHECK(std::abs(sol.Y[0] - 0.5) <= 1e-12);
        CHECK(std::abs(sol.U[0][0] - 1.0) <= 1e-12);
        CHECK(sol.Z.empty());
    }
    SUBCASE("Brownian branches are refused") {
        const auto e3 = app::fixture_e3(true);
        CHECK_THROWS_AS(solve_mpp_only(e3.tree, e3.gen), BrownianBranchesPresent);
    }
    TreeOptions options;
    options.brownian = false;
    const auto tree = ScenarioTree::build(TimeGrid::uniform(3, 1.5), MarkSet::numbered(2),
                                          CompensatorSpec::piecewise({0.0, 0.7}, {0.9, 0.3}, {{0.5, 0.5}, {0.1, 0.9}}),
                                          options);
    const double A_T = tree.compensator().cumulative(1.5);
    SUBCASE("constant f integrates against A") {
        const auto sol = solve_mpp_only(tree, constant_data(tree, 0.0, 0.75, -10.0));
        CHECK(sol.Y[0] == doctest::Approx(0.75 * A_T).epsilon(1e-13));
    }
    SUBCASE("dominant barrier absorbs the drift") {
        const auto gen = constant_data(tree, 10.0, -1.0, 10.0);
        const auto sol = solve_mpp_only(tree, gen);
        for (NodeId id = 0; id < tree.size(); ++id)
            CHECK(sol.Y[id] == 10.0);
        for (NodeId id = 0; id < tree.size(); ++id)
            if (!tree.is_leaf(id))
                CHECK(sol.dK[id] == doctest::Approx(tree.node(id).step_da).epsilon(1e-14));
    }
    SUBCASE("nonzero g is refused") {
        auto gen = constant_data(tree, 0.0, 0.0, -10.0);
        gen.g[0] = 1.0;
        CHECK_THROWS_AS(solve_mpp_only(tree, gen), std::invalid_argument);
    }
}

TEST_CASE("jump-only solve matches the full solver on a degenerate Brownian branch") {
    app::InstanceLimits l = limits(4, 2);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto inst = app::random_given_instance(seed, l);
        if (inst.tree.brownian())
            continue;
        inst.gen.g = NodeProcess(inst.tree.size());
        const auto a = solve_mpp_only(inst.tree, inst.gen);
        const auto b = solve_given_generators(inst.tree, inst.gen);
        for (NodeId id = 0; id < inst.tree.size(); ++id) {
            CHECK(std::abs(a.Y[id] - b.Y[id]) <= 1e-12);
            CHECK(std::abs(a.K[id] - b.K[id]) <= 1e-12);
            CHECK(b.Z[id] == 0.0);
        }
    }
}

TEST_CASE("a priori majorant") {
    SUBCASE("constants") {
        const auto tree = ScenarioTree::build(TimeGrid::uniform(2, 1.0), MarkSet::numbered(1),
                                              CompensatorSpec::linear(0.5, {1.0}));
        const auto gen = constant_data(tree, 2.0, 0.0, -10.0);
        const auto sol = solve_given_generators(tree, gen);
        CHECK(a_priori_majorant(tree, gen, sol, 1.0).violations.empty());
    }
    SUBCASE("E2 with beta = 0") {
        const auto e2 = app::fixture_e2();
        const auto sol = solve_given_generators(e2.tree, e2.gen);
        const auto rep = a_priori_majorant(e2.tree, e2.gen, sol, 0.0);
        CHECK(rep.S[0] == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(rep.violations.empty());
    }
    SUBCASE("coarse steps with a large f stay below the majorant") {
        // One step with ΔA = 2 and β = 1: left-endpoint weights would break the bound.
        const auto tree = ScenarioTree::build(TimeGrid::uniform(1, 1.0), MarkSet::numbered(1),
                                              CompensatorSpec::linear(2.0, {1.0}));
        const auto gen = constant_data(tree, 0.0, 1.0, -0.01);
        const auto sol = solve_given_generators(tree, gen);
        CHECK(sol.Y[0] == doctest::Approx(2.0));
        CHECK(a_priori_majorant(tree, gen, sol, 1.0).violations.empty());
    }
    SUBCASE("random instances") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto inst = app::random_given_instance(seed, limits(3, 2));
            const auto sol = solve_given_generators(inst.tree, inst.gen);
            for (double beta : {0.5, 1.0, 2.0})
                CHECK(a_priori_majorant(inst.tree, inst.gen, sol, beta).violations.empty());
        }
    }
}
