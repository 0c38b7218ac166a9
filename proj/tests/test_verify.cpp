#include "doctest.h"

#include "mprb/app/verify.hpp"

#include <sstream>

using namespace mprb;
using namespace mprb::app;

namespace {
const CriterionResult& criterion(const SuiteReport& r, int id) {
    for (const auto& c : r.criteria)
        if (c.id == id)
            return c;
    throw std::logic_error("missing criterion");
}

bool mentions_node(const CriterionResult& c) {
    return c.detail.find("node") != std::string::npos;
}
} // namespace

TEST_CASE("untampered suite passes") {
    const auto report = verify_suite(Scale::small);
    REQUIRE(report.criteria.size() == 10);
    for (int id = 1; id <= 10; ++id)
        CHECK_MESSAGE(criterion(report, id).passed, criterion(report, id).detail);
    std::ostringstream out;
    report.print(out);
    CHECK(out.str().find("criterion 10 PASS") != std::string::npos);
}

TEST_CASE("perturbed value at an interior node") {
    SuiteHooks hooks;
    hooks.solve = [](const ScenarioTree& tree, const GivenGenerators& gen) {
        auto sol = solve_given_generators(tree, gen);
        sol.Y[0] += 1e-6;
        return sol;
    };
    const auto report = verify_suite(Scale::small, hooks);
    CHECK(!report.passed());
    CHECK(!criterion(report, 1).passed);
    CHECK(mentions_node(criterion(report, 1)));
    CHECK(!criterion(report, 3).passed);
    CHECK(mentions_node(criterion(report, 3)));
    CHECK(!criterion(report, 9).passed);
    CHECK(criterion(report, 4).passed);
}

TEST_CASE("solver that ignores the barrier") {
    SuiteHooks hooks;
    hooks.solve = [](const ScenarioTree& tree, GivenGenerators gen) {
        for (NodeId id = 0; id < tree.size(); ++id)
            if (!tree.is_leaf(id))
                gen.h[id] = -1e6;
        return solve_given_generators(tree, gen);
    };
    const auto report = verify_suite(Scale::small, hooks);
    CHECK(!criterion(report, 2).passed);
    CHECK(mentions_node(criterion(report, 2)));
    CHECK(!criterion(report, 1).passed);
    CHECK(!criterion(report, 6).passed);
}

TEST_CASE("wrong Brownian coefficient") {
    SuiteHooks hooks;
    hooks.solve = [](const ScenarioTree& tree, const GivenGenerators& gen) {
        auto sol = solve_given_generators(tree, gen);
        for (auto& z : sol.Z.values())
            z *= 1.1;
        return sol;
    };
    const auto report = verify_suite(Scale::small, hooks);
    CHECK(!criterion(report, 8).passed);
    CHECK(mentions_node(criterion(report, 8)));
    CHECK(!criterion(report, 9).passed);
    CHECK(criterion(report, 1).passed);
}

TEST_CASE("tampered jump-only solver") {
    SuiteHooks hooks;
    hooks.solve_mpp = [](const ScenarioTree& tree, const GivenGenerators& gen) {
        auto sol = solve_mpp_only(tree, gen);
        for (NodeId id = 0; id < tree.size(); ++id)
            if (!tree.is_leaf(id))
                for (double& u : sol.U[id])
                    u += 1e-9;
        return sol;
    };
    const auto report = verify_suite(Scale::small, hooks);
    CHECK(!criterion(report, 10).passed);
    CHECK(mentions_node(criterion(report, 10)));
    for (int id = 1; id <= 9; ++id)
        CHECK(criterion(report, id).passed);
}
