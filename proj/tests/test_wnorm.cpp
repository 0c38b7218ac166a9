#include "doctest.h"

#include "mprb/app/instances.hpp"
#include "mprb/errors.hpp"
#include "mprb/rbsde.hpp"
#include "mprb/wnorm.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mprb;

namespace {
NodeProcess random_process(const ScenarioTree& tree, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    NodeProcess v(tree.size());
    for (auto& x : v.values())
        x = normal(rng);
    return v;
}

MarkProcess random_marks(const ScenarioTree& tree, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    MarkProcess v(tree.size(), tree.mark_count());
    for (NodeId id = 0; id < tree.size(); ++id)
        for (double& x : v[id])
            x = normal(rng);
    return v;
}

const WeightedNorm::Kind scalar_kinds[] = {WeightedNorm::Kind::A, WeightedNorm::Kind::W,
                                           WeightedNorm::Kind::A_plus_lambda};
} // namespace

TEST_CASE("norm examples") {
    const auto tree = ScenarioTree::build(TimeGrid::uniform(3, 1.7), MarkSet::numbered(2),
                                          CompensatorSpec::linear(0.6, {0.5, 0.5}));
    CHECK(norm_sq(tree, NodeProcess(tree.size()), {WeightedNorm::Kind::A, 1.0, 0.5}) == 0.0);
    CHECK(norm_sq(tree, NodeProcess(tree.size(), 1.0), {WeightedNorm::Kind::W, 0.0, 0.0}) ==
          doctest::Approx(1.7).epsilon(1e-14));
    CHECK(norm_sq(tree, NodeProcess(tree.size(), 1.0), {WeightedNorm::Kind::A, 0.0, 0.0}) ==
          doctest::Approx(0.6 * 1.7).epsilon(1e-14));

    const auto e3 = app::fixture_e3();
    const auto sol = solve_given_generators(e3.tree, e3.gen);
    CHECK(std::abs(norm_sq(e3.tree, sol.U, {WeightedNorm::Kind::p, 0.0, 0.0}) - std::numbers::ln2) <= 1e-12);
}

TEST_CASE("norm axioms, monotonicity in beta and equivalence in gamma") {
    app::InstanceLimits limits;
    limits.max_steps = 3;
    limits.max_marks = 2;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = app::random_given_instance(seed, limits);
        const auto& tree = inst.tree;
        std::mt19937_64 rng(seed);
        const NodeProcess x = random_process(tree, rng), y = random_process(tree, rng);
        const MarkProcess ux = random_marks(tree, rng), uy = random_marks(tree, rng);
        NodeProcess sum(tree.size()), scaled(tree.size());
        MarkProcess usum(tree.size(), tree.mark_count()), uscaled(tree.size(), tree.mark_count());
        for (NodeId id = 0; id < tree.size(); ++id) {
            sum[id] = x[id] + y[id];
            scaled[id] = -2.5 * x[id];
            for (std::size_t e = 0; e < tree.mark_count(); ++e) {
                usum[id][e] = ux[id][e] + uy[id][e];
                uscaled[id][e] = -2.5 * ux[id][e];
            }
        }
        const double T = tree.grid().horizon();
        for (double beta : {0.0, 0.7, 2.0}) {
            for (double gamma : {0.0, 1.3}) {
                for (auto kind : scalar_kinds) {
                    const WeightedNorm w{kind, beta, gamma};
                    const double nx = std::sqrt(norm_sq(tree, x, w));
                    CHECK(std::sqrt(norm_sq(tree, sum, w)) <= nx + std::sqrt(norm_sq(tree, y, w)) + 1e-12);
                    CHECK(std::abs(std::sqrt(norm_sq(tree, scaled, w)) - 2.5 * nx) <= 1e-12 * (1.0 + nx));
                    CHECK(norm_sq(tree, x, {kind, beta + 0.5, gamma}) >= norm_sq(tree, x, w));
                    const double plain = norm_sq(tree, x, {kind, beta, 0.0});
                    CHECK(norm_sq(tree, x, w) >= plain * (1.0 - 1e-12));
                    CHECK(norm_sq(tree, x, w) <= plain * std::exp(gamma * T) * (1.0 + 1e-12));
                }
                const WeightedNorm wp{WeightedNorm::Kind::p, beta, gamma};
                const double nu = std::sqrt(norm_sq(tree, ux, wp));
                CHECK(std::sqrt(norm_sq(tree, usum, wp)) <= nu + std::sqrt(norm_sq(tree, uy, wp)) + 1e-12);
                CHECK(std::abs(std::sqrt(norm_sq(tree, uscaled, wp)) - 2.5 * nu) <= 1e-12 * (1.0 + nu));
                CHECK(norm_sq(tree, ux, {WeightedNorm::Kind::p, beta + 0.5, gamma}) >= norm_sq(tree, ux, wp));
            }
        }
    }
}

TEST_CASE("Cauchy-Schwarz weight bound") {
    const auto tree = ScenarioTree::build(TimeGrid::uniform(4, 1.0), MarkSet::numbered(1),
                                          CompensatorSpec::linear(1.0, {1.0}));
    const auto zero = cauchy_weight_bound(tree, NodeProcess(tree.size()), 1.0);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    const auto one = cauchy_weight_bound(tree, NodeProcess(tree.size(), 1.0), 1.0);
    CHECK(one.lhs == doctest::Approx(1.0).epsilon(1e-14));
    // Right-endpoint sum 0.25 (e^{0.25} + e^{0.5} + e^{0.75} + e^{1}).
    const double expected = 0.25 * (std::exp(0.25) + std::exp(0.5) + std::exp(0.75) + std::exp(1.0));
    CHECK(one.rhs == doctest::Approx(expected).epsilon(1e-14));
    CHECK(one.rhs >= 1.0);
    CHECK(one.holds_pathwise);

    CHECK_THROWS_AS(cauchy_weight_bound(tree, NodeProcess(tree.size()), 0.0), BetaZero);

    app::InstanceLimits limits;
    limits.max_steps = 4;
    limits.max_marks = 2;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = app::random_given_instance(seed, limits);
        std::mt19937_64 rng(seed);
        const NodeProcess f = random_process(inst.tree, rng);
        for (double beta : {0.1, 1.0, 5.0}) {
            const auto bound = cauchy_weight_bound(inst.tree, f, beta);
            CHECK(bound.holds_pathwise);
            CHECK(bound.lhs <= bound.rhs);
        }
    }
}
