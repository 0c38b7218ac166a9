#include "doctest.h"

#include "mprb/app/instances.hpp"
#include "mprb/errors.hpp"
#include "mprb/rbsde.hpp"
#include "mprb/snell.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace mprb;

namespace {
app::InstanceLimits small_trees() {
    app::InstanceLimits limits;
    limits.max_steps = 3;
    limits.max_marks = 2;
    return limits;
}

/// Random process with zero conditional increments, started at `start`.
NodeProcess random_martingale(const ScenarioTree& tree, std::uint64_t seed, double start = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    NodeProcess m(tree.size());
    m[0] = start;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (tree.is_leaf(id))
            continue;
        double mean = 0.0;
        for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c) {
            m[c] = normal(rng);
            mean += tree.node(c).branch_prob * m[c];
        }
        for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c)
            m[c] += m[id] - mean;
    }
    return m;
}
} // namespace

TEST_CASE("constant reward is its own envelope") {
    const auto inst = app::random_given_instance(1, small_trees());
    const NodeProcess eta(inst.tree.size(), 1.75);
    CHECK(snell_envelope(inst.tree, eta) == eta);
}

TEST_CASE("E2 envelope and decomposition") {
    const auto e2 = app::fixture_e2();
    const NodeProcess eta = reward_process(e2.tree, e2.gen);
    const NodeProcess R = snell_envelope(e2.tree, eta);
    CHECK(R[0] == 0.5);
    const auto dec = doob_meyer(e2.tree, R);
    CHECK(dec.dK[0] == 0.5);
    for (NodeId c = e2.tree.child_begin(0); c < e2.tree.child_end(0); ++c)
        CHECK(dec.M[c] - dec.M[0] == doctest::Approx(e2.tree.node(c).w).epsilon(1e-15));
    CHECK(envelope_jump_support(e2.tree, dec, eta).empty());
}

TEST_CASE("martingale input has no push") {
    const auto inst = app::random_given_instance(2, small_trees());
    const NodeProcess m = random_martingale(inst.tree, 5, 0.3);
    const auto dec = doob_meyer(inst.tree, m);
    for (NodeId id = 0; id < inst.tree.size(); ++id) {
        CHECK(std::abs(dec.K[id]) <= 1e-12);
        CHECK(std::abs(dec.M[id] - m[id]) <= 1e-12);
    }
}

TEST_CASE("non-supermartingale input is rejected") {
    const auto e2 = app::fixture_e2();
    NodeProcess r(e2.tree.size());
    for (NodeId id = 1; id < e2.tree.size(); ++id)
        r[id] = 1.0;
    CHECK_THROWS_AS(doob_meyer(e2.tree, r), NotSupermartingale);
}

TEST_CASE("envelope properties on random rewards") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = app::random_given_instance(seed, small_trees());
        const auto& tree = inst.tree;
        const NodeProcess eta = reward_process(tree, inst.gen);
        const NodeProcess R = snell_envelope(tree, eta);
        const auto dec = doob_meyer(tree, R);

        for (NodeId id = 0; id < tree.size(); ++id) {
            CHECK(R[id] >= eta[id]);
            CHECK(std::abs(dec.M[id] - dec.K[id] - R[id]) <= 1e-12);
            if (!tree.is_leaf(id)) {
                CHECK(conditional_expectation(tree, R, id) <= R[id] + 1e-12);
                CHECK(std::abs(conditional_expectation(tree, dec.M, id) - dec.M[id]) <= 1e-12);
                for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c)
                    CHECK(dec.K[c] >= dec.K[id]);
            }
        }
        CHECK(dec.K[0] == 0.0);
        CHECK(envelope_jump_support(tree, dec, eta).empty());

        // Minimality against randomized dominating supermartingales.
        std::mt19937_64 rng(seed + 1000);
        std::uniform_real_distribution<double> slack(0.0, 0.3);
        NodeProcess Q(tree.size());
        for (NodeId id = tree.size(); id-- > 0;)
            Q[id] = (tree.is_leaf(id) ? eta[id] : std::max(eta[id], conditional_expectation(tree, Q, id))) + slack(rng);
        for (NodeId id = 0; id < tree.size(); ++id)
            CHECK(Q[id] >= R[id]);

        // Monotone in η.
        NodeProcess bigger = eta;
        for (auto& x : bigger.values())
            x += slack(rng);
        const NodeProcess R2 = snell_envelope(tree, bigger);
        for (NodeId id = 0; id < tree.size(); ++id)
            CHECK(R2[id] >= R[id]);

        // Shift by a martingale.
        const NodeProcess m = random_martingale(tree, seed + 2000);
        NodeProcess shifted = eta;
        for (NodeId id = 0; id < tree.size(); ++id)
            shifted[id] += m[id];
        const NodeProcess R3 = snell_envelope(tree, shifted);
        for (NodeId id = 0; id < tree.size(); ++id)
            CHECK(std::abs(R3[id] - R[id] - m[id]) <= 1e-10);
    }
}

TEST_CASE("any other predictable increment leaves drift in the martingale part") {
    const auto inst = app::random_given_instance(7, small_trees());
    const auto& tree = inst.tree;
    const NodeProcess R = snell_envelope(tree, reward_process(tree, inst.gen));
    const auto dec = doob_meyer(tree, R);
    // With R fixed, E[ΔM'|node] = 0 forces dK' = R - E[R_{k+1}|node] = dK.
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (tree.is_leaf(id))
            continue;
        const double forced = R[id] - conditional_expectation(tree, R, id);
        CHECK(std::abs(forced - dec.dK[id]) <= 1e-12);
        const double perturbed = dec.dK[id] + 0.01;
        double drift = 0.0;
        for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c)
            drift += tree.node(c).branch_prob * ((R[c] + dec.K[id] + perturbed) - (R[id] + dec.K[id]));
        CHECK(std::abs(drift) > 1e-3);
    }
}

TEST_CASE("slack supermartingale violates the jump support condition") {
    const auto e2 = app::fixture_e2();
    const NodeProcess eta = reward_process(e2.tree, e2.gen);
    NodeProcess R = snell_envelope(e2.tree, eta);
    R[0] += 1.0;
    const auto dec = doob_meyer(e2.tree, R);
    const auto violations = envelope_jump_support(e2.tree, dec, eta);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == 0);
}
