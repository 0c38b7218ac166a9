#include "mprb/app/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mprb::app {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_kernel(Rng& rng, std::size_t m) {
    std::vector<double> phi(m);
    double sum = 0.0;
    for (double& p : phi) {
        p = uniform(rng, 0.1, 1.0);
        sum += p;
    }
    for (double& p : phi)
        p /= sum;
    // Renormalize the last entry so the weights sum to 1 within rounding.
    double head = 0.0;
    for (std::size_t e = 0; e + 1 < m; ++e)
        head += phi[e];
    phi.back() = 1.0 - head;
    return phi;
}

ScenarioTree random_tree(Rng& rng, const InstanceLimits& limits) {
    for (;;) {
        const std::size_t steps = std::uniform_int_distribution<std::size_t>(limits.min_steps, limits.max_steps)(rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, limits.max_marks)(rng);
        const bool brownian = !limits.allow_no_brownian || uniform(rng, 0.0, 1.0) < 0.7;
        const double horizon = uniform(rng, 0.5, limits.max_horizon);

        std::vector<double> breakpoints{0.0};
        std::vector<double> rates;
        std::vector<std::vector<double>> phis;
        const bool two_pieces = uniform(rng, 0.0, 1.0) < 0.4;
        if (two_pieces)
            breakpoints.push_back(uniform(rng, 0.2, 0.8) * horizon);
        // A zero-rate instance now and then exercises branch pruning.
        const bool silent = uniform(rng, 0.0, 1.0) < 0.1;
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            rates.push_back(silent ? 0.0 : uniform(rng, 0.05, limits.max_rate));
            phis.push_back(random_kernel(rng, m));
        }
        const double slope = limits.allow_count_driven && uniform(rng, 0.0, 1.0) < 0.3 ? uniform(rng, 0.0, 0.5) : 0.0;

        TreeOptions options;
        options.brownian = brownian;
        auto tree = ScenarioTree::build(TimeGrid::uniform(steps, horizon), MarkSet::numbered(m),
                                        CompensatorSpec::piecewise(breakpoints, rates, phis, slope), options);
        if (limits.max_interior == 0 || interior_count(tree) <= limits.max_interior)
            return tree;
    }
}

GivenGenerators random_data(Rng& rng, const ScenarioTree& tree) {
    GivenGenerators gen;
    const std::size_t n = tree.size();
    gen.xi = NodeProcess(n);
    gen.f = NodeProcess(n);
    gen.g = NodeProcess(n);
    gen.h = NodeProcess(n);
    const double f_scale = uniform(rng, 0.0, 1.0);
    const double g_scale = uniform(rng, 0.0, 1.0);
    for (NodeId id = 0; id < n; ++id) {
        if (tree.is_leaf(id)) {
            gen.xi[id] = uniform(rng, -1.5, 1.5);
            gen.h[id] = std::min(uniform(rng, -1.5, 1.5), gen.xi[id]);
        } else {
            gen.f[id] = f_scale * uniform(rng, -1.0, 1.0);
            gen.g[id] = g_scale * uniform(rng, -1.0, 1.0);
            gen.h[id] = uniform(rng, -1.5, 1.0);
        }
    }
    return gen;
}

} // namespace

std::size_t interior_count(const ScenarioTree& tree) {
    return tree.size() - tree.level_size(tree.depth());
}

GivenInstance random_given_instance(std::uint64_t seed, const InstanceLimits& limits) {
    Rng rng(seed);
    ScenarioTree tree = random_tree(rng, limits);
    GivenGenerators gen = random_data(rng, tree);
    return {std::move(tree), std::move(gen), seed};
}

LipschitzInstance random_lipschitz_instance(std::uint64_t seed, const InstanceLimits& limits,
                                            double max_lipschitz) {
    Rng rng(seed);
    ScenarioTree tree = random_tree(rng, limits);
    GivenGenerators data = random_data(rng, tree);

    const std::size_t m = tree.mark_count();
    const double af = uniform(rng, -max_lipschitz, max_lipschitz);
    const double bf = uniform(rng, -max_lipschitz, max_lipschitz);
    std::vector<double> c(m);
    for (double& ce : c)
        ce = uniform(rng, -1.0, 1.0);
    const double ag = uniform(rng, -max_lipschitz, max_lipschitz);
    const double bg = uniform(rng, -max_lipschitz, max_lipschitz);
    const bool clip = uniform(rng, 0.0, 1.0) < 0.3;

    GeneratorSpec spec;
    spec.xi = data.xi;
    spec.h = data.h;
    const NodeProcess f_offset = data.f;
    const NodeProcess g_offset = data.g;
    spec.f = [af, bf, c, clip, f_offset](const ScenarioTree& t, NodeId id, double y, std::span<const double> u) {
        const auto phi = t.kernel(t.node(id).level);
        double inner = 0.0;
        for (std::size_t e = 0; e < u.size(); ++e)
            inner += c[e] * phi[e] * u[e];
        const double v = af * y + bf * inner + f_offset[id];
        return clip ? std::clamp(v, -2.0, 2.0) : v;
    };
    if (tree.brownian()) {
        spec.g = [ag, bg, g_offset](const ScenarioTree&, NodeId id, double y, double z) {
            return ag * y + bg * z + g_offset[id];
        };
    }
    double cmax = 0.0;
    for (double ce : c)
        cmax = std::max(cmax, std::abs(ce));
    spec.lipschitz = {std::abs(af), std::abs(bf) * cmax, tree.brownian() ? std::abs(ag) : 0.0,
                      tree.brownian() ? std::abs(bg) : 0.0};
    spec.beta = spec.lipschitz.u * spec.lipschitz.u + 2.0 * spec.lipschitz.f + 0.5;
    spec.delta = 0.1;
    return {std::move(tree), std::move(spec), seed};
}

GivenInstance fixture_e2() {
    TreeOptions options;
    auto tree = ScenarioTree::build(TimeGrid::uniform(1, 1.0), MarkSet::numbered(1),
                                    CompensatorSpec::linear(0.0, {1.0}), options);
    GivenGenerators gen;
    const std::size_t n = tree.size();
    gen.xi = NodeProcess(n);
    gen.f = NodeProcess(n);
    gen.g = NodeProcess(n);
    gen.h = NodeProcess(n);
    for (NodeId id = 0; id < n; ++id) {
        if (tree.is_leaf(id)) {
            gen.xi[id] = tree.node(id).w;
            gen.h[id] = -1.0;
        } else {
            gen.h[id] = 0.5;
        }
    }
    return {std::move(tree), std::move(gen), 0};
}

GivenInstance fixture_e3(bool brownian) {
    TreeOptions options;
    options.brownian = brownian;
    auto tree = ScenarioTree::build(TimeGrid::uniform(1, 1.0), MarkSet::numbered(1),
                                    CompensatorSpec::linear(std::numbers::ln2, {1.0}), options);
    GivenGenerators gen;
    const std::size_t n = tree.size();
    gen.xi = NodeProcess(n);
    gen.f = NodeProcess(n);
    gen.g = NodeProcess(n);
    gen.h = NodeProcess(n, -10.0);
    for (NodeId id = 0; id < n; ++id)
        if (tree.is_leaf(id))
            gen.xi[id] = tree.node(id).jumps;
    return {std::move(tree), std::move(gen), 0};
}

} // namespace mprb::app
