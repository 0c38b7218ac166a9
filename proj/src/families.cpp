#include "mprb/families.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mprb {

double AffineGenerator::offset(const ScenarioTree& tree, NodeId id) const {
    const TreeNode& node = tree.node(id);
    return d0 + d1 * tree.grid().time(node.level) + dw * node.w + dn * node.jumps;
}

double AffineGenerator::clip(double v) const {
    return clipped ? std::clamp(v, clip_lo, clip_hi) : v;
}

Lipschitz certify_lipschitz(const AffineGenerator& f, const AffineGenerator& g) {
    double cmax = 0.0;
    for (double ce : f.c)
        cmax = std::max(cmax, std::abs(ce));
    return {std::abs(f.a), std::abs(f.b) * cmax, std::abs(g.a), std::abs(g.b)};
}

FGenerator make_f(AffineGenerator f) {
    return [f = std::move(f)](const ScenarioTree& tree, NodeId id, double y, std::span<const double> u) {
        const auto phi = tree.kernel(tree.node(id).level);
        double inner = 0.0;
        for (std::size_t e = 0; e < u.size() && e < f.c.size(); ++e)
            inner += f.c[e] * phi[e] * u[e];
        return f.clip(f.a * y + f.b * inner + f.offset(tree, id));
    };
}

GGenerator make_g(AffineGenerator g) {
    return [g = std::move(g)](const ScenarioTree& tree, NodeId id, double y, double z) {
        return g.clip(g.a * y + g.b * z + g.offset(tree, id));
    };
}

NodeProcess terminal_values(const ScenarioTree& tree, const TerminalPayoff& payoff) {
    NodeProcess xi(tree.size());
    for (NodeId id = tree.level_begin(tree.depth()); id < tree.level_end(tree.depth()); ++id) {
        const TreeNode& node = tree.node(id);
        xi[id] = payoff.c0 + payoff.w * node.w + payoff.n * node.jumps + payoff.wn * node.w * node.jumps +
                 payoff.w_pos * std::max(node.w, 0.0);
    }
    return xi;
}

NodeProcess barrier_values(const ScenarioTree& tree, const BarrierSpec& barrier, const NodeProcess& xi) {
    if (barrier.breakpoints.empty() || barrier.breakpoints.size() != barrier.values.size())
        throw std::invalid_argument("barrier needs one value per breakpoint");
    NodeProcess h(tree.size());
    for (NodeId id = 0; id < tree.size(); ++id) {
        const TreeNode& node = tree.node(id);
        const double t = tree.grid().time(node.level);
        const auto it = std::upper_bound(barrier.breakpoints.begin(), barrier.breakpoints.end(), t);
        const std::size_t piece = it == barrier.breakpoints.begin() ? 0 : static_cast<std::size_t>(it - barrier.breakpoints.begin()) - 1;
        h[id] = barrier.values[piece] + barrier.w * node.w + barrier.n * node.jumps;
        if (tree.is_leaf(id))
            h[id] = std::min(h[id], xi[id]);
    }
    return h;
}

GeneratorSpec make_generator_spec(const ScenarioTree& tree, const AffineGenerator& f, const AffineGenerator& g,
                                  const TerminalPayoff& payoff, const BarrierSpec& barrier, double beta,
                                  double delta) {
    GeneratorSpec spec;
    spec.xi = terminal_values(tree, payoff);
    spec.h = barrier_values(tree, barrier, spec.xi);
    spec.f = make_f(f);
    spec.g = make_g(g);
    spec.lipschitz = certify_lipschitz(f, g);
    spec.beta = beta;
    spec.delta = delta;
    return spec;
}

} // namespace mprb
