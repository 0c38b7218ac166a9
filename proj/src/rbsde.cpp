#include "mprb/rbsde.hpp"

#include "mprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mprb {

void GivenGenerators::validate(const ScenarioTree& tree) const {
    const std::size_t n = tree.size();
    if (xi.size() != n || f.size() != n || g.size() != n || h.size() != n)
        throw std::invalid_argument("generator processes must be defined on every node");
    for (NodeId id = 0; id < n; ++id) {
        if (!std::isfinite(f[id]) || !std::isfinite(g[id]) || !std::isfinite(h[id]) ||
            (tree.is_leaf(id) && !std::isfinite(xi[id])))
            throw std::invalid_argument("generator data must be finite");
        if (tree.is_leaf(id) && h[id] > xi[id])
            throw std::invalid_argument("barrier exceeds the terminal value at leaf " + std::to_string(id));
    }
}

GivenGenerators freeze(const ScenarioTree& tree, const GeneratorSpec& spec, const NodeProcess& P,
                       const MarkProcess& Q, const NodeProcess& R) {
    GivenGenerators gen;
    gen.xi = spec.xi;
    gen.h = spec.h;
    gen.left_usce_surrogate = spec.left_usce_surrogate;
    gen.f = NodeProcess(tree.size());
    gen.g = NodeProcess(tree.size());
    const std::vector<double> zeros(tree.mark_count(), 0.0);
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (tree.is_leaf(id))
            continue;
        const std::span<const double> u = Q.empty() ? std::span<const double>(zeros) : Q[id];
        gen.f[id] = spec.f ? spec.f(tree, id, P[id], u) : 0.0;
        gen.g[id] = spec.g ? spec.g(tree, id, P[id], R.empty() ? 0.0 : R[id]) : 0.0;
    }
    return gen;
}

namespace {

RbsdeSolution reflected_recursion(const ScenarioTree& tree, const GivenGenerators& gen, bool with_z) {
    gen.validate(tree);
    const std::size_t n = tree.size();
    const std::size_t m = tree.mark_count();
    RbsdeSolution sol;
    sol.Y = NodeProcess(n);
    sol.U = MarkProcess(n, m);
    if (with_z)
        sol.Z = NodeProcess(n);
    sol.K = NodeProcess(n);
    sol.dK = NodeProcess(n);
    sol.residual = NodeProcess(n);
    sol.degenerate_marks.assign(n * m, false);

    for (NodeId id = n; id-- > 0;) {
        if (tree.is_leaf(id)) {
            sol.Y[id] = gen.xi[id];
            continue;
        }
        const TreeNode& node = tree.node(id);
        const Representation rep = extract_representation(tree, sol.Y, id);
        const double unreflected = rep.mean + gen.f[id] * node.step_da + gen.g[id] * node.step_dt;
        sol.Y[id] = std::max(unreflected, gen.h[id]);
        sol.dK[id] = std::max(gen.h[id] - unreflected, 0.0);
        if (with_z)
            sol.Z[id] = rep.z;
        auto u = sol.U[id];
        std::copy(rep.u.begin(), rep.u.end(), u.begin());
        for (std::size_t e = 0; e < m; ++e)
            sol.degenerate_marks[id * m + e] = rep.degenerate[e];
        sol.residual[id] = rep.residual;
    }
    for (NodeId id = 1; id < n; ++id) {
        const NodeId p = tree.node(id).parent;
        sol.K[id] = sol.K[p] + sol.dK[p];
    }
    return sol;
}

} // namespace

RbsdeSolution solve_given_generators(const ScenarioTree& tree, const GivenGenerators& gen) {
    return reflected_recursion(tree, gen, true);
}

RbsdeSolution solve_mpp_only(const ScenarioTree& tree, const GivenGenerators& gen) {
    if (tree.brownian())
        throw BrownianBranchesPresent();
    for (NodeId id = 0; id < tree.size(); ++id)
        if (!tree.is_leaf(id) && gen.g[id] != 0.0)
            throw std::invalid_argument("jump-only mode requires g = 0");
    return reflected_recursion(tree, gen, false);
}

NodeProcess running_integrals(const ScenarioTree& tree, const GivenGenerators& gen) {
    NodeProcess I(tree.size());
    for (NodeId id = 1; id < tree.size(); ++id) {
        const NodeId p = tree.node(id).parent;
        const TreeNode& parent = tree.node(p);
        I[id] = I[p] + gen.f[p] * parent.step_da + gen.g[p] * parent.step_dt;
    }
    return I;
}

NodeProcess reward_process(const ScenarioTree& tree, const GivenGenerators& gen) {
    NodeProcess eta = running_integrals(tree, gen);
    for (NodeId id = 0; id < tree.size(); ++id)
        eta[id] += tree.is_leaf(id) ? gen.xi[id] : gen.h[id];
    return eta;
}

RbsdeSolution solve_via_snell(const ScenarioTree& tree, const GivenGenerators& gen) {
    gen.validate(tree);
    const NodeProcess I = running_integrals(tree, gen);
    const NodeProcess eta = reward_process(tree, gen);
    const SnellDecomposition dec = doob_meyer(tree, snell_envelope(tree, eta));

    const std::size_t n = tree.size();
    const std::size_t m = tree.mark_count();
    RbsdeSolution sol;
    sol.Y = NodeProcess(n);
    for (NodeId id = 0; id < n; ++id)
        sol.Y[id] = dec.R[id] - I[id];
    sol.K = dec.K;
    sol.dK = dec.dK;
    sol.U = MarkProcess(n, m);
    sol.Z = NodeProcess(n);
    sol.residual = NodeProcess(n);
    sol.degenerate_marks.assign(n * m, false);
    // The martingale part carries the same (Z, U) as Y: M_{k+1} - E[M_{k+1}] = Y_{k+1} - E[Y_{k+1}].
    for (NodeId id = 0; id < n; ++id) {
        if (tree.is_leaf(id))
            continue;
        const Representation rep = extract_representation(tree, dec.M, id);
        sol.Z[id] = rep.z;
        auto u = sol.U[id];
        std::copy(rep.u.begin(), rep.u.end(), u.begin());
        for (std::size_t e = 0; e < m; ++e)
            sol.degenerate_marks[id * m + e] = rep.degenerate[e];
        sol.residual[id] = rep.residual;
    }
    return sol;
}

SkorohodReport check_skorohod(const ScenarioTree& tree, const RbsdeSolution& sol, const NodeProcess& h) {
    SkorohodReport report;
    for (NodeId id = 0; id < tree.size(); ++id) {
        const double gap = sol.Y[id] - h[id];
        if (-gap > report.max_barrier_violation) {
            report.max_barrier_violation = -gap;
            report.worst_barrier_node = id;
        }
        if (tree.is_leaf(id))
            continue;
        const double product = gap * sol.dK[id];
        if (product > report.max_product) {
            report.max_product = product;
            report.worst_product_node = id;
        }
        report.max_negative_increment = std::max(report.max_negative_increment, -sol.dK[id]);
    }
    return report;
}

SkorohodReport check_skorohod(const ScenarioTree& tree, const RbsdeSolution& sol, const GivenGenerators& gen) {
    SkorohodReport report = check_skorohod(tree, sol, gen.h);
    for (NodeId id = tree.level_begin(tree.depth()); id < tree.level_end(tree.depth()); ++id)
        report.max_terminal_mismatch = std::max(report.max_terminal_mismatch, std::abs(sol.Y[id] - gen.xi[id]));
    return report;
}

EquationResidual check_equation_residual(const ScenarioTree& tree, const RbsdeSolution& sol,
                                         const GivenGenerators& gen) {
    const std::size_t n = tree.size();
    const std::size_t m = tree.mark_count();
    EquationResidual res;
    res.branch = NodeProcess(n);
    res.conditional_mean = NodeProcess(n);
    res.magnitude = NodeProcess(n);
    for (NodeId id = 0; id < n; ++id) {
        if (tree.is_leaf(id))
            continue;
        const TreeNode& node = tree.node(id);
        const auto u = sol.U[id];
        const double z = sol.Z.empty() ? 0.0 : sol.Z[id];
        double mean = 0.0, sq = 0.0;
        for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c) {
            double jump_part = 0.0;
            for (std::size_t e = 0; e < m; ++e)
                jump_part += u[e] * tree.compensated_indicator(c, e);
            const double r = sol.Y[id] - (sol.Y[c] + gen.f[id] * node.step_da + gen.g[id] * node.step_dt -
                                          jump_part - z * tree.node(c).dw + sol.dK[id]);
            res.branch[c] = r;
            const double p = tree.node(c).branch_prob;
            mean += p * r;
            sq += p * r * r;
            res.max_abs_branch = std::max(res.max_abs_branch, std::abs(r));
        }
        res.conditional_mean[id] = mean;
        res.magnitude[id] = std::sqrt(sq);
        res.max_abs_mean = std::max(res.max_abs_mean, std::abs(mean));
        res.max_magnitude = std::max(res.max_magnitude, res.magnitude[id]);
    }
    return res;
}

MajorantReport a_priori_majorant(const ScenarioTree& tree, const GivenGenerators& gen,
                                 const RbsdeSolution& sol, double beta) {
    const std::size_t n = tree.size();
    // Path accumulators carried forward from the root.
    NodeProcess f_sq(n), g_abs(n), h_max(n, 0.0);
    for (NodeId id = 0; id < n; ++id) {
        const TreeNode& node = tree.node(id);
        if (node.parent != no_node) {
            const NodeId p = node.parent;
            const TreeNode& parent = tree.node(p);
            f_sq[id] = f_sq[p] + std::exp(beta * node.a) * gen.f[p] * gen.f[p] * parent.step_da;
            g_abs[id] = g_abs[p] + std::exp(beta * parent.a / 2) * std::abs(gen.g[p]) * parent.step_dt;
            h_max[id] = h_max[p];
        }
        if (!tree.is_leaf(id)) {
            const double weighted_h = std::exp(beta * node.a / 2) * std::abs(gen.h[id]);
            h_max[id] = node.parent == no_node ? weighted_h : std::max(h_max[id], weighted_h);
        }
    }
    MajorantReport report;
    report.S = NodeProcess(n);
    report.weighted_abs_y = NodeProcess(n);
    for (NodeId id = n; id-- > 0;) {
        const TreeNode& node = tree.node(id);
        if (tree.is_leaf(id)) {
            double f_term = 0.0;
            if (f_sq[id] > 0.0)
                f_term = beta > 0.0 ? std::sqrt(f_sq[id] / beta) : std::numeric_limits<double>::infinity();
            report.S[id] = std::exp(beta * node.a / 2) * std::abs(gen.xi[id]) + f_term + g_abs[id] + h_max[id];
        } else {
            report.S[id] = conditional_expectation(tree, report.S, id);
        }
        report.weighted_abs_y[id] = std::exp(beta * node.a / 2) * std::abs(sol.Y[id]);
    }
    for (NodeId id = 0; id < n; ++id)
        if (report.weighted_abs_y[id] > report.S[id] + 1e-10)
            report.violations.push_back(id);
    return report;
}

} // namespace mprb
