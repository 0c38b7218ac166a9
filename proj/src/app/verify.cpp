#include "mprb/app/verify.hpp"

#include "mprb/app/instances.hpp"
#include "mprb/families.hpp"
#include "mprb/picard.hpp"
#include "mprb/stopping.hpp"
#include "mprb/wnorm.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace mprb::app {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string at(const ScenarioTree& tree, std::uint64_t seed, NodeId id) {
    return "seed " + std::to_string(seed) + " node " + std::to_string(id) + " (" + tree.path_label(id) + ")";
}

struct Criterion {
    CriterionResult result;
    Clock::time_point start = Clock::now();

    Criterion(int id, std::string name) { result = {id, std::move(name), true, "", 0.0}; }
    void fail(const std::string& why) {
        if (result.passed)
            result.detail = why;
        result.passed = false;
    }
    CriterionResult finish(const std::string& summary, double budget_seconds = 0.0) {
        result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (budget_seconds > 0.0 && result.seconds > budget_seconds)
            fail("runtime " + fmt(result.seconds) + " s exceeds " + fmt(budget_seconds) + " s");
        if (result.passed)
            result.detail = summary;
        return result;
    }
};

InstanceLimits oracle_limits() {
    InstanceLimits limits;
    limits.max_steps = 3;
    limits.max_marks = 1;
    limits.max_interior = enumeration_node_cap;
    return limits;
}

InstanceLimits skorohod_limits() {
    InstanceLimits limits;
    limits.max_steps = 4;
    limits.max_marks = 2;
    return limits;
}

InstanceLimits picard_limits() {
    InstanceLimits limits;
    limits.min_steps = 2;
    limits.max_steps = 3;
    limits.max_marks = 1;
    limits.max_rate = 1.0;
    limits.max_horizon = 1.0;
    return limits;
}

/// Raise h to Y at inactive interior nodes chosen at random: creates ties, keeps Y.
GivenGenerators with_ties(const ScenarioTree& tree, GivenGenerators gen, const RbsdeSolution& sol,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (NodeId id = 0; id < tree.level_begin(tree.depth()); ++id)
        if (sol.Y[id] > gen.h[id] && coin(rng))
            gen.h[id] = sol.Y[id];
    return gen;
}

CriterionResult oracle_equivalence(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(1, "oracle equivalence");
    double gap = 0.0;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_given_instance(seed, oracle_limits());
        const double y0 = hooks.solve(inst.tree, inst.gen).Y[0];
        const double oracle = brute_force_value(inst.tree, inst.gen).value;
        const double d = std::abs(y0 - oracle);
        gap = std::max(gap, d);
        if (!(d <= 1e-10))
            c.fail(at(inst.tree, seed, 0) + ": Y_0 " + std::to_string(y0) + " vs oracle " + std::to_string(oracle));
    }
    return c.finish(std::to_string(count) + " instances, max |Y_0 - oracle| " + fmt(gap),
                    10.0 * static_cast<double>(count) / 20.0);
}

CriterionResult skorohod_suite(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(2, "Skorohod conditions");
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_given_instance(1000 + seed, skorohod_limits());
        const auto sol = hooks.solve(inst.tree, inst.gen);
        const auto rep = check_skorohod(inst.tree, sol, inst.gen);
        worst = std::max({worst, rep.max_product, rep.max_negative_increment, rep.max_barrier_violation,
                          rep.max_terminal_mismatch});
        if (!rep.passed(1e-12)) {
            std::ostringstream why;
            why << "seed " << 1000 + seed << ": (Y-h)dK " << fmt(rep.max_product);
            if (rep.worst_product_node != no_node)
                why << " at " << at(inst.tree, 1000 + seed, rep.worst_product_node);
            why << ", (h-Y)+ " << fmt(rep.max_barrier_violation);
            if (rep.worst_barrier_node != no_node)
                why << " at " << at(inst.tree, 1000 + seed, rep.worst_barrier_node);
            why << ", (-dK)+ " << fmt(rep.max_negative_increment) << ", |Y_N - xi| "
                << fmt(rep.max_terminal_mismatch);
            c.fail(why.str());
        }
    }
    return c.finish(std::to_string(count) + " instances, worst violation " + fmt(worst),
                    10.0 * static_cast<double>(count) / 50.0);
}

CriterionResult route_equivalence(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(3, "recursion vs Snell route");
    double gap = 0.0;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_given_instance(1000 + seed, skorohod_limits());
        const auto direct = hooks.solve(inst.tree, inst.gen);
        const auto snell = solve_via_snell(inst.tree, inst.gen);
        for (NodeId id = 0; id < inst.tree.size(); ++id) {
            const double d = std::max(std::abs(direct.Y[id] - snell.Y[id]), std::abs(direct.K[id] - snell.K[id]));
            gap = std::max(gap, d);
            if (!(d <= 1e-10))
                c.fail(at(inst.tree, 1000 + seed, id) + ": Y " + std::to_string(direct.Y[id]) + " vs " +
                       std::to_string(snell.Y[id]));
        }
    }
    return c.finish(std::to_string(count) + " instances, max node gap " + fmt(gap));
}

CriterionResult picard_contraction(std::size_t count) {
    Criterion c(4, "Picard contraction");
    double worst_ratio = 0.0, worst_init = 0.0;
    std::size_t max_iter = 0;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_lipschitz_instance(2000 + seed, picard_limits());
        const auto cfg = select_contraction_parameters(inst.gen.lipschitz, inst.gen.beta, 40, 1e-9);
        const std::string where = "seed " + std::to_string(2000 + seed);
        PicardTrace trace;
        try {
            trace = picard_solve(inst.tree, inst.gen, cfg);
        } catch (const NoConvergence& e) {
            c.fail(where + ": no convergence in 40 iterations, last distance " + fmt(e.trace.distances.back()));
            continue;
        }
        max_iter = std::max(max_iter, trace.iterations);
        for (double r : trace.ratios(1e-13)) {
            worst_ratio = std::max(worst_ratio, r);
            if (r > cfg.alpha + 0.05)
                c.fail(where + ": ratio " + fmt(r) + " exceeds alpha + 0.05 = " + fmt(cfg.alpha + 0.05));
        }
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 3.0);
        auto start = PicardIterate::zero(inst.tree);
        for (auto& v : start.Y.values()) v = normal(rng);
        for (auto& v : start.Z.values()) v = normal(rng);
        for (NodeId id = 0; id < inst.tree.size(); ++id)
            for (double& v : start.U[id]) v = normal(rng);
        try {
            const auto other = picard_solve(inst.tree, inst.gen, cfg, start);
            for (NodeId id = 0; id < inst.tree.size(); ++id) {
                const double d = std::abs(other.solution.Y[id] - trace.solution.Y[id]);
                worst_init = std::max(worst_init, d);
                if (d > 1e-8)
                    c.fail(at(inst.tree, 2000 + seed, id) + ": initializations differ by " + fmt(d));
            }
        } catch (const NoConvergence& e) {
            c.fail(where + ": second initialization did not converge");
        }
    }
    return c.finish(std::to_string(count) + " instances, max iterations " + std::to_string(max_iter) +
                        ", max ratio " + fmt(worst_ratio) + ", init gap " + fmt(worst_init),
                    30.0 * static_cast<double>(count) / 20.0);
}

CriterionResult epsilon_optimality(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(5, "epsilon-optimal stopping");
    double worst_k = 0.0, min_slack = INFINITY;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_given_instance(3000 + seed, skorohod_limits());
        const auto sol = hooks.solve(inst.tree, inst.gen);
        for (double eps : {0.1, 0.01, 0.001}) {
            const auto rule = epsilon_optimal_time(inst.tree, sol, inst.gen.h, eps);
            const double reward = reward_of_rule(inst.tree, inst.gen, rule);
            min_slack = std::min(min_slack, reward + eps - sol.Y[0]);
            if (!(sol.Y[0] <= reward + eps))
                c.fail("seed " + std::to_string(3000 + seed) + " eps " + fmt(eps) + ": Y_0 " +
                       std::to_string(sol.Y[0]) + " > reward " + std::to_string(reward) + " + eps");
            const double k = k_flatness_before_stop(inst.tree, sol, rule);
            worst_k = std::max(worst_k, k);
            if (!(k <= 1e-12))
                c.fail("seed " + std::to_string(3000 + seed) + " eps " + fmt(eps) + ": K grows by " + fmt(k) +
                       " before the stop");
        }
    }
    return c.finish(std::to_string(count) + " instances x 3 eps, min slack " + fmt(min_slack) +
                    ", max K before stop " + fmt(worst_k));
}

CriterionResult smallest_optimal(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(6, "smallest optimal time");
    std::size_t tied = 0, checked = 0;
    for (std::uint64_t seed = 0; seed < 2 * count; ++seed) {
        const auto base = random_given_instance(seed / 2, oracle_limits());
        auto gen = base.gen;
        if (seed % 2)
            gen = with_ties(base.tree, gen, hooks.solve(base.tree, gen), seed);
        const auto sol = hooks.solve(base.tree, gen);
        const auto star = smallest_optimal_time(base.tree, sol, gen);
        const double reward = reward_of_rule(base.tree, gen, star.rule);
        const std::string where = "seed " + std::to_string(seed / 2) + (seed % 2 ? " (tied)" : "");
        if (!(std::abs(reward - sol.Y[0]) <= 1e-10))
            c.fail(where + ": reward(tau*) " + std::to_string(reward) + " vs Y_0 " + std::to_string(sol.Y[0]));
        const auto cert = brute_force_value(base.tree, gen, 0, true);
        std::size_t optima = 0;
        for (const auto& r : *cert.all_values) {
            if (std::abs(r.value - cert.value) > 1e-10)
                continue;
            ++optima;
            ++checked;
            if (!stops_no_later(base.tree, star.rule, rule_from_stop_set(base.tree, r.stop_set))) {
                std::string ids;
                for (NodeId id : r.stop_set)
                    ids += " " + std::to_string(id);
                c.fail(where + ": optimal rule stopping at{" + ids + " } stops before tau*");
            }
        }
        tied += optima > 1;
    }
    return c.finish(std::to_string(2 * count) + " instances, " + std::to_string(checked) + " optimal rules, " +
                    std::to_string(tied) + " instances with ties");
}

CriterionResult majorant(std::size_t count, const SuiteHooks& hooks, const std::vector<double>& betas) {
    Criterion c(7, "a priori majorant");
    double min_margin = INFINITY;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        const auto inst = random_given_instance(4000 + seed, skorohod_limits());
        const auto sol = hooks.solve(inst.tree, inst.gen);
        for (double beta : betas) {
            const auto rep = a_priori_majorant(inst.tree, inst.gen, sol, beta);
            for (NodeId id = 0; id < inst.tree.size(); ++id)
                min_margin = std::min(min_margin, rep.S[id] - rep.weighted_abs_y[id]);
            if (!rep.violations.empty()) {
                const NodeId id = rep.violations.front();
                c.fail(at(inst.tree, 4000 + seed, id) + " beta " + fmt(beta) + ": e^{bA/2}|Y| " +
                       std::to_string(rep.weighted_abs_y[id]) + " > S " + std::to_string(rep.S[id]));
            }
        }
    }
    return c.finish(std::to_string(count) + " instances x " + std::to_string(betas.size()) + " betas, min margin " +
                    fmt(min_margin));
}

/// ξ = W_T·N_T with intensity `rate` on [0, 1] and `steps` steps, no barrier.
GivenInstance cross_term(std::size_t steps, double rate) {
    auto tree = ScenarioTree::build(TimeGrid::uniform(steps, 1.0), MarkSet::numbered(1),
                                    CompensatorSpec::linear(rate, {1.0}));
    TerminalPayoff payoff;
    payoff.wn = 1.0;
    GivenGenerators gen;
    gen.xi = terminal_values(tree, payoff);
    gen.h = barrier_values(tree, BarrierSpec{}, gen.xi);
    gen.f = NodeProcess(tree.size());
    gen.g = NodeProcess(tree.size());
    return {std::move(tree), std::move(gen), 0};
}

CriterionResult representation(std::size_t count, const SuiteHooks& hooks, const std::vector<double>& rates) {
    Criterion c(8, "martingale representation");
    double worst_branch = 0.0, worst_mean = 0.0, min_ratio = INFINITY;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        std::mt19937_64 rng(5000 + seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const std::size_t m = 1 + seed % 2;
        const std::size_t steps = 1 + seed % 4;
        std::vector<double> phi(m, 1.0 / static_cast<double>(m));
        TreeOptions options;
        options.brownian = seed % 3 != 0;
        const auto tree = ScenarioTree::build(TimeGrid::uniform(steps, 1.0), MarkSet::numbered(m),
                                              CompensatorSpec::linear(0.3 + std::abs(u(rng)), phi), options);
        TerminalPayoff payoff{u(rng), u(rng), u(rng), 0.0, 0.0};
        AffineGenerator f, g;
        f.d0 = u(rng);
        f.d1 = u(rng);
        g.d0 = u(rng);
        GivenGenerators gen;
        gen.xi = terminal_values(tree, payoff);
        gen.h = barrier_values(tree, BarrierSpec{}, gen.xi);
        gen.f = NodeProcess(tree.size());
        gen.g = NodeProcess(tree.size());
        for (NodeId id = 0; id < tree.size(); ++id) {
            gen.f[id] = f.offset(tree, id);
            gen.g[id] = tree.brownian() ? g.offset(tree, id) : 0.0;
        }
        const auto sol = hooks.solve(tree, gen);
        const auto res = check_equation_residual(tree, sol, gen);
        worst_branch = std::max(worst_branch, res.max_abs_branch);
        if (!(res.max_abs_branch <= 1e-12)) {
            NodeId node = 1;
            for (NodeId id = 1; id < tree.size(); ++id)
                if (std::abs(res.branch[id]) > std::abs(res.branch[node]))
                    node = id;
            c.fail("separable " + at(tree, 5000 + seed, node) + ": branch residual " + fmt(res.branch[node]));
        }
    }
    for (double rate : rates) {
        double previous = 0.0;
        for (std::size_t steps : {2, 4, 8}) {
            const auto inst = cross_term(steps, rate);
            const auto sol = hooks.solve(inst.tree, inst.gen);
            const auto res = check_equation_residual(inst.tree, sol, inst.gen);
            worst_mean = std::max(worst_mean, res.max_abs_mean);
            const std::string where = "cross term rate " + fmt(rate) + " N=" + std::to_string(steps);
            if (!(res.max_abs_mean <= 1e-10))
                c.fail(where + ": conditional mean of residual " + fmt(res.max_abs_mean));
            if (res.max_magnitude == 0.0)
                c.fail(where + ": residual vanishes on a cross-term payoff");
            if (previous > 0.0) {
                const double ratio = previous / res.max_magnitude;
                min_ratio = std::min(min_ratio, ratio);
                if (!(ratio >= 1.8))
                    c.fail(where + ": residual shrinks only by " + fmt(ratio));
            }
            previous = res.max_magnitude;
        }
    }
    return c.finish(std::to_string(count) + " separable payoffs, max branch residual " + fmt(worst_branch) +
                    "; cross term max mean " + fmt(worst_mean) + ", min refinement ratio " + fmt(min_ratio));
}

CriterionResult fixtures(const SuiteHooks& hooks) {
    Criterion c(9, "hand-computed fixtures");
    const auto e2 = fixture_e2();
    const auto s2 = hooks.solve(e2.tree, e2.gen);
    const auto expect = [&](const std::string& what, double got, double want) {
        if (!(std::abs(got - want) <= 1e-12))
            c.fail(what + " = " + std::to_string(got) + ", expected " + std::to_string(want));
    };
    expect("E2 Y_0", s2.Y[0], 0.5);
    expect("E2 Z_0", s2.Z.empty() ? NAN : s2.Z[0], 1.0);
    expect("E2 dK_0", s2.dK[0], 0.5);

    const auto e3 = fixture_e3();
    const auto s3 = hooks.solve(e3.tree, e3.gen);
    expect("E3 Y_0", s3.Y[0], 0.5);
    expect("E3 U_0(e1)", s3.U[0][0], 1.0);
    expect("E3 |U|^2", norm_sq(e3.tree, s3.U, {WeightedNorm::Kind::p, 0.0, 0.0}), std::numbers::ln2);

    TreeOptions options;
    options.brownian = false;
    const auto tree = ScenarioTree::build(TimeGrid::uniform(1, 1.0), MarkSet::numbered(1),
                                          CompensatorSpec::linear(1.0, {1.0}), options);
    AffineGenerator f;
    f.a = 0.1;
    TerminalPayoff xi;
    xi.c0 = 1.0;
    BarrierSpec h;
    h.values = {-10.0};
    auto spec = make_generator_spec(tree, f, AffineGenerator{}, xi, h, 1.0, 0.1);
    spec.g = nullptr;
    const auto cfg = select_contraction_parameters(spec.lipschitz, 1.0, 100, 1e-13);
    try {
        expect("linear fixed point Y_0", picard_solve(tree, spec, cfg).solution.Y[0], 1.0 / 0.9);
    } catch (const NoConvergence&) {
        c.fail("linear fixed point: Picard did not converge");
    }
    return c.finish("E2, E3 and linear fixed point exact to 1e-12");
}

/// Follows the jump history of `id` in `twin` down the jump-only tree.
NodeId jump_only_node(const ScenarioTree& twin, const ScenarioTree& jumps, NodeId id) {
    std::vector<int> history;
    for (NodeId n = id; n != 0; n = twin.node(n).parent)
        history.push_back(twin.node(n).jump_mark);
    NodeId node = 0;
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        NodeId next = no_node;
        for (NodeId ch = jumps.child_begin(node); ch < jumps.child_end(node); ++ch)
            if (jumps.node(ch).jump_mark == *it)
                next = ch;
        node = next;
    }
    return node;
}

CriterionResult mpp_only(std::size_t count, const SuiteHooks& hooks) {
    Criterion c(10, "jump-only mode");
    double worst = 0.0;
    std::size_t found = 0;
    InstanceLimits limits = skorohod_limits();
    for (std::uint64_t seed = 6000; found < count; ++seed) {
        auto inst = random_given_instance(seed, limits);
        if (inst.tree.brownian())
            continue;
        ++found;
        for (auto& v : inst.gen.g.values())
            v = 0.0;
        const auto a = hooks.solve_mpp(inst.tree, inst.gen);
        const auto b = hooks.solve(inst.tree, inst.gen);

        // The same data read on a tree with Brownian branching: W never enters.
        const auto twin = ScenarioTree::build(inst.tree.grid(), inst.tree.marks(), inst.tree.compensator());
        GivenGenerators tg;
        tg.xi = tg.f = tg.g = tg.h = NodeProcess(twin.size());
        std::vector<NodeId> map(twin.size());
        for (NodeId id = 0; id < twin.size(); ++id) {
            map[id] = jump_only_node(twin, inst.tree, id);
            tg.xi[id] = inst.gen.xi[map[id]];
            tg.f[id] = inst.gen.f[map[id]];
            tg.h[id] = inst.gen.h[map[id]];
        }
        const auto t = hooks.solve(twin, tg);

        auto compare = [&](const std::string& what, NodeId id, double x, double y) {
            const double d = std::abs(x - y);
            worst = std::max(worst, d);
            if (!(d <= 1e-12))
                c.fail(at(inst.tree, seed, id) + ": " + what + " " + std::to_string(x) + " vs " + std::to_string(y));
        };
        for (NodeId id = 0; id < inst.tree.size(); ++id) {
            compare("Y (no dW)", id, a.Y[id], b.Y[id]);
            compare("K (no dW)", id, a.K[id], b.K[id]);
            for (std::size_t e = 0; e < inst.tree.mark_count(); ++e)
                compare("U (no dW)", id, a.U[id][e], b.U[id][e]);
        }
        for (NodeId id = 0; id < twin.size(); ++id) {
            compare("Y (W-free data)", map[id], a.Y[map[id]], t.Y[id]);
            compare("K (W-free data)", map[id], a.K[map[id]], t.K[id]);
            compare("Z (W-free data)", map[id], 0.0, t.Z[id]);
            for (std::size_t e = 0; e < twin.mark_count(); ++e)
                compare("U (W-free data)", map[id], a.U[map[id]][e], t.U[id][e]);
        }
    }
    return c.finish(std::to_string(count) + " instances, max node gap " + fmt(worst));
}

} // namespace

bool SuiteReport::passed() const {
    for (const auto& c : criteria)
        if (!c.passed)
            return false;
    return true;
}

void SuiteReport::print(std::ostream& out) const {
    for (const auto& c : criteria)
        out << "criterion " << c.id << ' ' << (c.passed ? "PASS" : "FAIL") << ' ' << c.name << ": " << c.detail
            << " [" << fmt(c.seconds) << " s]\n";
}

SuiteReport verify_suite(Scale scale, const SuiteHooks& hooks) {
    const std::size_t k = scale == Scale::full ? 5 : 1;
    SuiteReport report;
    report.criteria.push_back(oracle_equivalence(20 * k, hooks));
    report.criteria.push_back(skorohod_suite(50 * k, hooks));
    report.criteria.push_back(route_equivalence(50 * k, hooks));
    report.criteria.push_back(picard_contraction(20 * k));
    report.criteria.push_back(epsilon_optimality(20 * k, hooks));
    report.criteria.push_back(smallest_optimal(20 * k, hooks));
    report.criteria.push_back(majorant(20 * k, hooks,
                                       scale == Scale::full ? std::vector<double>{0.5, 1.0, 2.0, 4.0}
                                                            : std::vector<double>{0.5, 1.0, 2.0}));
    report.criteria.push_back(representation(20 * k, hooks,
                                             scale == Scale::full ? std::vector<double>{0.5, 0.25}
                                                                  : std::vector<double>{0.5}));
    report.criteria.push_back(fixtures(hooks));
    report.criteria.push_back(mpp_only(20 * k, hooks));
    return report;
}

} // namespace mprb::app
