#include "mprb/app/run.hpp"

#include "mprb/errors.hpp"
#include "mprb/mpp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mprb::app {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double max_abs_diff(const NodeProcess& a, const NodeProcess& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void add(RunArtifact& art, std::string name, bool passed, std::string detail) {
    art.verdicts.push_back({std::move(name), passed, std::move(detail)});
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string where(const ScenarioTree& tree, NodeId id) {
    return id == no_node ? "" : " at node " + std::to_string(id) + " (" + tree.path_label(id) + ")";
}

std::string node_list(const std::vector<NodeId>& ids) {
    std::string s;
    for (NodeId id : ids)
        s += (s.empty() ? "" : " ") + std::to_string(id);
    return s;
}

void solve(RunArtifact& art) {
    const RunConfig& cfg = art.config;
    const GeneratorSpec spec = cfg.generator_spec(art.tree);
    const bool state_free = cfg.generator.f.state_free() &&
                            cfg.generator.g.value_or(AffineGenerator{}).state_free();
    if (cfg.mode == Mode::picard || !state_free) {
        auto contraction = select_contraction_parameters(spec.lipschitz, spec.beta, cfg.picard.max_iter,
                                                          cfg.picard.tol);
        art.contraction = contraction;
        PicardTrace trace;
        try {
            trace = picard_solve(art.tree, spec, contraction);
        } catch (const NoConvergence& e) {
            trace = e.trace;
        }
        art.data = trace.frozen;
        art.solution = trace.solution;
        art.trace = std::move(trace);
        return;
    }
    art.data = freeze(art.tree, spec, NodeProcess(art.tree.size()),
                      MarkProcess(art.tree.size(), art.tree.mark_count()), NodeProcess(art.tree.size()));
    art.solution = cfg.mode == Mode::mpp_only ? solve_mpp_only(art.tree, art.data)
                                              : solve_given_generators(art.tree, art.data);
}

void check_solution(RunArtifact& art) {
    const auto& tree = art.tree;
    art.skorohod = check_skorohod(tree, art.solution, art.data);
    add(art, "skorohod", art.skorohod.passed(),
        "max (Y-h)dK " + fmt(art.skorohod.max_product) + where(tree, art.skorohod.worst_product_node) +
            ", max (h-Y)+ " + fmt(art.skorohod.max_barrier_violation) +
            where(tree, art.skorohod.worst_barrier_node) + ", terminal " +
            fmt(art.skorohod.max_terminal_mismatch));

    art.residual = check_equation_residual(tree, art.solution, art.data);
    add(art, "equation_residual_mean", art.residual.max_abs_mean <= 1e-10,
        "max |E[residual]| " + fmt(art.residual.max_abs_mean));

    const auto snell = solve_via_snell(tree, art.data);
    art.route_gap = std::max(max_abs_diff(snell.Y, art.solution.Y), max_abs_diff(snell.K, art.solution.K));
    add(art, "snell_route", art.route_gap <= 1e-10, "max |Y - Y_snell|, |K - K_snell| " + fmt(art.route_gap));

    art.majorant = a_priori_majorant(tree, art.data, art.solution, art.config.generator.beta);
    add(art, "majorant", art.majorant.violations.empty(),
        art.majorant.violations.empty() ? "S_0 " + fmt(art.majorant.S[0])
                                        : "violated at nodes " + node_list(art.majorant.violations));

    if (art.trace) {
        const auto& trace = *art.trace;
        add(art, "picard_converged", trace.converged,
            std::to_string(trace.iterations) + " iterations, last distance " +
                fmt(trace.distances.empty() ? 0.0 : trace.distances.back()));
        double worst = 0.0;
        for (double r : trace.ratios(1e-13))
            worst = std::max(worst, r);
        add(art, "picard_contraction", worst <= art.contraction->alpha + 0.05,
            "max ratio " + fmt(worst) + ", alpha " + fmt(art.contraction->alpha));
    }
}

void check_stopping(RunArtifact& art) {
    const auto& tree = art.tree;
    const double y0 = art.solution.Y[0];
    for (double eps : art.config.stopping.epsilons) {
        const auto rule = epsilon_optimal_time(tree, art.solution, art.data.h, eps);
        EpsilonRow row{eps, reward_of_rule(tree, art.data, rule), k_flatness_before_stop(tree, art.solution, rule),
                       rule.first_entries(tree)};
        add(art, "epsilon_optimal[" + label(eps) + "]", y0 <= row.reward + eps,
            "Y_0 " + fmt(y0) + ", reward " + fmt(row.reward));
        add(art, "k_flat_before_stop[" + label(eps) + "]", row.k_before_stop <= 1e-12,
            "K before stop " + fmt(row.k_before_stop));
        art.epsilon_rules.push_back(std::move(row));
    }
    const auto star = smallest_optimal_time(tree, art.solution, art.data);
    art.tau_star = star.rule.first_entries(tree);
    art.tau_star_reward = reward_of_rule(tree, art.data, star.rule);
    add(art, "tau_star_optimal", std::abs(art.tau_star_reward - y0) <= 1e-10,
        "reward " + fmt(art.tau_star_reward) + ", Y_0 " + fmt(y0));

    if (!art.config.stopping.oracle)
        return;
    try {
        auto cert = brute_force_value(tree, art.data, 0, true);
        cert.epsilon = std::abs(cert.value - y0);
        add(art, "oracle_value", cert.epsilon <= 1e-10,
            "oracle " + fmt(cert.value) + " over " + std::to_string(cert.enumerated) + " rules, Y_0 " + fmt(y0));
        std::vector<NodeId> later;
        for (const auto& r : *cert.all_values)
            if (std::abs(r.value - cert.value) <= 1e-10 &&
                !stops_no_later(tree, star.rule, rule_from_stop_set(tree, r.stop_set)))
                later.insert(later.end(), r.stop_set.begin(), r.stop_set.end());
        add(art, "tau_star_smallest", later.empty(),
            later.empty() ? "no optimal rule stops earlier" : "earlier optimal stops at " + node_list(later));
        art.certificate = std::move(cert);
    } catch (const EnumerationBudgetExceeded& e) {
        art.oracle_note = std::string("skipped: ") + e.what();
    }
}

json verdicts_json(const std::vector<Verdict>& verdicts) {
    json arr = json::array();
    for (const auto& v : verdicts)
        arr.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
    return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

} // namespace

bool RunArtifact::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

std::vector<NormRow> norm_table(const ScenarioTree& tree, const RbsdeSolution& sol, double beta, double gamma) {
    using K = WeightedNorm::Kind;
    std::vector<NormRow> rows{
        {"Y", "A", beta, gamma, norm_sq(tree, sol.Y, {K::A, beta, gamma})},
        {"Y", "W", beta, gamma, norm_sq(tree, sol.Y, {K::W, beta, gamma})},
        {"Y", "A+lambda", beta, gamma, norm_sq(tree, sol.Y, {K::A_plus_lambda, beta, gamma})},
        {"U", "p", beta, gamma, norm_sq(tree, sol.U, {K::p, beta, gamma})},
    };
    if (!sol.Z.empty())
        rows.push_back({"Z", "W", beta, gamma, norm_sq(tree, sol.Z, {K::W, beta, gamma})});
    return rows;
}

RunArtifact run(const RunConfig& config) {
    config.validate();
    RunArtifact art(config, config.build_tree());
    solve(art);
    check_solution(art);
    check_stopping(art);
    art.norms = norm_table(art.tree, art.solution, config.generator.beta,
                           art.contraction ? art.contraction->gamma : 0.0);
    if (config.generator.beta > 0.0) {
        const auto bound = cauchy_weight_bound(art.tree, art.data.f, config.generator.beta);
        add(art, "cauchy_weight_bound", bound.holds_pathwise, "lhs " + fmt(bound.lhs) + ", rhs " + fmt(bound.rhs));
    }
    return art;
}

void write_artifact(const RunArtifact& art, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& tree = art.tree;
    const auto& sol = art.solution;
    const std::size_t m = tree.mark_count();

    json summary;
    summary["config"] = json::parse(art.config.dump());
    summary["passed"] = art.passed();
    summary["Y0"] = sol.Y[0];
    summary["nodes"] = tree.size();
    summary["verdicts"] = verdicts_json(art.verdicts);
    summary["skorohod"] = {{"max_product", art.skorohod.max_product},
                           {"max_negative_increment", art.skorohod.max_negative_increment},
                           {"max_barrier_violation", art.skorohod.max_barrier_violation},
                           {"max_terminal_mismatch", art.skorohod.max_terminal_mismatch}};
    summary["residual"] = {{"max_abs_mean", art.residual.max_abs_mean},
                           {"max_abs_branch", art.residual.max_abs_branch},
                           {"max_magnitude", art.residual.max_magnitude}};
    summary["route_gap"] = art.route_gap;
    summary["majorant_S0"] = art.majorant.S.empty() ? 0.0 : art.majorant.S[0];
    if (art.contraction)
        summary["contraction"] = {{"alpha", art.contraction->alpha},
                                  {"beta", art.contraction->beta},
                                  {"gamma", art.contraction->gamma}};
    if (art.trace)
        summary["picard"] = {{"iterations", art.trace->iterations}, {"converged", art.trace->converged}};
    json stopping = json::array();
    for (const auto& row : art.epsilon_rules)
        stopping.push_back({{"epsilon", row.epsilon},
                            {"reward", row.reward},
                            {"k_before_stop", row.k_before_stop},
                            {"stop_set", row.stop_set}});
    summary["epsilon_rules"] = stopping;
    summary["tau_star"] = {{"stop_set", art.tau_star}, {"reward", art.tau_star_reward}};
    if (art.certificate)
        summary["certificate"] = {{"value", art.certificate->value},
                                  {"rule", art.certificate->best_rule.first_entries(tree)},
                                  {"enumerated", art.certificate->enumerated},
                                  {"epsilon", art.certificate->epsilon}};
    else if (!art.oracle_note.empty())
        summary["certificate"] = art.oracle_note;
    json norms = json::array();
    for (const auto& r : art.norms)
        norms.push_back({{"process", r.process}, {"kind", r.kind}, {"beta", r.beta}, {"gamma", r.gamma},
                         {"value", r.value}});
    summary["norms"] = norms;
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    std::ostringstream csv;
    csv << "id,path,level,t,w,jumps,path_prob,xi,h,f,g,Y,Z";
    for (std::size_t e = 0; e < m; ++e)
        csv << ",U_" << tree.marks().label(e);
    csv << ",K,dK,residual\n";
    for (NodeId id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(id);
        csv << id << ',' << tree.path_label(id) << ',' << n.level << ',' << fmt(tree.grid().time(n.level)) << ','
            << fmt(n.w) << ',' << n.jumps << ',' << fmt(n.path_prob) << ',' << fmt(art.data.xi[id]) << ','
            << fmt(art.data.h[id]) << ',' << fmt(art.data.f[id]) << ',' << fmt(art.data.g[id]) << ','
            << fmt(sol.Y[id]) << ',' << (sol.Z.empty() ? "" : fmt(sol.Z[id]));
        for (std::size_t e = 0; e < m; ++e)
            csv << ',' << fmt(sol.U[id][e]);
        csv << ',' << fmt(sol.K[id]) << ',' << fmt(sol.dK[id]) << ',' << fmt(sol.residual[id]) << '\n';
    }
    write_text(dir / "solution.csv", csv.str());

    std::ostringstream nt;
    nt << "process,kind,beta,gamma,norm_sq\n";
    for (const auto& r : art.norms)
        nt << r.process << ',' << r.kind << ',' << fmt(r.beta) << ',' << fmt(r.gamma) << ',' << fmt(r.value) << '\n';
    write_text(dir / "norms.csv", nt.str());

    if (art.trace) {
        std::ostringstream pt;
        pt << "iteration,distance,ratio\n";
        const auto& d = art.trace->distances;
        for (std::size_t i = 0; i < d.size(); ++i)
            pt << i << ',' << fmt(d[i]) << ',' << (i >= 2 && d[i - 1] > 0.0 ? fmt(d[i] / d[i - 1]) : "") << '\n';
        write_text(dir / "picard_trace.csv", pt.str());
    }
}

SimulationReport simulate(const RunConfig& config, const std::optional<std::filesystem::path>& dir) {
    config.validate();
    const auto grid = config.time_grid();
    const auto marks = config.mark_set();
    const auto spec = config.compensator_spec();
    SimulationReport rep;
    rep.paths = config.simulation.paths;
    std::ostringstream csv;
    csv << "path,time,mark\n";
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < rep.paths; ++p) {
        const auto path = simulate_path(spec, marks, grid, config.seed + p);
        for (const auto& ev : path.events)
            csv << p << ',' << fmt(ev.time) << ',' << marks.label(ev.mark) << '\n';
        const double count = counting_process(path, grid).back();
        const double comp = discrete_compensator(path, spec, grid).back();
        rep.mean_count += count;
        rep.mean_compensator += comp;
        sum += count - comp;
        sum_sq += (count - comp) * (count - comp);
    }
    const double n = static_cast<double>(rep.paths);
    rep.mean_count /= n;
    rep.mean_compensator /= n;
    rep.mean_martingale = sum / n;
    const double var = rep.paths > 1 ? std::max(0.0, (sum_sq - n * rep.mean_martingale * rep.mean_martingale) / (n - 1))
                                     : 0.0;
    rep.standard_error = std::sqrt(var / n);
    rep.passed = std::abs(rep.mean_martingale) <= 4.0 * rep.standard_error + 1e-12;
    if (dir) {
        std::filesystem::create_directories(*dir);
        write_text(*dir / "paths.csv", csv.str());
        const json j{{"config", json::parse(config.dump())},
                     {"paths", rep.paths},
                     {"mean_count", rep.mean_count},
                     {"mean_compensator", rep.mean_compensator},
                     {"mean_martingale", rep.mean_martingale},
                     {"standard_error", rep.standard_error},
                     {"passed", rep.passed}};
        write_text(*dir / "simulation.json", j.dump(2) + "\n");
    }
    return rep;
}

} // namespace mprb::app
