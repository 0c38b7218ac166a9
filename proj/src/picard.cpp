#include "mprb/picard.hpp"

#include "mprb/errors.hpp"
#include "mprb/wnorm.hpp"

#include <cmath>
#include <sstream>

namespace mprb {

namespace {
double y_bound(const Lipschitz& lip, double alpha) {
    return lip.u * lip.u / alpha + 2.0 * lip.f / std::sqrt(alpha);
}
double z_bound(const Lipschitz& lip, double alpha) {
    return lip.z * lip.z / alpha + 2.0 * lip.g / std::sqrt(alpha);
}
} // namespace

bool ContractionConfig::admissible() const {
    return alpha > 0.0 && alpha < 1.0 && beta > y_bound(lipschitz, alpha) && gamma > z_bound(lipschitz, alpha);
}

ContractionConfig select_contraction_parameters(const Lipschitz& lip, double beta, std::size_t max_iter,
                                                double tol) {
    const double minimal = lip.u * lip.u + 2.0 * lip.f;
    if (!(beta > minimal))
        throw BetaTooSmall(beta, minimal);

    // y_bound is decreasing in α; keep lo feasible and hi infeasible.
    constexpr double resolution = 1e-9;
    double alpha = 1.0 - resolution;
    if (!(beta > y_bound(lip, alpha))) {
        double lo = 0.0, hi = alpha;
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            if (mid > 0.0 && beta > y_bound(lip, mid))
                lo = mid;
            else
                hi = mid;
        }
        alpha = lo;
    }
    ContractionConfig cfg;
    cfg.beta = beta;
    cfg.alpha = alpha;
    cfg.gamma = z_bound(lip, alpha) + 1.0;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    cfg.lipschitz = lip;
    return cfg;
}

PicardIterate PicardIterate::zero(const ScenarioTree& tree) {
    return {NodeProcess(tree.size()), MarkProcess(tree.size(), tree.mark_count()), NodeProcess(tree.size())};
}

PicardIterate PicardIterate::of(const RbsdeSolution& sol) {
    PicardIterate it{sol.Y, sol.U, sol.Z};
    if (it.Z.empty())
        it.Z = NodeProcess(sol.Y.size());
    return it;
}

double composite_distance(const ScenarioTree& tree, const PicardIterate& a, const PicardIterate& b,
                          const ContractionConfig& cfg) {
    const std::size_t n = tree.size();
    NodeProcess dy(n), dz(n);
    MarkProcess du(n, tree.mark_count());
    for (NodeId id = 0; id < n; ++id) {
        dy[id] = a.Y[id] - b.Y[id];
        dz[id] = a.Z[id] - b.Z[id];
        auto d = du[id];
        const auto ua = a.U[id];
        const auto ub = b.U[id];
        for (std::size_t e = 0; e < d.size(); ++e)
            d[e] = ua[e] - ub[e];
    }
    const double root_alpha = std::sqrt(cfg.alpha);
    const double sq =
        cfg.lipschitz.f / root_alpha * norm_sq(tree, dy, {WeightedNorm::Kind::A, cfg.beta, cfg.gamma}) +
        cfg.lipschitz.g / root_alpha * norm_sq(tree, dy, {WeightedNorm::Kind::W, cfg.beta, cfg.gamma}) +
        norm_sq(tree, du, {WeightedNorm::Kind::p, cfg.beta, cfg.gamma}) +
        norm_sq(tree, dz, {WeightedNorm::Kind::W, cfg.beta, cfg.gamma});
    return std::sqrt(sq);
}

double composite_distance(const ScenarioTree& tree, const RbsdeSolution& a, const RbsdeSolution& b,
                          const ContractionConfig& cfg) {
    return composite_distance(tree, PicardIterate::of(a), PicardIterate::of(b), cfg);
}

std::vector<double> PicardTrace::ratios(double floor) const {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < distances.size(); ++i) {
        if (!(distances[i] > floor))
            break;
        out.push_back(distances[i + 1] / distances[i]);
    }
    return out;
}

namespace {
std::string no_convergence_message(const PicardTrace& trace) {
    std::ostringstream os;
    os << "Picard iteration did not converge in " << trace.iterations << " iterations";
    if (!trace.distances.empty())
        os << " (last distance " << trace.distances.back() << ")";
    return os.str();
}
} // namespace

NoConvergence::NoConvergence(PicardTrace trace_)
    : std::runtime_error(no_convergence_message(trace_)), trace(std::move(trace_)) {}

PicardTrace picard_solve(const ScenarioTree& tree, const GeneratorSpec& gen, const ContractionConfig& cfg,
                         const std::optional<PicardIterate>& start) {
    const bool jump_only = !tree.brownian() && !gen.g;
    PicardIterate current = start ? *start : PicardIterate::zero(tree);
    PicardTrace trace;
    for (std::size_t i = 0; i < cfg.max_iter; ++i) {
        trace.frozen = freeze(tree, gen, current.Y, current.U, current.Z);
        trace.solution = jump_only ? solve_mpp_only(tree, trace.frozen) : solve_given_generators(tree, trace.frozen);
        PicardIterate next = PicardIterate::of(trace.solution);
        const double d = composite_distance(tree, next, current, cfg);
        trace.distances.push_back(d);
        trace.iterations = i + 1;
        current = std::move(next);
        if (d <= cfg.tol) {
            trace.converged = true;
            return trace;
        }
    }
    throw NoConvergence(std::move(trace));
}

} // namespace mprb
