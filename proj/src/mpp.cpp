#include "mprb/mpp.hpp"

#include "mprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace mprb {

MarkSet::MarkSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw std::invalid_argument("mark set must contain at least one mark");
    std::unordered_set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size())
        throw std::invalid_argument("mark labels must be distinct");
}

MarkSet MarkSet::numbered(std::size_t m) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < m; ++i)
        labels.push_back("e" + std::to_string(i + 1));
    return MarkSet(std::move(labels));
}

CompensatorSpec::CompensatorSpec(Kind kind, std::vector<double> breakpoints, std::vector<double> rates,
                                 std::vector<std::vector<double>> phis, double count_slope)
    : kind_(kind), breakpoints_(std::move(breakpoints)), rates_(std::move(rates)),
      phis_(std::move(phis)), count_slope_(count_slope) {
    if (breakpoints_.empty() || breakpoints_.front() != 0.0)
        throw std::invalid_argument("compensator breakpoints must start at 0");
    if (rates_.size() != breakpoints_.size() || phis_.size() != breakpoints_.size())
        throw std::invalid_argument("compensator needs one rate and one kernel per breakpoint");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (!(breakpoints_[i + 1] > breakpoints_[i]))
            throw std::invalid_argument("compensator breakpoints must be increasing");
    const std::size_t m = phis_.front().size();
    if (m == 0)
        throw std::invalid_argument("mark kernel must have at least one entry");
    for (const auto& phi : phis_) {
        if (phi.size() != m)
            throw std::invalid_argument("all mark kernels must have the same length");
        double sum = 0.0;
        for (double p : phi) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw std::invalid_argument("mark kernel weights must be finite and nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("mark kernel weights must sum to 1");
    }
    for (double r : rates_)
        if (!std::isfinite(r))
            throw std::invalid_argument("compensator rates must be finite");
    if (!std::isfinite(count_slope_))
        throw std::invalid_argument("count slope must be finite");
}

CompensatorSpec CompensatorSpec::linear(double rate, std::vector<double> phi, double count_slope) {
    return CompensatorSpec(Kind::linear, {0.0}, {rate}, {std::move(phi)}, count_slope);
}

CompensatorSpec CompensatorSpec::piecewise(std::vector<double> breakpoints, std::vector<double> rates,
                                           std::vector<std::vector<double>> phis, double count_slope) {
    return CompensatorSpec(Kind::piecewise, std::move(breakpoints), std::move(rates), std::move(phis),
                           count_slope);
}

std::size_t CompensatorSpec::piece(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double CompensatorSpec::cumulative(double t) const {
    double a = 0.0;
    for (std::size_t i = 0; i < breakpoints_.size() && breakpoints_[i] < t; ++i) {
        const double end = i + 1 < breakpoints_.size() ? std::min(breakpoints_[i + 1], t) : t;
        a += rates_[i] * (end - breakpoints_[i]);
    }
    return a;
}

double CompensatorSpec::increment(double t0, double t1, int jumps_before) const {
    return (1.0 + count_slope_ * jumps_before) * (cumulative(t1) - cumulative(t0));
}

std::span<const double> CompensatorSpec::kernel(double t) const {
    return phis_[piece(t)];
}

MppPath simulate_path(const CompensatorSpec& spec, const MarkSet& marks, const TimeGrid& grid,
                      std::uint64_t seed) {
    if (marks.size() != spec.mark_count())
        throw std::invalid_argument("mark set and kernel sizes differ");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    MppPath path;
    path.horizon = grid.horizon();
    int jumps = 0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const double da = spec.increment(grid.time(k), grid.time(k + 1), jumps);
        if (da < 0.0 || !std::isfinite(da))
            throw NonMonotoneCompensator(k, da);
        const double u = uniform(rng);
        if (u < -std::expm1(-da)) {
            const auto phi = spec.kernel(grid.time(k));
            std::discrete_distribution<std::size_t> pick(phi.begin(), phi.end());
            path.events.push_back({grid.time(k + 1), pick(rng)});
            ++jumps;
        }
    }
    return path;
}

std::vector<int> counting_process(const MppPath& path, const TimeGrid& grid) {
    if (path.horizon != grid.horizon())
        throw std::invalid_argument("path horizon does not match the grid");
    std::vector<int> n(grid.steps() + 1, 0);
    std::size_t next = 0;
    for (std::size_t k = 0; k <= grid.steps(); ++k) {
        while (next < path.events.size() && path.events[next].time <= grid.time(k))
            ++next;
        n[k] = static_cast<int>(next);
    }
    return n;
}

namespace {
std::vector<int> events_per_step(const MppPath& path, const TimeGrid& grid) {
    std::vector<int> per_step(grid.steps(), -1);
    for (const auto& ev : path.events) {
        const std::size_t k = grid.step_containing(ev.time);
        if (per_step[k] >= 0)
            throw std::invalid_argument("path has more than one event in a grid step");
        per_step[k] = static_cast<int>(ev.mark);
    }
    return per_step;
}
} // namespace

std::vector<double> discrete_compensator(const MppPath& path, const CompensatorSpec& spec,
                                         const TimeGrid& grid) {
    const auto per_step = events_per_step(path, grid);
    std::vector<double> c(grid.steps() + 1, 0.0);
    int jumps = 0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const double da = spec.increment(grid.time(k), grid.time(k + 1), jumps);
        c[k + 1] = c[k] - std::expm1(-da);
        if (per_step[k] >= 0)
            ++jumps;
    }
    return c;
}

double compensated_integral(const MppPath& path, const CompensatorSpec& spec,
                            const StepMarkIntegrand& integrand, const TimeGrid& grid) {
    const auto per_step = events_per_step(path, grid);
    double jumps_part = 0.0;
    double compensator_part = 0.0;
    int jumps = 0;
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        const double da = spec.increment(grid.time(k), grid.time(k + 1), jumps);
        const auto phi = spec.kernel(grid.time(k));
        for (std::size_t e = 0; e < phi.size(); ++e)
            compensator_part += integrand(k, e) * phi[e] * da;
        if (per_step[k] >= 0) {
            jumps_part += integrand(k, static_cast<std::size_t>(per_step[k]));
            ++jumps;
        }
    }
    return jumps_part - compensator_part;
}

} // namespace mprb
