#pragma once

#include <cstddef>
#include <vector>

namespace mprb {

/// Discretization 0 = t_0 < t_1 < ... < t_N = T of the horizon.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    static TimeGrid uniform(std::size_t steps, double horizon);

    std::size_t steps() const { return times_.size() - 1; }
    double horizon() const { return times_.back(); }
    double time(std::size_t k) const { return times_[k]; }
    double dt(std::size_t k) const { return times_[k + 1] - times_[k]; }
    const std::vector<double>& times() const { return times_; }

    /// Index k of the step (t_k, t_{k+1}] containing t, for t in (0, T].
    std::size_t step_containing(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> times_;
};

} // namespace mprb
