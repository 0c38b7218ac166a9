#include "mprb/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mprb {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2)
        throw std::invalid_argument("time grid needs at least one step");
    if (times_.front() != 0.0)
        throw std::invalid_argument("time grid must start at 0");
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        if (!(times_[k + 1] > times_[k]) || !std::isfinite(times_[k + 1]))
            throw std::invalid_argument("time grid must be strictly increasing and finite");
    }
}

TimeGrid TimeGrid::uniform(std::size_t steps, double horizon) {
    if (steps == 0 || !(horizon > 0.0))
        throw std::invalid_argument("uniform grid needs steps >= 1 and horizon > 0");
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
    t.back() = horizon;
    return TimeGrid(std::move(t));
}

std::size_t TimeGrid::step_containing(double t) const {
    if (!(t > 0.0) || t > horizon())
        throw std::out_of_range("time outside (0, T]");
    auto it = std::lower_bound(times_.begin() + 1, times_.end(), t);
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

} // namespace mprb
