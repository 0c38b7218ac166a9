#include "mprb/errors.hpp"

#include <sstream>

namespace mprb {

namespace {
template <typename... Args>
std::string concat(Args&&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}
} // namespace

NonMonotoneCompensator::NonMonotoneCompensator(std::size_t step_, double increment_)
    : std::runtime_error(concat("compensator decreases on step ", step_, " (increment ", increment_, ")")),
      step(step_), increment(increment_) {}

BudgetExceeded::BudgetExceeded(std::size_t required_, std::size_t budget_)
    : std::runtime_error(concat("scenario tree needs ", required_, " nodes, budget is ", budget_)),
      required(required_), budget(budget_) {}

NotSupermartingale::NotSupermartingale(std::size_t node_, double excess_)
    : std::runtime_error(concat("process is not a supermartingale at node ", node_,
                                ": conditional increment ", excess_)),
      node(node_), excess(excess_) {}

BrownianBranchesPresent::BrownianBranchesPresent()
    : std::runtime_error("jump-only solve requested on a tree with Brownian branching") {}

BetaTooSmall::BetaTooSmall(double beta_, double minimal_)
    : std::runtime_error(concat("beta = ", beta_, " must exceed L_U^2 + 2 L_f = ", minimal_)),
      beta(beta_), minimal(minimal_) {}

EnumerationBudgetExceeded::EnumerationBudgetExceeded(std::size_t interior_, std::size_t cap_)
    : std::runtime_error(concat("stopping-rule enumeration over ", interior_,
                                " interior nodes exceeds the cap of ", cap_)),
      interior_nodes(interior_), cap(cap_) {}

BetaZero::BetaZero() : std::invalid_argument("beta must be positive") {}

ConfigInvalid::ConfigInvalid(std::string field_, const std::string& message)
    : std::runtime_error(field_ + ": " + message), field(std::move(field_)) {}

} // namespace mprb
