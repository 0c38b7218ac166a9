#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mprb {

/// Compensator increment ΔA_k < 0 on some grid step.
class NonMonotoneCompensator : public std::runtime_error {
public:
    NonMonotoneCompensator(std::size_t step, double increment);
    std::size_t step;
    double increment;
};

/// Scenario tree would need more nodes than the configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::size_t required, std::size_t budget);
    std::size_t required;
    std::size_t budget;
};

class NotSupermartingale : public std::runtime_error {
public:
    NotSupermartingale(std::size_t node, double excess);
    std::size_t node;
    double excess;
};

class BrownianBranchesPresent : public std::runtime_error {
public:
    BrownianBranchesPresent();
};

class BetaTooSmall : public std::runtime_error {
public:
    BetaTooSmall(double beta, double minimal);
    double beta;
    double minimal;
};

class EnumerationBudgetExceeded : public std::runtime_error {
public:
    EnumerationBudgetExceeded(std::size_t interior_nodes, std::size_t cap);
    std::size_t interior_nodes;
    std::size_t cap;
};

class BetaZero : public std::invalid_argument {
public:
    BetaZero();
};

/// Configuration rejected; `field` is the dotted path of the offending entry.
class ConfigInvalid : public std::runtime_error {
public:
    ConfigInvalid(std::string field, const std::string& message);
    std::string field;
};

} // namespace mprb
