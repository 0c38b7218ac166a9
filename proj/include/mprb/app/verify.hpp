#pragma once

#include "mprb/rbsde.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mprb::app {

enum class Scale { small, full };

/// Solvers under test. Tests swap these for tampered versions.
struct SuiteHooks {
    std::function<RbsdeSolution(const ScenarioTree&, const GivenGenerators&)> solve = solve_given_generators;
    std::function<RbsdeSolution(const ScenarioTree&, const GivenGenerators&)> solve_mpp = solve_mpp_only;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = true;
    std::string detail;  ///< first failing instance and node, or summary figures
    double seconds = 0.0;
};

struct SuiteReport {
    std::vector<CriterionResult> criteria;
    bool passed() const;
    /// One "criterion <id> PASS|FAIL <name>: <detail>" line per criterion.
    void print(std::ostream& out) const;
};

SuiteReport verify_suite(Scale scale, const SuiteHooks& hooks = {});

} // namespace mprb::app
