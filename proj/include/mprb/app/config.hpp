#pragma once

#include "mprb/families.hpp"
#include "mprb/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mprb::app {

enum class Mode { given, picard, mpp_only };

std::string to_string(Mode mode);

struct GridConfig {
    std::size_t steps = 2;
    double horizon = 1.0;
    bool operator==(const GridConfig&) const = default;
};

struct CompensatorConfig {
    std::vector<double> breakpoints{0.0};
    std::vector<double> rates{1.0};
    std::vector<std::vector<double>> phis{{1.0}};
    double count_slope = 0.0;
    bool operator==(const CompensatorConfig&) const = default;
};

struct GeneratorConfig {
    AffineGenerator f;
    std::optional<AffineGenerator> g;  ///< absent: g ≡ 0
    TerminalPayoff terminal;
    BarrierSpec barrier;
    double beta = 1.0;
    double delta = 0.1;
    bool operator==(const GeneratorConfig&) const = default;
};

struct PicardConfig {
    std::size_t max_iter = 40;
    double tol = 1e-9;
    bool operator==(const PicardConfig&) const = default;
};

struct StoppingConfig {
    std::vector<double> epsilons{0.1, 0.01, 0.001};
    bool oracle = true;
    bool operator==(const StoppingConfig&) const = default;
};

struct SimulationConfig {
    std::size_t paths = 1000;
    bool operator==(const SimulationConfig&) const = default;
};

/// Everything a run needs. Parsed from and serialized to JSON.
struct RunConfig {
    GridConfig grid;
    std::vector<std::string> marks{"e1"};
    CompensatorConfig compensator;
    bool brownian = true;
    GeneratorConfig generator;
    Mode mode = Mode::given;
    PicardConfig picard;
    StoppingConfig stopping;
    SimulationConfig simulation;
    std::uint64_t seed = 0;
    std::string output = "out";
    std::size_t node_budget = 2'000'000;

    bool operator==(const RunConfig&) const = default;

    /// Throws ConfigInvalid naming the dotted field path.
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
    std::string dump() const;

    /// Checks every precondition the solve relies on. Throws ConfigInvalid.
    void validate() const;

    TimeGrid time_grid() const;
    MarkSet mark_set() const;
    CompensatorSpec compensator_spec() const;
    ScenarioTree build_tree() const;
    GeneratorSpec generator_spec(const ScenarioTree& tree) const;
};

} // namespace mprb::app
