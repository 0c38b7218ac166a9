#pragma once

#include "mprb/app/config.hpp"
#include "mprb/picard.hpp"
#include "mprb/rbsde.hpp"
#include "mprb/stopping.hpp"
#include "mprb/wnorm.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mprb::app {

struct Verdict {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct NormRow {
    std::string process;
    std::string kind;
    double beta = 0.0;
    double gamma = 0.0;
    double value = 0.0;  ///< squared norm
};

struct EpsilonRow {
    double epsilon = 0.0;
    double reward = 0.0;
    double k_before_stop = 0.0;
    std::vector<NodeId> stop_set;
};

struct RunArtifact {
    RunArtifact(RunConfig config_, ScenarioTree tree_) : config(std::move(config_)), tree(std::move(tree_)) {}

    RunConfig config;
    ScenarioTree tree;
    GivenGenerators data;  ///< generators the reported solution solves (frozen in picard mode)
    RbsdeSolution solution;
    SkorohodReport skorohod;
    EquationResidual residual;
    double route_gap = 0.0;  ///< max |Y - Y_snell|
    MajorantReport majorant;
    std::optional<ContractionConfig> contraction;
    std::optional<PicardTrace> trace;
    std::vector<EpsilonRow> epsilon_rules;
    std::vector<NodeId> tau_star;
    double tau_star_reward = 0.0;
    std::optional<StoppingCertificate> certificate;
    std::string oracle_note;
    std::vector<NormRow> norms;
    std::vector<Verdict> verdicts;

    bool passed() const;
};

/// Build the tree, solve per mode and run every applicable check.
/// Throws ConfigInvalid for invalid configurations.
RunArtifact run(const RunConfig& config);

/// Writes summary.json, solution.csv, norms.csv and, when present, picard_trace.csv.
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir);

/// Squared norms of (Y, U, Z) and the path-wise Cauchy bound on f.
std::vector<NormRow> norm_table(const ScenarioTree& tree, const RbsdeSolution& sol, double beta, double gamma);

struct SimulationReport {
    std::size_t paths = 0;
    double mean_count = 0.0;
    double mean_compensator = 0.0;
    double mean_martingale = 0.0;  ///< N_T - discrete compensator
    double standard_error = 0.0;
    bool passed = true;
};

/// Simulates `config.simulation.paths` paths from `config.seed`, writes paths.csv
/// and checks that N_T minus its compensator has mean zero within 4 standard errors.
SimulationReport simulate(const RunConfig& config, const std::optional<std::filesystem::path>& dir);

} // namespace mprb::app
