#include "mprb/app/config.hpp"
#include "mprb/app/run.hpp"
#include "mprb/app/verify.hpp"
#include "mprb/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace mprb;
using namespace mprb::app;

constexpr int exit_pass = 0;
constexpr int exit_check_failure = 1;
constexpr int exit_config_error = 2;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    Scale scale = Scale::small;
};

RunConfig load(const Options& opt) {
    if (opt.config.empty())
        throw ConfigInvalid("--config", "a configuration file is required");
    RunConfig cfg = RunConfig::load(opt.config);
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.out)
        cfg.output = *opt.out;
    return cfg;
}

void print_verdicts(const RunArtifact& art) {
    for (const auto& v : art.verdicts)
        std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
    std::cout << "Y_0 = " << art.solution.Y[0] << '\n';
}

int solve(RunConfig cfg, std::optional<Mode> mode) {
    if (mode) {
        cfg.mode = *mode;
        cfg.validate();
    }
    const RunArtifact art = run(cfg);
    write_artifact(art, cfg.output);
    print_verdicts(art);
    return art.passed() ? exit_pass : exit_check_failure;
}

int oracle(RunConfig cfg) {
    cfg.stopping.oracle = true;
    const RunArtifact art = run(cfg);
    if (!art.certificate)
        throw ConfigInvalid("grid", art.oracle_note);
    write_artifact(art, cfg.output);
    const auto& cert = *art.certificate;
    const nlohmann::json j{{"value", cert.value},
                           {"rule", cert.best_rule.first_entries(art.tree)},
                           {"enumerated", cert.enumerated},
                           {"epsilon", cert.epsilon},
                           {"Y0", art.solution.Y[0]}};
    std::ofstream(std::filesystem::path(cfg.output) / "certificate.json") << j.dump(2) << '\n';
    std::cout << "oracle value " << cert.value << " over " << cert.enumerated << " rules, Y_0 "
              << art.solution.Y[0] << '\n';
    bool ok = true;
    for (const auto& v : art.verdicts)
        if (v.name.rfind("oracle", 0) == 0 || v.name.rfind("tau_star", 0) == 0) {
            std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
            ok = ok && v.passed;
        }
    return ok ? exit_pass : exit_check_failure;
}

int simulate_cmd(const RunConfig& cfg) {
    const auto rep = simulate(cfg, std::filesystem::path(cfg.output));
    std::cout << (rep.passed ? "PASS" : "FAIL") << " compensated count mean " << rep.mean_martingale << " (se "
              << rep.standard_error << ") over " << rep.paths << " paths; mean N_T " << rep.mean_count << '\n';
    return rep.passed ? exit_pass : exit_check_failure;
}

int norms(const RunConfig& cfg) {
    const RunArtifact art = run(cfg);
    write_artifact(art, cfg.output);
    for (const auto& r : art.norms)
        std::cout << "|" << r.process << "|^2 " << r.kind << " (beta " << r.beta << ", gamma " << r.gamma
                  << ") = " << r.value << '\n';
    for (const auto& v : art.verdicts)
        if (v.name == "cauchy_weight_bound") {
            std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
            return v.passed ? exit_pass : exit_check_failure;
        }
    return exit_pass;
}

int verify(const Options& opt) {
    const SuiteReport report = verify_suite(opt.scale);
    report.print(std::cout);
    if (opt.out) {
        std::filesystem::create_directories(*opt.out);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : report.criteria)
            arr.push_back({{"criterion", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail},
                           {"seconds", c.seconds}});
        std::ofstream(std::filesystem::path(*opt.out) / "verify.json") << arr.dump(2) << '\n';
    }
    return report.passed() ? exit_pass : exit_check_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reflected BSDE solver on marked point process scenario trees"};
    app.require_subcommand(1);
    Options opt;

    const std::map<std::string, Scale> scales{{"small", Scale::small}, {"full", Scale::full}};
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* config = sub->add_option("--config", opt.config, "JSON run configuration");
        if (needs_config)
            config->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "Seed override");
        sub->add_option("--out", opt.out, "Output directory override");
        sub->add_option("--scale", opt.scale, "Suite scale")->transform(CLI::CheckedTransformer(scales));
    };
    auto* solve_cmd = app.add_subcommand("solve", "Solve the configured problem and run all checks");
    auto* picard_cmd = app.add_subcommand("picard", "Solve by Picard iteration");
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force stopping value and certificate");
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate marked point process paths");
    auto* norms_cmd = app.add_subcommand("norms", "Weighted norms of the solution");
    auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
    for (auto* sub : {solve_cmd, picard_cmd, oracle_cmd, sim_cmd, norms_cmd})
        add_common(sub, true);
    add_common(verify_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config_error;
    }

    try {
        if (*verify_cmd)
            return verify(opt);
        const RunConfig cfg = load(opt);
        if (*solve_cmd)
            return solve(cfg, std::nullopt);
        if (*picard_cmd)
            return solve(cfg, Mode::picard);
        if (*oracle_cmd)
            return oracle(cfg);
        if (*sim_cmd)
            return simulate_cmd(cfg);
        return norms(cfg);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const BudgetExceeded& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const BetaTooSmall& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_check_failure;
    }
}
