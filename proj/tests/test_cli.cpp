#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {
namespace fs = std::filesystem;

int cli(const std::string& args) {
    const std::string cmd = std::string(RBSDE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / ("mprb_cli_" + name + ".json");
    std::ofstream(p) << text;
    return p;
}

std::string out_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mprb_cli_out_" + name);
    fs::remove_all(p);
    return p.string();
}

const std::string configs = CONFIG_DIR;
} // namespace

TEST_CASE("verbs on the sample configurations") {
    const auto out = out_dir("solve");
    CHECK(cli("solve --config " + configs + "/e2.json --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "summary.json"));
    CHECK(fs::exists(fs::path(out) / "solution.csv"));
    CHECK(cli("picard --config " + configs + "/picard.json --out " + out_dir("picard")) == 0);
    CHECK(cli("solve --config " + configs + "/mpp_only.json --out " + out_dir("mpp")) == 0);
    const auto oracle = out_dir("oracle");
    CHECK(cli("oracle --config " + configs + "/e2.json --out " + oracle) == 0);
    CHECK(fs::exists(fs::path(oracle) / "certificate.json"));
    const auto sim = out_dir("sim");
    CHECK(cli("simulate --config " + configs + "/mpp_only.json --seed 11 --out " + sim) == 0);
    CHECK(fs::exists(fs::path(sim) / "paths.csv"));
    CHECK(cli("norms --config " + configs + "/picard.json --out " + out_dir("norms")) == 0);
    CHECK(cli("verify --scale small") == 0);
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(cli("") == 2);
    CHECK(cli("launch") == 2);
    CHECK(cli("solve") == 2);
    CHECK(cli("solve --config /nonexistent.json") == 2);
    CHECK(cli("verify --scale huge") == 2);
    CHECK(cli("solve --config " + configs + "/e2.json --seed minus") == 2);
    const auto beta = write_config("beta", R"({"mode": "picard", "generator": {"f": {"a": 0.5}, "beta": 0.5}})");
    CHECK(cli("solve --config " + beta.string() + " --out " + out_dir("beta")) == 2);
    const auto mpp = write_config("mpp", R"({"mode": "mpp-only", "brownian": true})");
    CHECK(cli("solve --config " + mpp.string() + " --out " + out_dir("mpp_bad")) == 2);
    CHECK(cli("picard --config " + configs + "/mpp_only.json --out " + out_dir("picard_mpp")) == 0);
    const auto big = write_config("big", R"({"grid": {"steps": 4}})");
    CHECK(cli("oracle --config " + big.string() + " --out " + out_dir("big")) == 2);
}

TEST_CASE("failed checks exit with 1") {
    const auto starved = write_config("starved", R"({"mode": "picard", "grid": {"steps": 2},
        "generator": {"f": {"a": 0.4}, "terminal": {"w": 1}, "beta": 1.0}, "picard": {"max_iter": 1, "tol": 0}})");
    CHECK(cli("picard --config " + starved.string() + " --out " + out_dir("starved")) == 1);
}
