#include "doctest.h"

#include "mprb/app/config.hpp"
#include "mprb/errors.hpp"

#include <string>

using namespace mprb;
using namespace mprb::app;

namespace {
std::string invalid_field(const std::string& text) {
    try {
        RunConfig::parse(text);
    } catch (const ConfigInvalid& e) {
        return e.field;
    }
    return "<accepted>";
}

const char* const picard_text = R"({
  "grid": {"steps": 2, "horizon": 1.0},
  "marks": ["a", "b"],
  "compensator": {"breakpoints": [0, 0.5], "rates": [0.5, 1.0], "phis": [[0.5, 0.5], [0.2, 0.8]], "count_slope": 0.1},
  "generator": {
    "f": {"a": 0.2, "b": 0.5, "c": [1.0, -0.4], "clip": [-3, 3]},
    "g": {"a": 0.1, "b": 0.3, "d1": 1.0},
    "terminal": {"c0": 1, "wn": 0.5},
    "barrier": {"breakpoints": [0, 1], "values": [0.2, -1], "w": 0.1},
    "beta": 1.0
  },
  "mode": "picard",
  "seed": 18446744073709551615
})";
} // namespace

TEST_CASE("defaults and parsing") {
    const auto def = RunConfig::parse("{}");
    CHECK(def == RunConfig{});
    const auto cfg = RunConfig::parse(picard_text);
    CHECK(cfg.mode == Mode::picard);
    CHECK(cfg.marks == std::vector<std::string>{"a", "b"});
    CHECK(cfg.generator.f.clipped);
    CHECK(cfg.generator.f.clip_hi == 3.0);
    REQUIRE(cfg.generator.g);
    CHECK(cfg.generator.g->d1 == 1.0);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(RunConfig::parse(R"({"marks": 3, "compensator": {"phis": [[0.2, 0.3, 0.5]]}})").marks ==
          std::vector<std::string>{"e1", "e2", "e3"});
}

TEST_CASE("dump round trip") {
    for (const char* text : {"{}", picard_text}) {
        const auto cfg = RunConfig::parse(text);
        CHECK(RunConfig::parse(cfg.dump()) == cfg);
        CHECK(RunConfig::parse(cfg.dump()).dump() == cfg.dump());
    }
}

TEST_CASE("rejections name the field") {
    CHECK(invalid_field("[1, 2]") == "<root>");
    CHECK(invalid_field("{") == "<root>");
    CHECK(invalid_field(R"({"gird": {}})") == "gird");
    CHECK(invalid_field(R"({"grid": {"steps": 0}})") == "grid.steps");
    CHECK(invalid_field(R"({"grid": {"steps": "two"}})") == "grid.steps");
    CHECK(invalid_field(R"({"grid": {"horizon": -1}})") == "grid.horizon");
    CHECK(invalid_field(R"({"marks": ["a", "a"]})") == "marks");
    CHECK(invalid_field(R"({"compensator": {"rates": [-1]}})") == "compensator.rates");
    CHECK(invalid_field(R"({"compensator": {"phis": [[0.5]]}})") == "compensator.phis");
    CHECK(invalid_field(R"({"compensator": {"breakpoints": [0, 2], "rates": [1, 1], "phis": [[1], [1]]}})") ==
          "compensator.breakpoints");
    CHECK(invalid_field(R"({"generator": {"f": {"c": [1, 2]}}})") == "generator.f.c");
    CHECK(invalid_field(R"({"generator": {"g": {"c": [1]}}})") == "generator.g.c");
    CHECK(invalid_field(R"({"generator": {"f": {"clip": [1, -1]}}})") == "generator.f.clip");
    CHECK(invalid_field(R"({"generator": {"f": {"zeta": 1}}})") == "generator.f.zeta");
    CHECK(invalid_field(R"({"generator": {"barrier": {"values": [1, 2]}}})") == "generator.barrier.values");
    CHECK(invalid_field(R"({"mode": "fast"})") == "mode");
    CHECK(invalid_field(R"({"grid": {"steps": 30}})") == "grid.steps");
    CHECK(invalid_field(R"({"stopping": {"epsilons": [-0.1]}})") == "stopping.epsilons");
}

TEST_CASE("mode consistency") {
    CHECK(invalid_field(R"({"generator": {"f": {"a": 0.1}}})") == "generator.f");
    CHECK(invalid_field(R"({"generator": {"g": {"b": 0.1}}})") == "generator.g");
    CHECK(invalid_field(R"({"mode": "mpp-only"})") == "brownian");
    CHECK(invalid_field(R"({"mode": "mpp-only", "brownian": false, "generator": {"g": {"d0": 1}}})") ==
          "generator.g");
    CHECK(invalid_field(R"({"mode": "mpp-only", "brownian": false})") == "<accepted>");

    try {
        RunConfig::parse(R"({"mode": "picard", "generator": {"f": {"a": 0.5, "b": 1, "c": [1]}, "beta": 1.5}})");
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(e.field == "generator.beta");
        CHECK(std::string(e.what()).find("= 2") != std::string::npos);
    }
    CHECK(invalid_field(R"({"mode": "picard", "generator": {"f": {"a": 0.5, "b": 1, "c": [1]}, "beta": 2.01}})") ==
          "<accepted>");
}
