#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "algas/config.hpp"

using namespace algas;
using nlohmann::json;

namespace {

std::string issues_text(const ConfigError& e) {
    std::string all;
    for (const auto& i : e.issues()) all += i + "\n";
    return all;
}

} // namespace

TEST_CASE("an empty document yields the full default configuration") {
    const RunConfig cfg = parse_config_json(json::object());
    CHECK(cfg.scenario.duration_ticks == 1000);
    CHECK(cfg.apmu.eww == 16);
    CHECK(cfg.apmu.mode == ApmuMode::SumWeight);
    CHECK(cfg.fabric.link_latency_ticks == 1);
    CHECK(cfg.fabric.handover_k == 8);
    CHECK_FALSE(cfg.fabric.pilot_permit);
    CHECK(cfg.fir_coefficients == default_lowpass_taps());
    CHECK(cfg.warnings.empty());
    // default threshold scales linearly with the window
    CHECK(cfg.apmu.threshold_lut[15] == 16 * cfg.apmu.per_sample_tolerance_raw);
}

TEST_CASE("out-of-range window size names the field and the legal range") {
    const json doc = {{"apmu", {{"eww", 17}}}};
    try {
        parse_config_json(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string text = issues_text(e);
        CHECK(text.find("apmu.eww") != std::string::npos);
        CHECK(text.find("[1,16]") != std::string::npos);
    }
}

TEST_CASE("wrong tap count is rejected with the expected arity") {
    json doc;
    doc["fir"]["coefficients"] = std::vector<double>(14, 0.05);
    try {
        parse_config_json(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string text = issues_text(e);
        CHECK(text.find("fir.coefficients") != std::string::npos);
        CHECK(text.find("expected 15 taps") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected at every level") {
    json doc;
    doc["scnario"] = json::object(); // typo at the top level
    doc["apmu"]["ewww"] = 8;         // typo inside a section
    try {
        parse_config_json(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string text = issues_text(e);
        CHECK(text.find("scnario") != std::string::npos);
        CHECK(text.find("apmu.ewww") != std::string::npos);
    }
}

TEST_CASE("all violations are reported together") {
    json doc;
    doc["apmu"]["eww"] = 0;
    doc["fls"]["output_centers"] = std::vector<double>{0.9, 0.5, 0.2, 0.1};
    doc["link"]["latency_ticks"] = 0;
    doc["fabric"]["aggregation"] = "median";
    try {
        parse_config_json(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() >= 4);
        const std::string text = issues_text(e);
        CHECK(text.find("apmu.eww") != std::string::npos);
        CHECK(text.find("fls.output_centers") != std::string::npos);
        CHECK(text.find("link.latency_ticks") != std::string::npos);
        CHECK(text.find("fabric.aggregation") != std::string::npos);
    }
}

TEST_CASE("fault windows are validated against the scenario") {
    json doc;
    doc["scenario"]["duration_ticks"] = 500;
    doc["faults"] = json::array();
    doc["faults"].push_back({{"corner", 1},
                             {"sensor", "radar"},
                             {"start_tick", 400},
                             {"end_tick", 600},
                             {"kind", "offset"},
                             {"delta", 0.1}});
    CHECK_THROWS_AS(parse_config_json(doc), ConfigError);

    doc["faults"][0]["end_tick"] = 300; // start >= end
    CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
}

TEST_CASE("unit-based fault windows scale by ticks_per_unit") {
    json doc;
    doc["scenario"]["duration_ticks"] = 1000;
    doc["scenario"]["ticks_per_unit"] = 100;
    doc["faults"] = json::array();
    doc["faults"].push_back({{"corner", 0},
                             {"sensor", "radar"},
                             {"start_unit", 3},
                             {"end_unit", 4},
                             {"kind", "offset"},
                             {"delta", 0.05}});
    const RunConfig cfg = parse_config_json(doc);
    REQUIRE(cfg.faults.size() == 1);
    CHECK(cfg.faults[0].start_tick == 300);
    CHECK(cfg.faults[0].end_tick == 400);

    doc["faults"][0]["start_tick"] = 300; // mixing both window forms
    CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
}

TEST_CASE("count mode takes integer thresholds") {
    json doc;
    doc["apmu"]["mode"] = "count";
    doc["apmu"]["per_sample_tolerance"] = 0.01;
    const RunConfig cfg = parse_config_json(doc);
    CHECK(cfg.apmu.mode == ApmuMode::EventCount);
    CHECK(cfg.apmu.threshold_lut[15] == 8); // half the window by default
    CHECK(cfg.apmu.per_sample_tolerance_raw == quantize(0.01, kCanonical).raw);

    doc["apmu"]["threshold_lut"] =
        std::vector<double>{1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5, 6};
    const RunConfig with_lut = parse_config_json(doc);
    CHECK(with_lut.apmu.threshold_lut[0] == 1);
    CHECK(with_lut.apmu.threshold_lut[15] == 6);
}

TEST_CASE("a narrow window comes back with an advisory") {
    json doc;
    doc["apmu"]["eww"] = 2;
    const RunConfig cfg = parse_config_json(doc);
    REQUIRE_FALSE(cfg.warnings.empty());
    CHECK(cfg.warnings[0].find("high-sensitivity") != std::string::npos);
}

TEST_CASE("profile selection") {
    json doc;
    doc["scenario"]["descent_profile"] = {{"type", "exponential"}, {"tau", 250.0}};
    RunConfig cfg = parse_config_json(doc);
    CHECK(cfg.scenario.profile.kind == DescentProfile::Kind::Exponential);
    CHECK(cfg.scenario.profile.param == 250.0);

    doc["scenario"]["descent_profile"] = {{"type", "parabolic"}};
    CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
}

TEST_CASE("file-level failures") {
    CHECK_THROWS_AS(parse_config("/nonexistent/path.json"), ConfigError);

    const std::string bad = std::string(ALGAS_SOURCE_DIR) + "/README.md";
    CHECK_THROWS_AS(parse_config(bad), ConfigError); // not JSON
}

TEST_CASE("shipped example configs load") {
    const RunConfig clean =
        parse_config(std::string(ALGAS_SOURCE_DIR) + "/configs/clean_descent.json");
    CHECK(clean.faults.empty());

    const RunConfig faulty =
        parse_config(std::string(ALGAS_SOURCE_DIR) + "/configs/offset_fault.json");
    REQUIRE(faulty.faults.size() == 1);
    CHECK(faulty.faults[0].start_tick == 300);
    CHECK(faulty.faults[0].end_tick == 400);
}
