#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "algas/core.hpp"
#include "algas/errors.hpp"
#include "algas/fabric.hpp"
#include "algas/scenario.hpp"

namespace algas {

/// Everything a run needs, schema-validated with defaults applied.
struct RunConfig {
    ScenarioSpec scenario{};
    std::vector<FaultSpec> faults{};
    std::array<double, kFirTaps> fir_coefficients = default_lowpass_taps();
    FlsParams fls{};
    ApmuConfig apmu = default_apmu_config();
    FabricParams fabric{};
    std::string output_path = "trace.csv";
    /// Non-fatal advisories (for example a high-sensitivity APMU window).
    std::vector<std::string> warnings{};

    CoreParams core_params() const {
        CoreParams p;
        p.fir_coefficients = fir_coefficients;
        p.fls = fls;
        p.apmu = apmu;
        return p;
    }
};

namespace detail {

class ConfigReader {
public:
    explicit ConfigReader(const nlohmann::json& root) : root_(root) {}

    std::vector<std::string>& issues() { return issues_; }

    void fail(const std::string& path, const std::string& msg) {
        issues_.push_back(path + ": " + msg);
    }

    void check_keys(const nlohmann::json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (const auto& [key, _] : obj.items()) {
            bool known = false;
            for (const char* a : allowed) {
                if (key == a) {
                    known = true;
                    break;
                }
            }
            if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
        }
    }

    const nlohmann::json* section(const nlohmann::json& obj, const std::string& path,
                                  const char* key) {
        if (!obj.contains(key)) return nullptr;
        const auto& s = obj.at(key);
        if (!s.is_object()) {
            fail(join(path, key), "expected an object");
            return nullptr;
        }
        return &s;
    }

    double number(const nlohmann::json& obj, const std::string& path, const char* key,
                  double fallback, double lo, double hi) {
        if (!obj.contains(key)) return fallback;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(join(path, key), "expected a number");
            return fallback;
        }
        const double d = v.get<double>();
        if (d < lo || d > hi) {
            fail(join(path, key),
                 "must be in [" + trim(lo) + "," + trim(hi) + "], got " + trim(d));
            return fallback;
        }
        return d;
    }

    std::int64_t integer(const nlohmann::json& obj, const std::string& path, const char* key,
                         std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
        if (!obj.contains(key)) return fallback;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(join(path, key), "expected an integer");
            return fallback;
        }
        const std::int64_t n = v.get<std::int64_t>();
        if (n < lo || n > hi) {
            fail(join(path, key),
                 "must be in [" + std::to_string(lo) + "," + std::to_string(hi) + "], got " +
                     std::to_string(n));
            return fallback;
        }
        return n;
    }

    bool boolean(const nlohmann::json& obj, const std::string& path, const char* key,
                 bool fallback) {
        if (!obj.contains(key)) return fallback;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(join(path, key), "expected a boolean");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string text(const nlohmann::json& obj, const std::string& path, const char* key,
                     const std::string& fallback) {
        if (!obj.contains(key)) return fallback;
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            fail(join(path, key), "expected a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    template <std::size_t N>
    std::optional<std::array<double, N>> fixed_array(const nlohmann::json& obj,
                                                     const std::string& path, const char* key,
                                                     const char* what) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_array() || v.size() != N || !all_numbers(v)) {
            fail(join(path, key), "expected " + std::to_string(N) + " " + what + ", got " +
                                      describe_array(v));
            return std::nullopt;
        }
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = v[i].get<double>();
        return out;
    }

    static std::string join(const std::string& path, const char* key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    static bool all_numbers(const nlohmann::json& arr) {
        for (const auto& e : arr) {
            if (!e.is_number()) return false;
        }
        return true;
    }

    static std::string describe_array(const nlohmann::json& v) {
        if (!v.is_array()) return std::string(v.type_name());
        return std::to_string(v.size()) + " element(s)";
    }

    static std::string trim(double d) {
        std::string s = std::to_string(d);
        while (s.size() > 1 && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }

    const nlohmann::json& root_;
    std::vector<std::string> issues_;
};

inline void parse_scenario(ConfigReader& r, const nlohmann::json& s, ScenarioSpec& spec) {
    r.check_keys(s, "scenario",
                 {"duration_ticks", "initial_altitude", "descent_profile", "corner_offsets",
                  "lidar_sigma", "radar_sigma", "seed", "ticks_per_unit"});
    spec.duration_ticks = std::uint64_t(
        r.integer(s, "scenario", "duration_ticks", std::int64_t(spec.duration_ticks), 1,
                  std::int64_t{1} << 40));
    spec.initial_altitude =
        r.number(s, "scenario", "initial_altitude", spec.initial_altitude, 0.0, kTruthCeiling);
    spec.lidar_sigma = r.number(s, "scenario", "lidar_sigma", spec.lidar_sigma, 0.0, 1.0);
    spec.radar_sigma = r.number(s, "scenario", "radar_sigma", spec.radar_sigma, 0.0, 1.0);
    spec.seed = std::uint64_t(
        r.integer(s, "scenario", "seed", std::int64_t(spec.seed), 0,
                  std::numeric_limits<std::int64_t>::max()));
    spec.ticks_per_unit = std::uint64_t(
        r.integer(s, "scenario", "ticks_per_unit", std::int64_t(spec.ticks_per_unit), 1, 1 << 20));

    if (const auto* pj = r.section(s, "scenario", "descent_profile")) {
        r.check_keys(*pj, "scenario.descent_profile", {"type", "rate", "tau", "level"});
        const std::string type = r.text(*pj, "scenario.descent_profile", "type", "linear");
        if (type == "linear") {
            spec.profile = DescentProfile::linear(
                r.number(*pj, "scenario.descent_profile", "rate", 8.0e-5, 0.0, 1.0));
        } else if (type == "exponential") {
            spec.profile = DescentProfile::exponential(
                r.number(*pj, "scenario.descent_profile", "tau", 1000.0, 1e-9, 1e12));
        } else if (type == "hold") {
            spec.profile = DescentProfile::hold(
                r.number(*pj, "scenario.descent_profile", "level", 0.5, 0.0, kTruthCeiling));
        } else {
            r.fail("scenario.descent_profile.type",
                   "expected one of linear|exponential|hold, got \"" + type + "\"");
        }
    }

    if (auto offsets = r.fixed_array<4>(s, "scenario", "corner_offsets", "corner offsets")) {
        spec.corner_offsets = *offsets;
        for (double o : *offsets) {
            if (o <= -1.0 || o >= 1.0) {
                r.fail("scenario.corner_offsets", "offsets must lie in (-1,1)");
                break;
            }
        }
    }
}

inline void parse_faults(ConfigReader& r, const nlohmann::json& arr, const ScenarioSpec& scenario,
                         std::vector<FaultSpec>& faults) {
    if (!arr.is_array()) {
        r.fail("faults", "expected an array");
        return;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "faults[" + std::to_string(i) + "]";
        const auto& f = arr[i];
        if (!f.is_object()) {
            r.fail(path, "expected an object");
            continue;
        }
        r.check_keys(f, path,
                     {"corner", "sensor", "start_tick", "end_tick", "start_unit", "end_unit",
                      "kind", "level", "delta", "sigma"});
        FaultSpec spec;
        spec.corner = int(r.integer(f, path, "corner", 0, 0, 3));

        const std::string sensor = r.text(f, path, "sensor", "lidar");
        if (sensor == "lidar") {
            spec.sensor = SensorKind::Lidar;
        } else if (sensor == "radar") {
            spec.sensor = SensorKind::Radar;
        } else {
            r.fail(path + ".sensor", "expected lidar|radar, got \"" + sensor + "\"");
        }

        const bool tick_form = f.contains("start_tick") || f.contains("end_tick");
        const bool unit_form = f.contains("start_unit") || f.contains("end_unit");
        if (tick_form && unit_form) {
            r.fail(path, "give the window as ticks or as units, not both");
        } else if (unit_form) {
            const double su = r.number(f, path, "start_unit", 0.0, 0.0, 1e12);
            const double eu = r.number(f, path, "end_unit", 0.0, 0.0, 1e12);
            spec.start_tick = std::uint64_t(std::llround(su * double(scenario.ticks_per_unit)));
            spec.end_tick = std::uint64_t(std::llround(eu * double(scenario.ticks_per_unit)));
        } else {
            spec.start_tick =
                std::uint64_t(r.integer(f, path, "start_tick", 0, 0, std::int64_t{1} << 40));
            spec.end_tick =
                std::uint64_t(r.integer(f, path, "end_tick", 0, 0, std::int64_t{1} << 40));
        }
        if (spec.start_tick >= spec.end_tick) {
            r.fail(path, "window must satisfy start < end");
        }
        if (spec.end_tick > scenario.duration_ticks) {
            r.fail(path, "window must end within scenario.duration_ticks");
        }

        const std::string kind = r.text(f, path, "kind", "offset");
        if (kind == "stuck_at") {
            spec.kind = FaultSpec::Kind::StuckAt;
            spec.param = r.number(f, path, "level", 0.0, 0.0, 1.0);
        } else if (kind == "offset") {
            spec.kind = FaultSpec::Kind::Offset;
            spec.param = r.number(f, path, "delta", 0.0, -1.0, 1.0);
        } else if (kind == "jam_noise") {
            spec.kind = FaultSpec::Kind::JamNoise;
            spec.param = r.number(f, path, "sigma", 0.0, 0.0, 1.0);
        } else if (kind == "dropout") {
            spec.kind = FaultSpec::Kind::Dropout;
        } else {
            r.fail(path + ".kind",
                   "expected one of stuck_at|offset|jam_noise|dropout, got \"" + kind + "\"");
        }
        faults.push_back(spec);
    }
}

inline void parse_apmu(ConfigReader& r, const nlohmann::json& a, RunConfig& cfg) {
    r.check_keys(a, "apmu", {"eww", "mode", "per_sample_tolerance", "threshold_lut"});
    const int eww = int(r.integer(a, "apmu", "eww", kApmuSlots, 1, kApmuSlots));

    ApmuMode mode = ApmuMode::SumWeight;
    const std::string mode_text = r.text(a, "apmu", "mode", "sum");
    if (mode_text == "count") {
        mode = ApmuMode::EventCount;
    } else if (mode_text != "sum") {
        r.fail("apmu.mode", "expected sum|count, got \"" + mode_text + "\"");
    }

    const double tol =
        r.number(a, "apmu", "per_sample_tolerance", kDefaultPerSampleTolerance, 0.0, 1.0);
    const std::int64_t tol_raw = quantize(tol, kCanonical).raw;

    auto lut = default_threshold_lut(mode, tol_raw);
    if (a.contains("threshold_lut")) {
        if (auto values = r.fixed_array<std::size_t(kApmuSlots)>(a, "apmu", "threshold_lut",
                                                                 "threshold entries")) {
            for (std::size_t i = 0; i < std::size_t(kApmuSlots); ++i) {
                const double v = (*values)[i];
                if (v < 0.0) {
                    r.fail("apmu.threshold_lut", "entries must be non-negative");
                    break;
                }
                lut[i] = mode == ApmuMode::SumWeight ? quantize(v, kWideSum).raw
                                                     : std::int64_t(std::llround(v));
            }
        }
    }

    if (r.issues().empty()) {
        cfg.apmu = apmu_configure(eww, lut, mode, tol_raw);
        if (cfg.apmu.high_sensitivity()) {
            cfg.warnings.push_back(
                "apmu.eww: windows below " + std::to_string(kApmuMinDecisionDepth) +
                " samples are high-sensitivity and raise the false-alarm rate");
        }
    }
}

} // namespace detail

/// Validate a parsed JSON document and build the run configuration.
/// Violations are collected across the whole document and thrown together.
inline RunConfig parse_config_json(const nlohmann::json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");

    RunConfig cfg;
    detail::ConfigReader r(root);
    r.check_keys(root, "",
                 {"scenario", "faults", "fir", "fls", "apmu", "link", "fabric", "output"});

    if (const auto* s = r.section(root, "", "scenario")) detail::parse_scenario(r, *s, cfg.scenario);

    if (const auto* fir = r.section(root, "", "fir")) {
        r.check_keys(*fir, "fir", {"coefficients"});
        if (auto taps = r.fixed_array<kFirTaps>(*fir, "fir", "coefficients", "taps")) {
            cfg.fir_coefficients = *taps;
            for (double c : *taps) {
                if (c <= -1.0 || c >= 1.0) {
                    r.fail("fir.coefficients", "taps must lie in (-1,1)");
                    break;
                }
            }
        }
    }

    if (const auto* fls = r.section(root, "", "fls")) {
        r.check_keys(*fls, "fls", {"input_peaks", "output_centers"});
        if (auto peaks = r.fixed_array<kInputTerms>(*fls, "fls", "input_peaks", "peaks")) {
            cfg.fls.input_peaks = *peaks;
            for (std::size_t i = 0; i < peaks->size(); ++i) {
                if ((*peaks)[i] < 0.0 || (*peaks)[i] > 1.0 ||
                    (i > 0 && (*peaks)[i] <= (*peaks)[i - 1])) {
                    r.fail("fls.input_peaks", "peaks must be strictly ascending within [0,1]");
                    break;
                }
            }
        }
        if (auto centers = r.fixed_array<kOutputTerms>(*fls, "fls", "output_centers", "centers")) {
            cfg.fls.output_centers = *centers;
            for (std::size_t i = 0; i < centers->size(); ++i) {
                if ((*centers)[i] < 0.0 || (*centers)[i] >= 1.0 ||
                    (i > 0 && (*centers)[i] <= (*centers)[i - 1])) {
                    r.fail("fls.output_centers", "centers must be strictly ascending within [0,1)");
                    break;
                }
            }
        }
    }

    if (const auto* a = r.section(root, "", "apmu")) detail::parse_apmu(r, *a, cfg);

    if (const auto* link = r.section(root, "", "link")) {
        r.check_keys(*link, "link", {"latency_ticks", "queue_capacity"});
        cfg.fabric.link_latency_ticks = int(r.integer(*link, "link", "latency_ticks", 1, 1, 1024));
        cfg.fabric.link_queue_capacity =
            std::size_t(r.integer(*link, "link", "queue_capacity", 4, 1, 65536));
    }

    if (const auto* fab = r.section(root, "", "fabric")) {
        r.check_keys(*fab, "fabric", {"tolerance", "aggregation", "handover_k", "pilot_permit"});
        cfg.fabric.tolerance =
            quantize(r.number(*fab, "fabric", "tolerance", 0.05, 0.0, kTruthCeiling), kCanonical);
        const std::string agg = r.text(*fab, "fabric", "aggregation", "mean");
        if (agg == "mean") {
            cfg.fabric.aggregation = Aggregation::Mean;
        } else if (agg == "min") {
            cfg.fabric.aggregation = Aggregation::Min;
        } else if (agg == "max") {
            cfg.fabric.aggregation = Aggregation::Max;
        } else {
            r.fail("fabric.aggregation", "expected mean|min|max, got \"" + agg + "\"");
        }
        cfg.fabric.handover_k = int(r.integer(*fab, "fabric", "handover_k", 8, 1, 1 << 20));
        cfg.fabric.pilot_permit = r.boolean(*fab, "fabric", "pilot_permit", false);
    }

    if (const auto* out = r.section(root, "", "output")) {
        r.check_keys(*out, "output", {"path"});
        cfg.output_path = r.text(*out, "output", "path", cfg.output_path);
    }

    // Faults last: window checks need the final scenario timing.
    if (root.contains("faults")) detail::parse_faults(r, root.at("faults"), cfg.scenario, cfg.faults);

    if (!r.issues().empty()) throw ConfigError(r.issues());
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: malformed JSON: " + std::string(e.what()));
    }
    return parse_config_json(root);
}

} // namespace algas
