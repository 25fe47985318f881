#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace algas {

inline constexpr int kLidarFullScale = 2047; // 11-bit rangefinder codes
inline constexpr int kRadarFullScale = 1023; // 10-bit rangefinder codes

/// Highest representable normalized distance; truth is clamped here so the
/// trajectory stays inside [0,1).
inline constexpr double kTruthCeiling = 65535.0 / 65536.0;

enum class SensorKind : std::uint8_t { Lidar, Radar };

inline int sensor_full_scale(SensorKind k) {
    return k == SensorKind::Lidar ? kLidarFullScale : kRadarFullScale;
}

struct DescentProfile {
    enum class Kind : std::uint8_t { Linear, Exponential, Hold };
    Kind kind = Kind::Linear;
    double param = 0.0; // rate per tick, time constant, or hold level

    static DescentProfile linear(double rate) { return {Kind::Linear, rate}; }
    static DescentProfile exponential(double tau) { return {Kind::Exponential, tau}; }
    static DescentProfile hold(double level) { return {Kind::Hold, level}; }
};

struct ScenarioSpec {
    std::uint64_t duration_ticks = 1000;
    double initial_altitude = 0.9;
    DescentProfile profile = DescentProfile::linear(8.0e-5);
    std::array<double, 4> corner_offsets{0.0, 0.0, 0.0, 0.0};
    double lidar_sigma = 0.002;
    double radar_sigma = 0.002;
    std::uint64_t seed = 1;
    /// Scale for unit-based fault windows (a window given in profile units
    /// spans ticks_per_unit ticks per unit).
    std::uint64_t ticks_per_unit = 100;
};

struct FaultSpec {
    enum class Kind : std::uint8_t { StuckAt, Offset, JamNoise, Dropout };
    int corner = 0;
    SensorKind sensor = SensorKind::Lidar;
    std::uint64_t start_tick = 0;
    std::uint64_t end_tick = 0; // half-open [start, end)
    Kind kind = Kind::Offset;
    double param = 0.0; // stuck level, offset delta, or jam sigma

    bool active(std::uint64_t tick) const { return tick >= start_tick && tick < end_tick; }
};

inline std::string_view to_string(FaultSpec::Kind k) {
    switch (k) {
        case FaultSpec::Kind::StuckAt: return "stuck_at";
        case FaultSpec::Kind::Offset: return "offset";
        case FaultSpec::Kind::JamNoise: return "jam_noise";
        case FaultSpec::Kind::Dropout: return "dropout";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Randomness: one 64-bit seed, stateless per-(stream, tick) hashing. Every
// consumer owns a sub-stream, so adding a fault never shifts the noise that
// any other stream sees, and any tick can be generated out of order.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

inline double unit_uniform(std::uint64_t stream, std::uint64_t tick, std::uint64_t salt) {
    const std::uint64_t bits = splitmix64(stream ^ splitmix64(tick * 2 + salt));
    return (double(bits >> 11) + 0.5) * 0x1.0p-53; // open interval (0,1)
}

inline double gaussian(std::uint64_t stream, std::uint64_t tick) {
    const double u1 = unit_uniform(stream, tick, 0);
    const double u2 = unit_uniform(stream, tick, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------

/// One corner's raw sensor codes for a tick.
struct CornerReadings {
    int lidar_code = 0;
    int radar_code = 0;
};

inline double clamp_truth(double v) {
    if (v < 0.0) return 0.0;
    if (v > kTruthCeiling) return kTruthCeiling;
    return v;
}

/// Noisy quantization of a true distance onto a sensor's code grid.
inline int sensor_sample(double true_distance, SensorKind kind, double sigma,
                         std::uint64_t stream, std::uint64_t tick) {
    const int full = sensor_full_scale(kind);
    const double noisy = true_distance + (sigma > 0.0 ? sigma * gaussian(stream, tick) : 0.0);
    const long code = std::lround(noisy * double(full));
    if (code < 0) return 0;
    if (code > full) return full;
    return int(code);
}

/// Apply one fault to a raw code. A rangefinder that loses its return reads
/// full scale, not zero.
inline int inject_fault(int code, const FaultSpec& fault, std::uint64_t tick,
                        std::uint64_t fault_stream) {
    const int full = sensor_full_scale(fault.sensor);
    long out = code;
    switch (fault.kind) {
        case FaultSpec::Kind::StuckAt:
            out = std::lround(fault.param * double(full));
            break;
        case FaultSpec::Kind::Offset:
            out = code + std::lround(fault.param * double(full));
            break;
        case FaultSpec::Kind::JamNoise:
            out = code + std::lround(fault.param * gaussian(fault_stream, tick) * double(full));
            break;
        case FaultSpec::Kind::Dropout:
            out = full;
            break;
    }
    if (out < 0) return 0;
    if (out > full) return full;
    return int(out);
}

/// Deterministic source of all four corners' sensor streams.
class ScenarioGenerator {
public:
    ScenarioGenerator(const ScenarioSpec& spec, std::vector<FaultSpec> faults)
        : spec_(spec), faults_(std::move(faults)) {
        for (int corner = 0; corner < 4; ++corner) {
            for (int sensor = 0; sensor < 2; ++sensor) {
                streams_[std::size_t(corner * 2 + sensor)] =
                    substream_seed(spec.seed, std::uint64_t(corner * 2 + sensor));
            }
        }
        for (std::size_t i = 0; i < faults_.size(); ++i) {
            fault_streams_.push_back(substream_seed(spec.seed, 0x100 + i));
        }
    }

    const ScenarioSpec& spec() const { return spec_; }
    const std::vector<FaultSpec>& faults() const { return faults_; }

    /// True distance under one corner at a tick (before any sensor effects).
    double truth(int corner, std::uint64_t tick) const {
        double base = 0.0;
        switch (spec_.profile.kind) {
            case DescentProfile::Kind::Linear:
                base = spec_.initial_altitude - spec_.profile.param * double(tick);
                break;
            case DescentProfile::Kind::Exponential:
                base = spec_.initial_altitude * std::exp(-double(tick) / spec_.profile.param);
                break;
            case DescentProfile::Kind::Hold:
                base = spec_.profile.param;
                break;
        }
        return clamp_truth(base + spec_.corner_offsets[std::size_t(corner)]);
    }

    int code(int corner, SensorKind sensor, std::uint64_t tick) const {
        const double sigma = sensor == SensorKind::Lidar ? spec_.lidar_sigma : spec_.radar_sigma;
        const std::uint64_t stream =
            streams_[std::size_t(corner * 2 + (sensor == SensorKind::Radar ? 1 : 0))];
        int c = sensor_sample(truth(corner, tick), sensor, sigma, stream, tick);
        for (std::size_t i = 0; i < faults_.size(); ++i) {
            const FaultSpec& f = faults_[i];
            if (f.corner == corner && f.sensor == sensor && f.active(tick)) {
                c = inject_fault(c, f, tick, fault_streams_[i]);
            }
        }
        return c;
    }

    std::array<CornerReadings, 4> readings(std::uint64_t tick) const {
        std::array<CornerReadings, 4> out{};
        for (int corner = 0; corner < 4; ++corner) {
            out[std::size_t(corner)] = CornerReadings{
                code(corner, SensorKind::Lidar, tick),
                code(corner, SensorKind::Radar, tick),
            };
        }
        return out;
    }

private:
    ScenarioSpec spec_;
    std::vector<FaultSpec> faults_;
    std::array<std::uint64_t, 8> streams_{};
    std::vector<std::uint64_t> fault_streams_;
};

} // namespace algas
