#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <string_view>

#include "algas/errors.hpp"
#include "algas/fixed.hpp"

// Malfunction detector over the |s1 - s2| discrepancy stream. The verdict
// path is add, subtract and compare only: thresholds arrive precomputed in
// the LUT, so nothing in this unit ever divides.

namespace algas {

inline constexpr int kApmuSlots = 16;
inline constexpr int kApmuMinDecisionDepth = 4;

enum class ApmuMode : std::uint8_t { SumWeight, EventCount };
enum class ApmuWindowStatus : std::uint8_t { Warmup, Active };

inline std::string_view to_string(ApmuMode m) {
    return m == ApmuMode::SumWeight ? "sum" : "count";
}

struct ApmuConfig {
    int eww = kApmuSlots;
    ApmuMode mode = ApmuMode::SumWeight;
    /// Per-sample |dS| gate used by EventCount mode (canonical units).
    std::int64_t per_sample_tolerance_raw = 0;
    /// threshold_lut[k-1] is the verdict threshold at eww == k. SumWeight
    /// entries are wide-sum raw codes; EventCount entries are plain counts.
    std::array<std::int64_t, kApmuSlots> threshold_lut{};

    /// Windows shorter than the minimum decision depth are legal but react
    /// to single-sample noise; callers surface this as an advisory.
    bool high_sensitivity() const { return eww < kApmuMinDecisionDepth; }
};

/// Linear-in-window default: at eww == k the sum threshold is k times the
/// per-sample tolerance, so alarm semantics do not change with window size.
/// EventCount defaults to flagging when more than half the window diverges.
inline std::array<std::int64_t, kApmuSlots> default_threshold_lut(
    ApmuMode mode, std::int64_t per_sample_tolerance_raw) {
    std::array<std::int64_t, kApmuSlots> lut{};
    for (int k = 1; k <= kApmuSlots; ++k) {
        lut[std::size_t(k - 1)] =
            mode == ApmuMode::SumWeight ? k * per_sample_tolerance_raw : std::int64_t(k >> 1);
    }
    return lut;
}

inline constexpr double kDefaultPerSampleTolerance = 0.02; // normalized units

/// The frame-size activator drives the window with a 16-bit slot mask. The
/// only masks with window semantics activate the newest k slots, i.e. the
/// low-k-bits patterns; anything else is rejected.
inline int eww_from_fsau_mask(std::uint32_t mask) {
    if (mask == 0 || mask > 0xffffu || (mask & (mask + 1)) != 0) {
        throw ConfigError("apmu.fsau_mask: must activate a contiguous newest-k slot window");
    }
    return std::popcount(mask);
}

inline std::uint32_t fsau_mask_for(int eww) {
    if (eww < 1 || eww > kApmuSlots) {
        throw ConfigError("apmu.eww: must be in [1,16], got " + std::to_string(eww));
    }
    return (std::uint32_t{1} << eww) - 1;
}

inline ApmuConfig apmu_configure(int eww, const std::array<std::int64_t, kApmuSlots>& threshold_lut,
                                 ApmuMode mode, std::int64_t per_sample_tolerance_raw) {
    if (eww < 1 || eww > kApmuSlots) {
        throw ConfigError("apmu.eww: must be in [1,16], got " + std::to_string(eww));
    }
    if (per_sample_tolerance_raw < 0 || per_sample_tolerance_raw > kCanonical.max_raw()) {
        throw ConfigError("apmu.per_sample_tolerance: out of canonical range");
    }
    ApmuConfig cfg;
    cfg.eww = eww;
    cfg.mode = mode;
    cfg.per_sample_tolerance_raw = per_sample_tolerance_raw;
    cfg.threshold_lut = threshold_lut;
    return cfg;
}

inline ApmuConfig default_apmu_config() {
    const std::int64_t tol = quantize(kDefaultPerSampleTolerance, kCanonical).raw;
    return apmu_configure(kApmuSlots, default_threshold_lut(ApmuMode::SumWeight, tol),
                          ApmuMode::SumWeight, tol);
}

struct ApmuVerdict {
    std::int64_t effective_weight_raw = 0;
    std::int64_t threshold_raw = 0;
    bool alarm = false;
    ApmuWindowStatus status = ApmuWindowStatus::Warmup;
    ApmuMode mode = ApmuMode::SumWeight;

    /// Weight in real units: a normalized sum for SumWeight, a count for
    /// EventCount.
    double weight_value() const {
        return mode == ApmuMode::SumWeight
                   ? std::ldexp(double(effective_weight_raw), -int(kWideSum.frac_bits))
                   : double(effective_weight_raw);
    }
};

/// Sliding-window discrepancy detector. Sixteen physical slots always
/// exist; only the newest `eww` take part in the verdict. The window can be
/// re-sized mid-flight without losing history.
class Apmu {
public:
    explicit Apmu(const ApmuConfig& config) : config_(config) {}

    ApmuVerdict step(const FixedSample& s1, const FixedSample& s2) {
        ring_[write_index_] = abs_diff(s1, s2).raw;
        ++write_index_;
        if (write_index_ == kApmuSlots) write_index_ = 0;
        ++samples_seen_;
        return verdict();
    }

    /// Verdict over the current window. During warm-up the weight covers
    /// the partial window (diagnostics only) and the alarm stays down.
    ApmuVerdict verdict() const {
        ApmuVerdict v;
        v.mode = config_.mode;
        v.threshold_raw = config_.threshold_lut[std::size_t(config_.eww - 1)];
        v.status = samples_seen_ >= std::uint64_t(config_.eww) ? ApmuWindowStatus::Active
                                                               : ApmuWindowStatus::Warmup;
        v.effective_weight_raw = effective_weight();
        v.alarm = v.status == ApmuWindowStatus::Active && v.effective_weight_raw > v.threshold_raw;
        return v;
    }

    /// Windowed statistic over the newest min(eww, samples_seen) entries.
    std::int64_t effective_weight() const {
        const int n = int(std::min<std::uint64_t>(samples_seen_, std::uint64_t(config_.eww)));
        std::int64_t acc = 0;
        std::size_t idx = write_index_;
        for (int i = 0; i < n; ++i) {
            idx = idx == 0 ? std::size_t(kApmuSlots - 1) : idx - 1;
            if (config_.mode == ApmuMode::SumWeight) {
                acc += ring_[idx];
            } else if (ring_[idx] > config_.per_sample_tolerance_raw) {
                ++acc;
            }
        }
        return saturate_raw(acc, kWideSum);
    }

    /// Change the decision depth in place. History is preserved; the next
    /// verdict windows over the newest `new_eww` entries, reverting to
    /// Warmup if fewer samples than that have been seen.
    void resize(int new_eww) {
        if (new_eww < 1 || new_eww > kApmuSlots) {
            throw ConfigError("apmu.eww: must be in [1,16], got " + std::to_string(new_eww));
        }
        config_.eww = new_eww;
    }

    void reset() {
        ring_.fill(0);
        write_index_ = 0;
        samples_seen_ = 0;
    }

    const ApmuConfig& config() const { return config_; }
    std::uint64_t samples_seen() const { return samples_seen_; }
    std::uint32_t fsau_mask() const { return fsau_mask_for(config_.eww); }

private:
    ApmuConfig config_;
    std::array<std::int64_t, kApmuSlots> ring_{};
    std::size_t write_index_ = 0;
    std::uint64_t samples_seen_ = 0;
};

} // namespace algas
