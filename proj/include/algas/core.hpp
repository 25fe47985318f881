#pragma once

#include <cstdint>
#include <optional>

#include "algas/apmu.hpp"
#include "algas/errors.hpp"
#include "algas/fir.hpp"
#include "algas/fixed.hpp"
#include "algas/fls.hpp"
#include "algas/scenario.hpp"

namespace algas {

struct CoreId {
    int index = 0;

    static constexpr int opposite(int index) { return (index + 2) & 3; }
};

/// Sensor interface: maps raw sensor codes onto the canonical grid with a
/// baked reciprocal multiply (round(code * 65536 / full_scale), no runtime
/// division). Out-of-range codes clamp and raise a diagnostic flag.
class SiuNormalizer {
public:
    explicit SiuNormalizer(int full_scale)
        : full_scale_(full_scale),
          reciprocal_((((std::int64_t{1} << (16 + kShift)) + full_scale / 2) / full_scale)) {}

    FixedSample normalize(int code, bool& clamped) const {
        std::int64_t c = code;
        if (c < 0) {
            c = 0;
            clamped = true;
        } else if (c > full_scale_) {
            c = full_scale_;
            clamped = true;
        }
        const std::int64_t raw = (c * reciprocal_ + (std::int64_t{1} << (kShift - 1))) >> kShift;
        return canonical_from_raw(raw);
    }

    int full_scale() const { return full_scale_; }

private:
    static constexpr int kShift = 24;
    int full_scale_;
    std::int64_t reciprocal_;
};

enum class CoreHealth : std::uint8_t { Healthy, Failed };

struct CoreParams {
    std::array<double, kFirTaps> fir_coefficients = default_lowpass_taps();
    FlsParams fls{};
    int fls_degree_frac_bits = 16;
    ApmuConfig apmu = default_apmu_config();
};

struct CoreOutput {
    std::uint64_t tick = 0;
    int core_id = 0;
    int raw_lidar = 0;
    int raw_radar = 0;
    FixedSample filtered_lidar{0, kCanonical};
    FixedSample filtered_radar{0, kCanonical};
    FixedSample crisp{0, kCanonical};
    FlsStatus fls_status = FlsStatus::Warmup;
    ApmuVerdict apmu{};
    bool warmup = true;
    bool siu_clamped = false;
};

/// One processing corner: sensor interface, the two pre-filters, the fuzzy
/// controller and the malfunction unit, wired in that order. The filter
/// outputs cross a register boundary, so the controller and the detector
/// always consume the previous tick's filtered pair: an input step reaches
/// the crisp output exactly one tick later, never in the same tick.
class Core {
public:
    Core(int index, const CoreParams& params)
        : index_(index),
          siu_lidar_(kLidarFullScale),
          siu_radar_(kRadarFullScale),
          fir_lidar_(params.fir_coefficients),
          fir_radar_(params.fir_coefficients),
          fls_(params.fls, default_rulebase(), params.fls_degree_frac_bits),
          apmu_(params.apmu) {}

    CoreOutput tick(int raw_lidar_code, int raw_radar_code) {
        if (health_ == CoreHealth::Failed) throw FailedCoreError(index_);

        CoreOutput out;
        out.core_id = index_;
        out.raw_lidar = raw_lidar_code;
        out.raw_radar = raw_radar_code;

        const FixedSample lidar = siu_lidar_.normalize(raw_lidar_code, out.siu_clamped);
        const FixedSample radar = siu_radar_.normalize(raw_radar_code, out.siu_clamped);

        out.filtered_lidar = convert(fir_lidar_.step(lidar).raw, kFirOutput, kCanonical);
        out.filtered_radar = convert(fir_radar_.step(radar).raw, kFirOutput, kCanonical);

        FlsResult fls_result{last_valid_crisp_, FlsStatus::Warmup};
        if (stage_) {
            fls_result = fls_.evaluate(stage_->lidar, stage_->radar, last_valid_crisp_);
            if (stage_->warm) {
                out.apmu = apmu_.step(stage_->lidar, stage_->radar);
            } else {
                out.apmu = apmu_.verdict();
            }
        } else {
            out.apmu = apmu_.verdict();
        }

        out.warmup = !(stage_ && stage_->warm && out.apmu.status == ApmuWindowStatus::Active);
        out.crisp = fls_result.crisp;
        out.fls_status = out.warmup && fls_result.status == FlsStatus::Valid ? FlsStatus::Warmup
                                                                             : fls_result.status;
        if (!out.warmup && fls_result.status == FlsStatus::Valid) {
            last_valid_crisp_ = fls_result.crisp;
        }

        stage_ = StageRegister{out.filtered_lidar, out.filtered_radar,
                               fir_lidar_.warm() && fir_radar_.warm()};
        out.tick = ticks_++;
        return out;
    }

    void fail() { health_ = CoreHealth::Failed; } // idempotent
    bool healthy() const { return health_ == CoreHealth::Healthy; }

    int index() const { return index_; }
    const Apmu& apmu() const { return apmu_; }
    Apmu& apmu() { return apmu_; }
    const FlsEngine& fls() const { return fls_; }
    FixedSample last_valid_crisp() const { return last_valid_crisp_; }
    std::uint64_t ticks() const { return ticks_; }

private:
    struct StageRegister {
        FixedSample lidar;
        FixedSample radar;
        bool warm = false;
    };

    int index_;
    SiuNormalizer siu_lidar_;
    SiuNormalizer siu_radar_;
    FirFilter fir_lidar_;
    FirFilter fir_radar_;
    FlsEngine fls_;
    Apmu apmu_;
    std::optional<StageRegister> stage_;
    FixedSample last_valid_crisp_{0, kCanonical};
    std::uint64_t ticks_ = 0;
    CoreHealth health_ = CoreHealth::Healthy;
};

} // namespace algas
