#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "algas/core.hpp"
#include "algas/packet.hpp"

namespace algas {

enum class SystemMode : std::uint8_t { FullAuto, DegradedPair, SemiAutoHandover };

inline std::string_view to_string(SystemMode m) {
    switch (m) {
        case SystemMode::FullAuto: return "full_auto";
        case SystemMode::DegradedPair: return "degraded_pair";
        case SystemMode::SemiAutoHandover: return "semi_auto";
    }
    return "?";
}

enum class Aggregation : std::uint8_t { Mean, Min, Max };

struct FabricParams {
    int link_latency_ticks = 1;
    std::size_t link_queue_capacity = 4;
    FixedSample tolerance = quantize(0.05, kCanonical);
    Aggregation aggregation = Aggregation::Mean;
    int handover_k = 8; // consecutive alarm ticks before handover
    bool pilot_permit = false;
};

/// Opposed-side agreement test: true (tilt suspected) when the distances
/// differ by strictly more than the tolerance.
inline bool differential_check(const FixedSample& d_a, const FixedSample& d_opposite,
                               const FixedSample& tolerance) {
    return abs_diff(d_a, d_opposite).raw > tolerance.raw;
}

/// Operating-mode state machine.
///
///   all healthy                      -> FullAuto
///   exactly one opposed pair failed  -> DegradedPair, but only with the
///                                       pilot's permit; otherwise handover
///   anything worse, or a sustained
///   malfunction alarm                -> SemiAutoHandover
///
/// SemiAutoHandover is absorbing for the rest of the run.
class ModeMachine {
public:
    ModeMachine(int handover_k, bool pilot_permit)
        : handover_k_(handover_k), pilot_permit_(pilot_permit) {}

    SystemMode update(const std::array<bool, 4>& healthy, const std::array<bool, 4>& alarm) {
        for (int i = 0; i < 4; ++i) {
            if (healthy[std::size_t(i)] && alarm[std::size_t(i)]) {
                if (++alarm_streak_[std::size_t(i)] >= handover_k_) absorbed_ = true;
            } else {
                alarm_streak_[std::size_t(i)] = 0;
            }
        }
        int failed_mask = 0;
        for (int i = 0; i < 4; ++i) {
            if (!healthy[std::size_t(i)]) failed_mask |= 1 << i;
        }

        SystemMode mode;
        if (absorbed_) {
            mode = SystemMode::SemiAutoHandover;
        } else if (failed_mask == 0) {
            mode = SystemMode::FullAuto;
        } else if (failed_mask == 0b0101 || failed_mask == 0b1010) {
            mode = pilot_permit_ ? SystemMode::DegradedPair : SystemMode::SemiAutoHandover;
        } else {
            mode = SystemMode::SemiAutoHandover;
        }
        if (mode == SystemMode::SemiAutoHandover) absorbed_ = true;
        return mode;
    }

    bool absorbed() const { return absorbed_; }

private:
    int handover_k_;
    bool pilot_permit_;
    std::array<int, 4> alarm_streak_{};
    bool absorbed_ = false;
};

struct SystemOutput {
    std::uint64_t tick = 0;
    std::array<std::optional<CoreOutput>, 4> per_core{};
    /// Pair 0 compares corners 0 and 2; pair 1 compares corners 1 and 3.
    std::array<std::optional<bool>, 2> inclination_flags{};
    std::optional<FixedSample> aggregate_crisp;
    SystemMode mode = SystemMode::FullAuto;
};

struct SerialExecutor {
    template <class F>
    void parallel_for4(F&& fn) {
        for (int i = 0; i < 4; ++i) fn(i);
    }
};

/// The four-corner system. Each tick runs in phases: every healthy core
/// advances (phase 1, parallelizable per core), packets cross the links
/// (phase 2), delivered opposite-side distances are compared (phase 3),
/// then the mode machine and the aggregate update (phase 4). All cross-core
/// data flows through the links, so differential verdicts lag by the link
/// latency.
class Fabric {
public:
    Fabric(const CoreParams& core_params, const FabricParams& params)
        : params_(params),
          cores_{Core{0, core_params}, Core{1, core_params}, Core{2, core_params},
                 Core{3, core_params}},
          links_{HsdciLink{params.link_latency_ticks, params.link_queue_capacity},
                 HsdciLink{params.link_latency_ticks, params.link_queue_capacity},
                 HsdciLink{params.link_latency_ticks, params.link_queue_capacity},
                 HsdciLink{params.link_latency_ticks, params.link_queue_capacity}},
          mode_machine_(params.handover_k, params.pilot_permit) {}

    SystemOutput tick(const std::array<CornerReadings, 4>& readings) {
        SerialExecutor serial;
        return tick(readings, serial);
    }

    template <class Executor>
    SystemOutput tick(const std::array<CornerReadings, 4>& readings, Executor& executor) {
        SystemOutput out;
        out.tick = tick_;

        // Phase 1: independent per-core advancement.
        executor.parallel_for4([&](int i) {
            Core& core = cores_[std::size_t(i)];
            if (!core.healthy()) return;
            out.per_core[std::size_t(i)] =
                core.tick(readings[std::size_t(i)].lidar_code, readings[std::size_t(i)].radar_code);
        });

        // Phase 2: packet exchange. Warm-up data is not worth sharing.
        for (int i = 0; i < 4; ++i) {
            const auto& co = out.per_core[std::size_t(i)];
            if (!co || co->warmup) continue;
            links_[std::size_t(i)].send(dic_build_packet(*co, seq_[std::size_t(i)]++), tick_);
        }
        for (int sender = 0; sender < 4; ++sender) {
            for (const DicPacket& p : links_[std::size_t(sender)].collect(tick_)) {
                pair_slot_[std::size_t(sender)] = p;
            }
        }

        // Phase 3: differential inclination checks on delivered data.
        for (int pair = 0; pair < 2; ++pair) {
            const int a = pair;
            const int b = CoreId::opposite(pair);
            if (!cores_[std::size_t(a)].healthy() || !cores_[std::size_t(b)].healthy()) {
                pair_slot_[std::size_t(a)].reset();
                pair_slot_[std::size_t(b)].reset();
                continue;
            }
            const auto& pa = pair_slot_[std::size_t(a)];
            const auto& pb = pair_slot_[std::size_t(b)];
            if (pa && pb && pa->tick == pb->tick) {
                out.inclination_flags[std::size_t(pair)] =
                    differential_check(canonical_from_raw(pa->distance_raw),
                                       canonical_from_raw(pb->distance_raw), params_.tolerance);
            }
        }

        // Phase 4: mode machine and aggregation over validated pairs.
        std::array<bool, 4> healthy{};
        std::array<bool, 4> alarm{};
        for (int i = 0; i < 4; ++i) {
            healthy[std::size_t(i)] = cores_[std::size_t(i)].healthy();
            alarm[std::size_t(i)] =
                out.per_core[std::size_t(i)] && out.per_core[std::size_t(i)]->apmu.alarm;
        }
        out.mode = mode_machine_.update(healthy, alarm);
        out.aggregate_crisp = aggregate(out);

        ++tick_;
        return out;
    }

    void fail_core(int index) { cores_[std::size_t(index)].fail(); }
    Core& core(int index) { return cores_[std::size_t(index)]; }
    const Core& core(int index) const { return cores_[std::size_t(index)]; }
    /// Directed link carrying `sender`'s packets to its opposite corner.
    const HsdciLink& link_from(int sender) const { return links_[std::size_t(sender)]; }
    const FabricParams& params() const { return params_; }
    std::uint64_t current_tick() const { return tick_; }

private:
    /// Crisp values of every core that belongs to a fully healthy pair.
    std::optional<FixedSample> aggregate(const SystemOutput& out) const {
        std::int64_t sum = 0;
        std::int64_t mn = kCanonical.max_raw();
        std::int64_t mx = 0;
        int n = 0;
        for (int pair = 0; pair < 2; ++pair) {
            const int a = pair;
            const int b = CoreId::opposite(pair);
            if (!out.per_core[std::size_t(a)] || !out.per_core[std::size_t(b)]) continue;
            for (int i : {a, b}) {
                const std::int64_t raw = out.per_core[std::size_t(i)]->crisp.raw;
                sum += raw;
                mn = std::min(mn, raw);
                mx = std::max(mx, raw);
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        switch (params_.aggregation) {
            case Aggregation::Min: return canonical_from_raw(mn);
            case Aggregation::Max: return canonical_from_raw(mx);
            case Aggregation::Mean: break;
        }
        return canonical_from_raw(div_round_half_away(sum, n));
    }

    FabricParams params_;
    std::array<Core, 4> cores_;
    std::array<HsdciLink, 4> links_; // index = sending core
    std::array<std::optional<DicPacket>, 4> pair_slot_{}; // latest delivery per sender
    std::array<std::uint32_t, 4> seq_{};
    ModeMachine mode_machine_;
    std::uint64_t tick_ = 0;
};

} // namespace algas
