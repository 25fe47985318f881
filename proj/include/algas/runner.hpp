#pragma once

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "algas/config.hpp"
#include "algas/fabric.hpp"
#include "algas/reference.hpp"
#include "algas/scenario.hpp"
#include "algas/trace.hpp"

namespace algas {

/// Persistent workers for phase 1. The calling thread acts as worker 0 and
/// the pool spins (with backoff) instead of sleeping: the per-tick work is
/// microseconds, so futex wakeups would dwarf it. Execution threads are
/// capped at the hardware concurrency; the per-core results are bitwise
/// independent of how cores map onto workers, so any cap yields the same
/// trace.
class WorkerPool {
public:
    explicit WorkerPool(int requested) : width_(effective_width(requested)) {
        for (int w = 1; w < width_; ++w) {
            threads_.emplace_back([this, w] { worker_loop(w); });
        }
    }

    ~WorkerPool() {
        stop_.store(true, std::memory_order_relaxed);
        epoch_.fetch_add(1, std::memory_order_release);
        for (auto& t : threads_) t.join();
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    static int effective_width(int requested) {
        const unsigned hw = std::thread::hardware_concurrency();
        const int cap = hw > 0 ? int(hw) : 1;
        return std::max(1, std::min({requested, cap, 4}));
    }

    template <class F>
    void parallel_for4(F&& fn) {
        if (width_ == 1) {
            for (int core = 0; core < 4; ++core) fn(core);
            return;
        }
        job_ = std::ref(fn);
        done_.store(0, std::memory_order_relaxed);
        epoch_.fetch_add(1, std::memory_order_release);
        for (int core = 0; core < 4; core += width_) fn(core);
        int spins = 0;
        while (done_.load(std::memory_order_acquire) != width_ - 1) relax(spins);
    }

    int width() const { return width_; }

private:
    static void relax(int& spins) {
        if (++spins < 2048) {
#if defined(__x86_64__) || defined(__i386__)
            __builtin_ia32_pause();
#elif defined(__aarch64__)
            asm volatile("yield");
#endif
        } else {
            std::this_thread::yield();
        }
    }

    void worker_loop(int id) {
        std::uint64_t seen = 0;
        for (;;) {
            int spins = 0;
            while (epoch_.load(std::memory_order_acquire) == seen) relax(spins);
            seen = epoch_.load(std::memory_order_acquire);
            if (stop_.load(std::memory_order_relaxed)) return;
            for (int core = id; core < 4; core += width_) job_(core);
            done_.fetch_add(1, std::memory_order_release);
        }
    }

    int width_;
    std::vector<std::thread> threads_;
    std::function<void(int)> job_;
    std::atomic<std::uint64_t> epoch_{0};
    std::atomic<int> done_{0};
    std::atomic<bool> stop_{false};
};

struct RunSummary {
    std::uint64_t duration_ticks = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::array<std::optional<std::uint64_t>, 4> first_alarm_tick{};
    std::array<std::uint64_t, 4> alarm_tick_count{};
    std::vector<std::pair<std::uint64_t, SystemMode>> mode_transitions;
    std::array<std::uint64_t, 4> link_backpressure{};
    std::uint64_t checksum_drops = 0;
    std::uint64_t siu_clamp_count = 0;
    std::string trace_path;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["duration_ticks"] = duration_ticks;
        j["seed"] = seed;
        j["workers"] = workers;
        for (int i = 0; i < 4; ++i) {
            const std::string k = std::to_string(i);
            j["first_alarm_tick"][k] =
                first_alarm_tick[std::size_t(i)]
                    ? nlohmann::json(*first_alarm_tick[std::size_t(i)])
                    : nlohmann::json(nullptr);
            j["alarm_tick_count"][k] = alarm_tick_count[std::size_t(i)];
            j["link_backpressure"][k] = link_backpressure[std::size_t(i)];
        }
        j["mode_transitions"] = nlohmann::json::array();
        for (const auto& [tick, mode] : mode_transitions) {
            j["mode_transitions"].push_back({{"tick", tick}, {"mode", to_string(mode)}});
        }
        j["checksum_drops"] = checksum_drops;
        j["siu_clamp_count"] = siu_clamp_count;
        j["trace_path"] = trace_path;
        return j;
    }
};

namespace detail {

inline void record_output(const SystemOutput& so, RunSummary& summary, std::string* trace_out) {
    for (int i = 0; i < 4; ++i) {
        const auto& co = so.per_core[std::size_t(i)];
        if (!co) continue;
        if (co->apmu.alarm) {
            ++summary.alarm_tick_count[std::size_t(i)];
            if (!summary.first_alarm_tick[std::size_t(i)]) {
                summary.first_alarm_tick[std::size_t(i)] = so.tick;
            }
        }
        if (co->siu_clamped) ++summary.siu_clamp_count;
        if (trace_out) {
            const auto flag = so.inclination_flags[std::size_t(i & 1)];
            *trace_out += format_trace_row(make_trace_row(*co, flag, so.mode));
        }
    }
    if (summary.mode_transitions.empty() || summary.mode_transitions.back().second != so.mode) {
        summary.mode_transitions.emplace_back(so.tick, so.mode);
    }
}

} // namespace detail

/// Execute a configured scenario, streaming the trace to `trace_path`
/// (empty path: no trace). Worker count affects wall time only.
inline RunSummary run_simulation(const RunConfig& cfg, const std::string& trace_path,
                                 int workers = 1) {
    ScenarioGenerator gen(cfg.scenario, cfg.faults);
    Fabric fabric(cfg.core_params(), cfg.fabric);

    std::ofstream out;
    if (!trace_path.empty()) {
        out.open(trace_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write trace file \"" + trace_path + "\"");
        out << trace_header();
    }

    RunSummary summary;
    summary.duration_ticks = cfg.scenario.duration_ticks;
    summary.seed = cfg.scenario.seed;
    summary.workers = workers;
    summary.trace_path = trace_path;

    std::optional<WorkerPool> pool;
    if (workers > 1) pool.emplace(workers);

    std::string row_buffer;
    for (std::uint64_t t = 0; t < cfg.scenario.duration_ticks; ++t) {
        const auto readings = gen.readings(t);
        const SystemOutput so = pool ? fabric.tick(readings, *pool) : fabric.tick(readings);
        row_buffer.clear();
        detail::record_output(so, summary, trace_path.empty() ? nullptr : &row_buffer);
        if (!trace_path.empty()) out << row_buffer;
    }

    for (int i = 0; i < 4; ++i) {
        summary.link_backpressure[std::size_t(i)] = fabric.link_from(i).backpressure_count();
        summary.checksum_drops += fabric.link_from(i).checksum_drop_count();
    }
    return summary;
}

// ---------------------------------------------------------------------------
// Accuracy report: fixed-point controller vs the double-precision twin.
// ---------------------------------------------------------------------------

struct AccuracyReport {
    int grid_size = 0;
    std::uint64_t compared_points = 0;
    double max_rel_dev = 0.0;
    double mean_rel_dev = 0.0;
    double argmax_lidar = 0.0;
    double argmax_radar = 0.0;
    double seconds = 0.0;
    bool pass = false;

    nlohmann::json to_json() const {
        return nlohmann::json{{"grid_size", grid_size},
                              {"compared_points", compared_points},
                              {"max_rel_dev", max_rel_dev},
                              {"mean_rel_dev", mean_rel_dev},
                              {"argmax", {{"lidar", argmax_lidar}, {"radar", argmax_radar}}},
                              {"seconds", seconds},
                              {"pass", pass}};
    }
};

inline constexpr double kAccuracyBound = 0.05;      // max tolerated relative deviation
inline constexpr double kAccuracyFloor = 0.05;      // reference floor against near-zero blowup

/// Sweep a grid of input pairs and compare both controller paths at points
/// where both report a valid crisp value. `degree_frac_bits` narrows the
/// engine's internal resolution (test hook; 16 is the shipped width).
inline AccuracyReport verify_accuracy(const RunConfig& cfg, int grid = 512,
                                      int degree_frac_bits = 16) {
    const auto t0 = std::chrono::steady_clock::now();
    FlsEngine fixed(cfg.fls, default_rulebase(), degree_frac_bits);
    RefFls ref(cfg.fls);
    const FixedSample fallback{0, kCanonical};

    AccuracyReport rep;
    rep.grid_size = grid;
    double dev_sum = 0.0;
    for (int i = 0; i < grid; ++i) {
        const FixedSample lidar = quantize(double(i) / grid, kCanonical);
        for (int j = 0; j < grid; ++j) {
            const FixedSample radar = quantize(double(j) / grid, kCanonical);
            const FlsResult fx = fixed.evaluate(lidar, radar, fallback);
            const RefFlsResult rf = ref.evaluate(lidar.value(), radar.value());
            if (fx.status != FlsStatus::Valid || rf.status != FlsStatus::Valid) continue;
            const double dev =
                std::abs(fx.crisp.value() - rf.crisp) / std::max(rf.crisp, kAccuracyFloor);
            dev_sum += dev;
            ++rep.compared_points;
            if (dev > rep.max_rel_dev) {
                rep.max_rel_dev = dev;
                rep.argmax_lidar = lidar.value();
                rep.argmax_radar = radar.value();
            }
        }
    }
    rep.mean_rel_dev = rep.compared_points ? dev_sum / double(rep.compared_points) : 0.0;
    rep.pass = rep.max_rel_dev <= kAccuracyBound;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Throughput measurement.
// ---------------------------------------------------------------------------

struct BenchReport {
    std::uint64_t ticks = 0;
    int workers = 1;
    double seconds_single = 0.0;
    double rate_single = 0.0;
    double seconds_parallel = 0.0;
    double rate_parallel = 0.0;
    std::uint64_t digest_single = 0;
    std::uint64_t digest_parallel = 0;
    bool identical = false;

    nlohmann::json to_json() const {
        return nlohmann::json{{"ticks", ticks},
                              {"workers", workers},
                              {"seconds_single", seconds_single},
                              {"ticks_per_sec_single", rate_single},
                              {"seconds_parallel", seconds_parallel},
                              {"ticks_per_sec_parallel", rate_parallel},
                              {"identical", identical}};
    }
};

namespace detail {

inline void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
    }
}

inline std::uint64_t digest_run(const RunConfig& cfg, std::uint64_t ticks, int workers,
                                double& seconds) {
    ScenarioGenerator gen(cfg.scenario, cfg.faults);
    Fabric fabric(cfg.core_params(), cfg.fabric);
    std::optional<WorkerPool> pool;
    if (workers > 1) pool.emplace(workers);

    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t t = 0; t < ticks; ++t) {
        const auto readings = gen.readings(t);
        const SystemOutput so = pool ? fabric.tick(readings, *pool) : fabric.tick(readings);
        for (int i = 0; i < 4; ++i) {
            const auto& co = so.per_core[std::size_t(i)];
            if (!co) continue;
            fnv_mix(h, std::uint64_t(co->crisp.raw));
            fnv_mix(h, std::uint64_t(co->apmu.effective_weight_raw));
            fnv_mix(h, std::uint64_t(co->apmu.alarm));
        }
        fnv_mix(h, std::uint64_t(so.mode));
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return h;
}

} // namespace detail

/// Run the same clean scenario single-threaded and with a worker pool;
/// report throughput and confirm the outputs digest identically.
inline BenchReport bench(const RunConfig& base_cfg, std::uint64_t ticks, int workers) {
    RunConfig cfg = base_cfg;
    cfg.scenario.duration_ticks = ticks;

    BenchReport rep;
    rep.ticks = ticks;
    rep.workers = workers;
    rep.digest_single = detail::digest_run(cfg, ticks, 1, rep.seconds_single);
    rep.rate_single = rep.seconds_single > 0.0 ? double(ticks) / rep.seconds_single : 0.0;
    rep.digest_parallel = detail::digest_run(cfg, ticks, workers, rep.seconds_parallel);
    rep.rate_parallel = rep.seconds_parallel > 0.0 ? double(ticks) / rep.seconds_parallel : 0.0;
    rep.identical = rep.digest_single == rep.digest_parallel;
    return rep;
}

} // namespace algas
