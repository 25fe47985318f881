#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "algas/fabric.hpp"

using namespace algas;

namespace {

std::array<CornerReadings, 4> uniform_readings(int lidar, int radar) {
    std::array<CornerReadings, 4> r{};
    for (auto& c : r) c = CornerReadings{lidar, radar};
    return r;
}

std::int64_t pair_distance(const CoreOutput& out) {
    return (out.filtered_lidar.raw + out.filtered_radar.raw + 1) >> 1;
}

} // namespace

TEST_CASE("differential check is strict and symmetric") {
    const FixedSample tol = quantize(0.05, kCanonical);
    const FixedSample a = quantize(0.6, kCanonical);
    const FixedSample b = quantize(0.5, kCanonical);
    CHECK(differential_check(a, b, tol));
    CHECK(differential_check(b, a, tol));
    CHECK_FALSE(differential_check(a, a, tol));

    // |delta| exactly equal to the tolerance stays quiet
    const FixedSample base{32768, kCanonical};
    const FixedSample shifted{32768 + tol.raw, kCanonical};
    CHECK_FALSE(differential_check(base, shifted, tol));
    CHECK(differential_check(FixedSample{shifted.raw + 1, kCanonical}, base, tol));

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> dist(0, 65535);
    for (int i = 0; i < 10000; ++i) {
        const FixedSample x{dist(rng), kCanonical};
        const FixedSample y{dist(rng), kCanonical};
        REQUIRE(differential_check(x, y, tol) == differential_check(y, x, tol));
    }
}

TEST_CASE("symmetric streams raise no flags and fly full-auto") {
    Fabric fabric(CoreParams{}, FabricParams{});
    for (int t = 0; t < 200; ++t) {
        const SystemOutput so = fabric.tick(uniform_readings(700, 350));
        CHECK(so.mode == SystemMode::FullAuto);
        for (const auto& flag : so.inclination_flags) {
            if (flag) CHECK_FALSE(*flag);
        }
        if (t > 40) {
            // post warm-up both pairs deliver verdicts
            REQUIRE(so.inclination_flags[0].has_value());
            REQUIRE(so.inclination_flags[1].has_value());
            REQUIRE(so.aggregate_crisp.has_value());
            CHECK(so.aggregate_crisp->raw == so.per_core[0]->crisp.raw);
        }
    }
}

TEST_CASE("a cross-pair offset flags exactly link-latency ticks after it shows") {
    FabricParams params;
    params.link_latency_ticks = 2;
    Fabric fabric(CoreParams{}, params);

    auto readings = uniform_readings(700, 350);
    std::uint64_t first_visible = 0;
    std::uint64_t first_flag = 0;
    for (std::uint64_t t = 0; t < 300; ++t) {
        if (t == 100) {
            // corner 0 suddenly reads much farther on both sensors
            readings[0] = CornerReadings{1100, 550};
        }
        const SystemOutput so = fabric.tick(readings);
        if (t >= 100) {
            if (first_visible == 0 && so.per_core[0] && so.per_core[2]) {
                const std::int64_t d0 = pair_distance(*so.per_core[0]);
                const std::int64_t d2 = pair_distance(*so.per_core[2]);
                if (std::abs(d0 - d2) > params.tolerance.raw) first_visible = t;
            }
            if (first_flag == 0 && so.inclination_flags[0] && *so.inclination_flags[0]) {
                first_flag = t;
            }
        }
        // the orthogonal pair stays clean throughout
        if (so.inclination_flags[1]) CHECK_FALSE(*so.inclination_flags[1]);
    }
    REQUIRE(first_visible > 0);
    REQUIRE(first_flag > 0);
    CHECK(first_flag == first_visible + std::uint64_t(params.link_latency_ticks));
}

TEST_CASE("mode machine transitions") {
    SECTION("pair failure with permit degrades") {
        ModeMachine m(8, true);
        std::array<bool, 4> healthy{true, true, true, true};
        std::array<bool, 4> alarm{};
        CHECK(m.update(healthy, alarm) == SystemMode::FullAuto);
        healthy = {true, false, true, false}; // pair (1,3) down
        CHECK(m.update(healthy, alarm) == SystemMode::DegradedPair);
        CHECK(m.update(healthy, alarm) == SystemMode::DegradedPair);
        healthy[0] = false; // a third corner goes
        CHECK(m.update(healthy, alarm) == SystemMode::SemiAutoHandover);
        healthy = {true, true, true, true};
        CHECK(m.update(healthy, alarm) == SystemMode::SemiAutoHandover); // absorbing
    }

    SECTION("pair failure without permit hands over") {
        ModeMachine m(8, false);
        std::array<bool, 4> alarm{};
        CHECK(m.update({true, false, true, false}, alarm) == SystemMode::SemiAutoHandover);
    }

    SECTION("a single failed corner already forces handover") {
        ModeMachine m(8, true);
        std::array<bool, 4> alarm{};
        CHECK(m.update({true, true, false, true}, alarm) == SystemMode::SemiAutoHandover);
    }

    SECTION("sustained alarms absorb, interrupted alarms do not") {
        ModeMachine interrupted(4, true);
        std::array<bool, 4> healthy{true, true, true, true};
        for (int i = 0; i < 3; ++i) {
            CHECK(interrupted.update(healthy, {true, false, false, false}) ==
                  SystemMode::FullAuto);
        }
        CHECK(interrupted.update(healthy, {false, false, false, false}) == SystemMode::FullAuto);
        for (int i = 0; i < 3; ++i) interrupted.update(healthy, {true, false, false, false});
        CHECK_FALSE(interrupted.absorbed());

        ModeMachine sustained(4, true);
        for (int i = 0; i < 3; ++i) sustained.update(healthy, {false, true, false, false});
        CHECK(sustained.update(healthy, {false, true, false, false}) ==
              SystemMode::SemiAutoHandover);
        CHECK(sustained.update(healthy, {false, false, false, false}) ==
              SystemMode::SemiAutoHandover);
    }
}

TEST_CASE("failed pairs are torn out of the aggregate") {
    FabricParams params;
    params.pilot_permit = true;
    Fabric fabric(CoreParams{}, params);

    // corners 1 and 3 see very different ground distances than 0 and 2
    std::array<CornerReadings, 4> readings{CornerReadings{200, 100}, CornerReadings{1800, 900},
                                           CornerReadings{200, 100}, CornerReadings{1800, 900}};
    SystemOutput so;
    for (int t = 0; t < 60; ++t) so = fabric.tick(readings);
    REQUIRE(so.aggregate_crisp.has_value());
    const std::int64_t mixed = so.aggregate_crisp->raw;

    fabric.fail_core(1);
    fabric.fail_core(3);
    for (int t = 0; t < 5; ++t) so = fabric.tick(readings);
    CHECK(so.mode == SystemMode::DegradedPair);
    REQUIRE(so.per_core[0].has_value());
    REQUIRE_FALSE(so.per_core[1].has_value());
    REQUIRE(so.aggregate_crisp.has_value());
    const std::int64_t surviving = so.aggregate_crisp->raw;
    CHECK(surviving != mixed);
    CHECK(surviving ==
          div_round_half_away(so.per_core[0]->crisp.raw + so.per_core[2]->crisp.raw, 2));
    CHECK_FALSE(so.inclination_flags[1].has_value()); // dead pair: no verdict, not "false"
}

TEST_CASE("a persistent within-corner sensor split eventually hands over") {
    FabricParams params;
    params.handover_k = 5;
    Fabric fabric(CoreParams{}, params);

    auto readings = uniform_readings(700, 350);
    for (int t = 0; t < 60; ++t) fabric.tick(readings);

    readings[2] = CornerReadings{100, 1000}; // corner 2: lidar near, radar far
    SystemOutput so;
    bool handed_over = false;
    for (int t = 0; t < 80; ++t) {
        so = fabric.tick(readings);
        if (so.mode == SystemMode::SemiAutoHandover) {
            handed_over = true;
            break;
        }
    }
    CHECK(handed_over);

    // healing the sensors does not lift the handover
    readings[2] = CornerReadings{700, 350};
    for (int t = 0; t < 120; ++t) {
        so = fabric.tick(readings);
        REQUIRE(so.mode == SystemMode::SemiAutoHandover);
    }
}

TEST_CASE("min and max aggregation") {
    FabricParams params;
    params.aggregation = Aggregation::Min;
    Fabric fmin(CoreParams{}, params);
    params.aggregation = Aggregation::Max;
    Fabric fmax(CoreParams{}, params);

    std::array<CornerReadings, 4> readings{CornerReadings{100, 50}, CornerReadings{1000, 500},
                                           CornerReadings{100, 50}, CornerReadings{1000, 500}};
    SystemOutput smin, smax;
    for (int t = 0; t < 60; ++t) {
        smin = fmin.tick(readings);
        smax = fmax.tick(readings);
    }
    REQUIRE(smin.aggregate_crisp.has_value());
    REQUIRE(smax.aggregate_crisp.has_value());
    CHECK(smin.aggregate_crisp->raw < smax.aggregate_crisp->raw);
    std::int64_t lo = kCanonical.max_raw(), hi = 0;
    for (const auto& co : smin.per_core) {
        lo = std::min(lo, co->crisp.raw);
        hi = std::max(hi, co->crisp.raw);
    }
    CHECK(smin.aggregate_crisp->raw == lo);
    CHECK(smax.aggregate_crisp->raw == hi);
}
