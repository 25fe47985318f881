#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "algas/fixed.hpp"

using namespace algas;

TEST_CASE("QFormat ranges") {
    CHECK(kCanonical.max_raw() == 65535);
    CHECK(kCanonical.min_raw() == 0);
    CHECK(kFirCoeff.max_raw() == 32767);
    CHECK(kFirCoeff.min_raw() == -32768);
    CHECK(kFirOutput.max_raw() == 131071);
    CHECK(kFirOutput.min_raw() == -131072);
    CHECK(QFormat{32, 16, false}.max_raw() == 4294967295LL);
    CHECK(kCanonical.to_string() == "U0.16");
    CHECK(kFirCoeff.to_string() == "S0.15");
}

TEST_CASE("quantize hits the expected codes") {
    CHECK(quantize(0.0, kCanonical).raw == 0);
    CHECK(quantize(0.5, kCanonical).raw == 32768);
    CHECK(quantize(1.5, kCanonical).raw == 65535); // saturates at full scale
    CHECK(quantize(-0.25, kCanonical).raw == 0);
    CHECK(quantize(0.25, kFirCoeff).raw == 8192);
    CHECK(quantize(-0.25, kFirCoeff).raw == -8192);
}

TEST_CASE("quantize rounds half away from zero") {
    // 1.5 LSB of U0.16
    CHECK(quantize(1.5 / 65536.0, kCanonical).raw == 2);
    CHECK(quantize(0.5 / 65536.0, kCanonical).raw == 1);
    CHECK(quantize(-1.5 / 32768.0, kFirCoeff).raw == -2);
    CHECK(quantize(-0.5 / 32768.0, kFirCoeff).raw == -1);
}

TEST_CASE("quantize/dequantize round trip stays within half an LSB") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 65535.0 / 65536.0);
    for (int i = 0; i < 20000; ++i) {
        const double v = dist(rng);
        const FixedSample s = quantize(v, kCanonical);
        CHECK(std::abs(dequantize(s) - v) <= 0.5 * kCanonical.lsb());
    }
}

TEST_CASE("sat_add") {
    const FixedSample zero{0, kCanonical};
    const FixedSample x = quantize(0.37, kCanonical);
    CHECK(sat_add(zero, x) == x);

    const FixedSample max{kCanonical.max_raw(), kCanonical};
    const FixedSample lsb{1, kCanonical};
    CHECK(sat_add(max, lsb).raw == kCanonical.max_raw());

    CHECK(sat_add(quantize(0.25, kCanonical), quantize(0.5, kCanonical)).raw ==
          quantize(0.75, kCanonical).raw);
}

TEST_CASE("abs_diff") {
    const FixedSample a = quantize(0.7, kCanonical);
    const FixedSample b = quantize(0.2, kCanonical);
    CHECK(abs_diff(a, a).raw == 0);
    CHECK(abs_diff(a, b).raw == abs_diff(b, a).raw);
    CHECK(abs_diff(a, b).raw == a.raw - b.raw);

    const FixedSample max{kCanonical.max_raw(), kCanonical};
    const FixedSample zero{0, kCanonical};
    CHECK(abs_diff(max, zero).raw == kCanonical.max_raw());

    // Signed formats saturate when the magnitude does not fit.
    const QFormat s8{8, 0, true};
    CHECK(abs_diff(FixedSample{127, s8}, FixedSample{-128, s8}).raw == 127);
}

TEST_CASE("abs_diff symmetry, exhaustive on 8-bit") {
    const QFormat u8{8, 8, false};
    for (std::int64_t a = 0; a < 256; ++a) {
        for (std::int64_t b = a; b < 256; ++b) {
            const auto d1 = abs_diff(FixedSample{a, u8}, FixedSample{b, u8});
            const auto d2 = abs_diff(FixedSample{b, u8}, FixedSample{a, u8});
            REQUIRE(d1.raw == d2.raw);
            REQUIRE(u8.contains(d1.raw));
        }
    }
}

TEST_CASE("abs_diff symmetry, randomized 16-bit") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> dist(0, 65535);
    for (int i = 0; i < 50000; ++i) {
        const FixedSample a{dist(rng), kCanonical};
        const FixedSample b{dist(rng), kCanonical};
        REQUIRE(abs_diff(a, b).raw == abs_diff(b, a).raw);
    }
}

TEST_CASE("results always land inside the format range") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::int64_t> dist(0, 65535);
    for (int i = 0; i < 50000; ++i) {
        const FixedSample a{dist(rng), kCanonical};
        const FixedSample b{dist(rng), kCanonical};
        REQUIRE(kCanonical.contains(sat_add(a, b).raw));
        REQUIRE(kCanonical.contains(abs_diff(a, b).raw));
    }
}

TEST_CASE("shift and divide round half away from zero") {
    CHECK(shift_round_half_away(5, 1) == 3);   // 2.5 -> 3
    CHECK(shift_round_half_away(-5, 1) == -3); // -2.5 -> -3
    CHECK(shift_round_half_away(4, 1) == 2);
    CHECK(shift_round_half_away(6, 2) == 2);  // 1.5 -> 2
    CHECK(shift_round_half_away(3, 0) == 3);
    CHECK(div_round_half_away(7, 2) == 4);
    CHECK(div_round_half_away(-7, 2) == -4);
    CHECK(div_round_half_away(10, 4) == 3); // 2.5 -> 3
}

TEST_CASE("convert narrows with rounding and saturation") {
    // frac 31 -> frac 16 narrowing as used by the FIR output stage
    const QFormat wide{32, 31, true};
    CHECK(convert(std::int64_t{1} << 15, wide, kFirOutput).raw == 1);
    CHECK(convert((std::int64_t{1} << 14), wide, kFirOutput).raw == 1); // half rounds away
    CHECK(convert((std::int64_t{1} << 14) - 1, wide, kFirOutput).raw == 0);
    CHECK(convert(-(std::int64_t{1} << 14), wide, kFirOutput).raw == -1);

    // value far above the target range pins at max
    CHECK(convert(std::int64_t{3} << 31, wide, kFirOutput).raw == kFirOutput.max_raw());
    // signed to canonical clamps negatives to zero
    CHECK(convert(-42, kFirOutput, kCanonical).raw == 0);
}
