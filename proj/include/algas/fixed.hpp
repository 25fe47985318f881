#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>

namespace algas {

/// Describes a scaled-integer number format: `total_bits` wide (1..32),
/// `frac_bits` of which are fractional, two's complement when signed.
/// A raw code r represents the value r / 2^frac_bits.
struct QFormat {
    std::uint8_t total_bits{16};
    std::uint8_t frac_bits{16};
    bool is_signed{false};

    friend constexpr bool operator==(const QFormat&, const QFormat&) = default;

    constexpr bool valid() const {
        return total_bits >= 1 && total_bits <= 32 && frac_bits <= total_bits;
    }

    constexpr std::int64_t max_raw() const {
        return is_signed ? (std::int64_t{1} << (total_bits - 1)) - 1
                         : (std::int64_t{1} << total_bits) - 1;
    }

    constexpr std::int64_t min_raw() const {
        return is_signed ? -(std::int64_t{1} << (total_bits - 1)) : 0;
    }

    constexpr bool contains(std::int64_t raw) const {
        return raw >= min_raw() && raw <= max_raw();
    }

    double lsb() const { return std::ldexp(1.0, -int(frac_bits)); }

    std::string to_string() const {
        std::string s = is_signed ? "S" : "U";
        s += std::to_string(int(total_bits) - int(frac_bits) - (is_signed ? 1 : 0));
        s += ".";
        s += std::to_string(int(frac_bits));
        return s;
    }
};

/// Distances normalized to [0,1) travel the whole pipeline in this format.
inline constexpr QFormat kCanonical{16, 16, false};
/// FIR coefficients, Q1.15.
inline constexpr QFormat kFirCoeff{16, 15, true};
/// FIR stage output bus: signed so small negative filter lobes survive
/// until the stage boundary narrows back to canonical.
inline constexpr QFormat kFirOutput{18, 16, true};
/// Windowed-sum accumulator (APMU weights, thresholds, aggregates).
inline constexpr QFormat kWideSum{32, 16, false};

/// A value held as a raw integer code plus the format that interprets it.
/// The raw code is always inside the format's range; every operation that
/// could leave the range saturates, never wraps.
struct FixedSample {
    std::int64_t raw{0};
    QFormat format{kCanonical};

    friend constexpr bool operator==(const FixedSample&, const FixedSample&) = default;

    double value() const { return std::ldexp(double(raw), -int(format.frac_bits)); }
};

constexpr std::int64_t saturate_raw(std::int64_t raw, const QFormat& fmt) {
    if (raw > fmt.max_raw()) return fmt.max_raw();
    if (raw < fmt.min_raw()) return fmt.min_raw();
    return raw;
}

/// Shift a raw code right by `shift` bits, rounding half away from zero.
/// shift == 0 is the identity.
constexpr std::int64_t shift_round_half_away(std::int64_t raw, int shift) {
    if (shift <= 0) return raw << -shift;
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    if (raw >= 0) return (raw + half) >> shift;
    return -((-raw + half) >> shift);
}

/// Integer division rounding half away from zero. `den` must be positive.
constexpr std::int64_t div_round_half_away(std::int64_t num, std::int64_t den) {
    assert(den > 0);
    if (num >= 0) return (num + den / 2) / den;
    return -((-num + den / 2) / den);
}

/// Nearest representable sample for a real value, half rounded away from
/// zero, saturating at the range edges. Total: every input maps somewhere.
inline FixedSample quantize(double value, const QFormat& fmt) {
    assert(fmt.valid());
    if (std::isnan(value)) return FixedSample{0, fmt};
    const double scaled = std::ldexp(value, int(fmt.frac_bits));
    if (scaled >= double(fmt.max_raw())) return FixedSample{fmt.max_raw(), fmt};
    if (scaled <= double(fmt.min_raw())) return FixedSample{fmt.min_raw(), fmt};
    return FixedSample{std::llround(scaled), fmt};
}

inline double dequantize(const FixedSample& s) { return s.value(); }

/// Saturating addition; both operands must share a format.
inline FixedSample sat_add(const FixedSample& a, const FixedSample& b) {
    assert(a.format == b.format);
    return FixedSample{saturate_raw(a.raw + b.raw, a.format), a.format};
}

/// |a - b| in the shared format. Never negative; saturates only when a
/// signed format cannot hold the magnitude.
inline FixedSample abs_diff(const FixedSample& a, const FixedSample& b) {
    assert(a.format == b.format);
    const std::int64_t d = a.raw >= b.raw ? a.raw - b.raw : b.raw - a.raw;
    return FixedSample{saturate_raw(d, a.format), a.format};
}

/// Re-express a raw code of `from` in format `to`, rounding half away from
/// zero on narrowing and saturating into the target range.
inline FixedSample convert(std::int64_t raw, const QFormat& from, const QFormat& to) {
    const std::int64_t shifted = shift_round_half_away(raw, int(from.frac_bits) - int(to.frac_bits));
    return FixedSample{saturate_raw(shifted, to), to};
}

inline FixedSample canonical_from_raw(std::int64_t raw) {
    return FixedSample{saturate_raw(raw, kCanonical), kCanonical};
}

} // namespace algas
