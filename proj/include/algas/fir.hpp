#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "algas/errors.hpp"
#include "algas/fixed.hpp"

namespace algas {

inline constexpr std::size_t kFirTaps = 15;

/// Default smoothing set: Hamming-windowed sinc, cutoff 0.1 x sample rate,
/// normalized so the coefficients sum to 1.
inline std::array<double, kFirTaps> default_lowpass_taps() {
    std::array<double, kFirTaps> h{};
    const double fc = 0.1;
    const int center = int(kFirTaps) / 2;
    double sum = 0.0;
    for (int k = 0; k < int(kFirTaps); ++k) {
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / double(kFirTaps - 1));
        const double u = 2.0 * fc * double(k - center);
        const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
        h[std::size_t(k)] = w * sinc;
        sum += h[std::size_t(k)];
    }
    for (auto& c : h) c /= sum;
    return h;
}

/// 15-tap direct-form FIR over canonical samples. Coefficients are quantized
/// to Q1.15 at construction and never change afterwards; products accumulate
/// in a 64-bit register and narrow once, saturating, at the output bus.
class FirFilter {
public:
    explicit FirFilter(std::span<const double> coeffs) {
        if (coeffs.size() != kFirTaps) {
            throw ConfigError("fir.coefficients: expected " + std::to_string(kFirTaps) +
                              " taps, got " + std::to_string(coeffs.size()));
        }
        for (std::size_t k = 0; k < kFirTaps; ++k) {
            coeff_[k] = quantize(coeffs[k], kFirCoeff).raw;
        }
        reset();
    }

    /// Push one canonical sample, return the filtered value on the FIR
    /// output bus. delay_[0] is the newest sample.
    FixedSample step(const FixedSample& sample) {
        assert(sample.format == kCanonical);
        for (std::size_t k = kFirTaps - 1; k > 0; --k) delay_[k] = delay_[k - 1];
        delay_[0] = sample.raw;
        ++samples_seen_;

        std::int64_t acc = 0; // frac 31 = coeff frac 15 + sample frac 16
        for (std::size_t k = 0; k < kFirTaps; ++k) acc += coeff_[k] * delay_[k];
        return convert(acc, QFormat{32, 31, true}, kFirOutput);
    }

    void reset() {
        delay_.fill(0);
        samples_seen_ = 0;
    }

    std::uint64_t samples_seen() const { return samples_seen_; }

    /// True once the delay line holds a full window of real samples.
    bool warm() const { return samples_seen_ >= kFirTaps; }

    const std::array<std::int64_t, kFirTaps>& raw_coefficients() const { return coeff_; }

    /// The coefficients the filter actually applies, as reals.
    std::array<double, kFirTaps> coefficient_values() const {
        std::array<double, kFirTaps> out{};
        for (std::size_t k = 0; k < kFirTaps; ++k) {
            out[k] = FixedSample{coeff_[k], kFirCoeff}.value();
        }
        return out;
    }

private:
    std::array<std::int64_t, kFirTaps> coeff_{};
    std::array<std::int64_t, kFirTaps> delay_{};
    std::uint64_t samples_seen_ = 0;
};

} // namespace algas
