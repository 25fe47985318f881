#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "algas/errors.hpp"
#include "algas/fixed.hpp"

namespace algas {

enum class InputTerm : std::uint8_t { ExtremelyNear, Near, Middle, Far, ExtremelyFar };
enum class OutputTerm : std::uint8_t { Low, Medium, High, ExtremelyHigh };

inline constexpr std::size_t kInputTerms = 5;
inline constexpr std::size_t kOutputTerms = 4;

struct FuzzyRule {
    InputTerm lidar;
    InputTerm radar;
    OutputTerm output;
};

using RuleBase = std::array<FuzzyRule, 11>;

/// The eleven if-else rules wired into every core. Sensor pairs that agree
/// map near to high urgency and far to low; strongly disagreeing pairs are
/// deliberately uncovered (that territory belongs to the malfunction unit).
inline constexpr RuleBase default_rulebase() {
    using I = InputTerm;
    using O = OutputTerm;
    return RuleBase{{
        {I::ExtremelyNear, I::ExtremelyNear, O::ExtremelyHigh},
        {I::Near, I::ExtremelyNear, O::High},
        {I::ExtremelyNear, I::Near, O::High},
        {I::Near, I::Near, O::High},
        {I::Middle, I::Middle, O::Medium},
        {I::Far, I::Middle, O::Medium},
        {I::Far, I::Far, O::Low},
        {I::ExtremelyFar, I::Far, O::Low},
        {I::Far, I::ExtremelyFar, O::Low},
        {I::ExtremelyFar, I::ExtremelyFar, O::Low},
        {I::Middle, I::Far, O::Medium},
    }};
}

/// Real-valued shape parameters, shared by the fixed-point engine and the
/// double-precision reference so the two paths cannot drift apart.
struct FlsParams {
    std::array<double, kInputTerms> input_peaks{0.0, 0.25, 0.5, 0.75, 1.0};
    std::array<double, kOutputTerms> output_centers{0.125, 0.375, 0.625, 0.875};
};

/// Triangular membership functions with shoulders at both ends, peaks at
/// the configured breakpoints. Degrees of adjacent terms are complementary
/// by construction, so they sum to exactly one at every input code.
class MembershipPartition {
public:
    MembershipPartition(const std::array<double, kInputTerms>& peaks, int degree_frac_bits)
        : degree_frac_bits_(degree_frac_bits) {
        for (std::size_t i = 0; i < kInputTerms; ++i) {
            // Peaks are breakpoints, not samples: 1.0 maps to code 65536,
            // one past the top canonical code.
            peak_raw_[i] = std::llround(std::ldexp(peaks[i], kCanonical.frac_bits));
            if (i > 0 && peak_raw_[i] <= peak_raw_[i - 1]) {
                throw ConfigError("fls.input_peaks: must be strictly ascending");
            }
        }
    }

    /// Membership degree of every term at canonical input x, at the
    /// engine's internal degree resolution.
    std::array<std::int64_t, kInputTerms> evaluate(const FixedSample& x) const {
        assert(x.format == kCanonical);
        std::array<std::int64_t, kInputTerms> deg{};
        const std::int64_t one = degree_one();
        if (x.raw <= peak_raw_.front()) {
            deg.front() = one;
            return deg;
        }
        if (x.raw >= peak_raw_.back()) {
            deg.back() = one;
            return deg;
        }
        std::size_t k = 0;
        while (x.raw >= peak_raw_[k + 1]) ++k;
        const std::int64_t width = peak_raw_[k + 1] - peak_raw_[k];
        const std::int64_t rising = div_round_half_away((x.raw - peak_raw_[k]) * one, width);
        deg[k + 1] = rising;
        deg[k] = one - rising;
        return deg;
    }

    std::int64_t degree_one() const { return std::int64_t{1} << degree_frac_bits_; }
    int degree_frac_bits() const { return degree_frac_bits_; }

private:
    std::array<std::int64_t, kInputTerms> peak_raw_{};
    int degree_frac_bits_;
};

enum class FlsStatus : std::uint8_t { Valid, NoRuleFired, Warmup };

inline std::string_view to_string(FlsStatus s) {
    switch (s) {
        case FlsStatus::Valid: return "valid";
        case FlsStatus::NoRuleFired: return "no_rule";
        case FlsStatus::Warmup: return "warmup";
    }
    return "?";
}

struct FlsResult {
    FixedSample crisp{0, kCanonical};
    FlsStatus status{FlsStatus::Valid};
};

/// Mamdani-style controller: fuzzify both inputs, fire all rules in one
/// pass (min for AND, max to aggregate shared consequents), then take the
/// center-of-sets weighted average. All arithmetic on integer codes.
class FlsEngine {
public:
    FlsEngine(const FlsParams& params = {}, const RuleBase& rules = default_rulebase(),
              int degree_frac_bits = 16)
        : partition_(params.input_peaks, degree_frac_bits),
          rules_(rules),
          degree_frac_bits_(degree_frac_bits) {
        for (std::size_t i = 0; i < kOutputTerms; ++i) {
            center_raw_[i] = quantize(params.output_centers[i],
                                      QFormat{32, std::uint8_t(degree_frac_bits), false})
                                 .raw;
            if (i > 0 && center_raw_[i] <= center_raw_[i - 1]) {
                throw ConfigError("fls.output_centers: must be strictly ascending");
            }
        }
    }

    std::array<std::int64_t, kInputTerms> fuzzify(const FixedSample& x) const {
        return partition_.evaluate(x);
    }

    /// Aggregated activation per output term.
    std::array<std::int64_t, kOutputTerms> infer(
        const std::array<std::int64_t, kInputTerms>& lidar_deg,
        const std::array<std::int64_t, kInputTerms>& radar_deg) const {
        std::array<std::int64_t, kOutputTerms> act{};
        for (const FuzzyRule& rule : rules_) {
            const std::int64_t strength = std::min(lidar_deg[std::size_t(rule.lidar)],
                                                   radar_deg[std::size_t(rule.radar)]);
            auto& slot = act[std::size_t(rule.output)];
            if (strength > slot) slot = strength;
        }
        return act;
    }

    /// Center-of-sets: crisp = sum(w*c) / sum(w). Zero total activation
    /// reports NoRuleFired and hands back the caller-held fallback.
    FlsResult defuzzify(const std::array<std::int64_t, kOutputTerms>& activations,
                        const FixedSample& last_valid) const {
        std::int64_t num = 0;
        std::int64_t den = 0;
        for (std::size_t i = 0; i < kOutputTerms; ++i) {
            num += activations[i] * center_raw_[i];
            den += activations[i];
        }
        if (den == 0) return FlsResult{last_valid, FlsStatus::NoRuleFired};
        const std::int64_t crisp_deg = div_round_half_away(num, den);
        const QFormat internal{32, std::uint8_t(degree_frac_bits_), false};
        return FlsResult{convert(crisp_deg, internal, kCanonical), FlsStatus::Valid};
    }

    FlsResult evaluate(const FixedSample& lidar, const FixedSample& radar,
                       const FixedSample& last_valid) const {
        return defuzzify(infer(fuzzify(lidar), fuzzify(radar)), last_valid);
    }

    const MembershipPartition& partition() const { return partition_; }
    const RuleBase& rules() const { return rules_; }
    const std::array<std::int64_t, kOutputTerms>& center_raws() const { return center_raw_; }

    /// Canonical code of one output center (what a pure rule firing yields).
    FixedSample center(OutputTerm term) const {
        const QFormat internal{32, std::uint8_t(degree_frac_bits_), false};
        return convert(center_raw_[std::size_t(term)], internal, kCanonical);
    }

private:
    MembershipPartition partition_;
    RuleBase rules_;
    std::array<std::int64_t, kOutputTerms> center_raw_{};
    int degree_frac_bits_;
};

} // namespace algas
