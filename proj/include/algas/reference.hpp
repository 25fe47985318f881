#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "algas/fls.hpp"

// Double-precision twins of the fixed-point units. Tests and the accuracy
// report compare the integer path against these; they are built from the
// same parsed parameters, never from duplicated literals.

namespace algas {

struct RefFlsResult {
    double crisp = 0.0;
    FlsStatus status = FlsStatus::Valid;
};

/// The fuzzify / min-max / center-of-sets pipeline in doubles.
class RefFls {
public:
    explicit RefFls(const FlsParams& params = {}, const RuleBase& rules = default_rulebase())
        : params_(params), rules_(rules) {}

    std::array<double, kInputTerms> fuzzify(double x) const {
        std::array<double, kInputTerms> deg{};
        const auto& p = params_.input_peaks;
        if (x <= p.front()) {
            deg.front() = 1.0;
            return deg;
        }
        if (x >= p.back()) {
            deg.back() = 1.0;
            return deg;
        }
        std::size_t k = 0;
        while (x >= p[k + 1]) ++k;
        const double rising = (x - p[k]) / (p[k + 1] - p[k]);
        deg[k + 1] = rising;
        deg[k] = 1.0 - rising;
        return deg;
    }

    RefFlsResult evaluate(double lidar, double radar) const {
        const auto ld = fuzzify(lidar);
        const auto rd = fuzzify(radar);
        std::array<double, kOutputTerms> act{};
        for (const FuzzyRule& rule : rules_) {
            const double strength =
                std::min(ld[std::size_t(rule.lidar)], rd[std::size_t(rule.radar)]);
            auto& slot = act[std::size_t(rule.output)];
            if (strength > slot) slot = strength;
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < kOutputTerms; ++i) {
            num += act[i] * params_.output_centers[i];
            den += act[i];
        }
        if (den == 0.0) return RefFlsResult{0.0, FlsStatus::NoRuleFired};
        return RefFlsResult{num / den, FlsStatus::Valid};
    }

private:
    FlsParams params_;
    RuleBase rules_;
};

/// Mean absolute error between two equal-length sample windows.
inline double ref_mae(std::span<const double> s1, std::span<const double> s2) {
    if (s1.empty() || s1.size() != s2.size()) {
        throw std::invalid_argument("ref_mae: windows must be non-empty and equal length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        sum += std::abs(s1[i] - s2[i]);
    }
    return sum / double(s1.size());
}

/// Direct convolution with zero initial state; output length equals input
/// length (the streaming view of the filter).
inline std::vector<double> ref_convolve(std::span<const double> coeffs,
                                        std::span<const double> stream) {
    std::vector<double> out(stream.size(), 0.0);
    for (std::size_t t = 0; t < stream.size(); ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < coeffs.size() && k <= t; ++k) {
            acc += coeffs[k] * stream[t - k];
        }
        out[t] = acc;
    }
    return out;
}

} // namespace algas
