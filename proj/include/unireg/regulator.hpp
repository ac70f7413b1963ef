#pragma once

#include "unireg/plant.hpp"

namespace unireg {

/// Feedback gain K and feedforward gain N; 0 <= K <= N.
struct RegulatorGains {
    double K = 0.0;
    double N = 0.0;

    void validate() const;
    bool operator==(const RegulatorGains&) const = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Gain ranges derived from parameter uncertainty. `offset` is the
/// feedforward offset N - K; `N` is the K range shifted by `offset`.
struct GainBounds {
    Interval K;
    Interval N;
    Interval offset;
};

/// Clamped state-feedback law: u = K e + (N - K) r when e > 0, else 0.
double control_output(const RegulatorGains& gains, double error, double reference);

/// The offset N - K = (1 - a) / b that removes steady-state regulation error.
double feedforward_offset(const PlantParams& params);

struct StabilityVerdict {
    bool contraction = false;   ///< |a - bK| < 1
    bool feedback_bound = false;  ///< 0 < K < (1 + a) / b
    bool ordering = false;      ///< 0 < K <= N < inf
    double contraction_factor = 0.0;
    double k_limit = 0.0;

    bool pass() const { return contraction && feedback_bound && ordering; }
};

StabilityVerdict stability_check(const PlantParams& params, const RegulatorGains& gains);

/// Worst-case gain ranges for a in [a_lo, a_hi], b in [b_lo, b_hi].
GainBounds bounds_from_uncertainty(double a_lo, double a_hi, double b_lo, double b_hi);

}  // namespace unireg
