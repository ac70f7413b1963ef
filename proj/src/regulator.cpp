#include "unireg/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unireg/common.hpp"

namespace unireg {

void RegulatorGains::validate() const {
    require_finite(K, "K");
    require_finite(N, "N");
    require(K >= 0.0, "feedback gain K must be >= 0");
    require(N >= 0.0, "feedforward gain N must be >= 0");
    require(N >= K, "gains must satisfy N >= K");
}

double control_output(const RegulatorGains& gains, double error, double reference) {
    require_finite(gains.K, "K");
    require_finite(gains.N, "N");
    require_finite(error, "error");
    require_finite(reference, "reference");
    if (!(error > 0.0)) {
        return 0.0;
    }
    // A negative reference can push the driven branch below zero.
    return std::max(0.0, gains.K * error + (gains.N - gains.K) * reference);
}

double feedforward_offset(const PlantParams& params) {
    require(params.b > 0.0, "input gain b must be > 0");
    return (1.0 - params.a) / params.b;
}

StabilityVerdict stability_check(const PlantParams& params, const RegulatorGains& gains) {
    StabilityVerdict verdict;
    verdict.contraction_factor = params.a - params.b * gains.K;
    verdict.k_limit = (1.0 + params.a) / params.b;
    verdict.contraction = std::abs(verdict.contraction_factor) < 1.0;
    verdict.feedback_bound = gains.K > 0.0 && gains.K < verdict.k_limit;
    verdict.ordering = gains.K > 0.0 && gains.K <= gains.N && std::isfinite(gains.N);
    return verdict;
}

GainBounds bounds_from_uncertainty(double a_lo, double a_hi, double b_lo, double b_hi) {
    for (double v : {a_lo, a_hi, b_lo, b_hi}) {
        require_finite(v, "uncertainty bound");
    }
    require(a_lo <= a_hi, "a interval is malformed (a_lo > a_hi)");
    require(b_lo <= b_hi, "b interval is malformed (b_lo > b_hi)");
    require(a_lo > -1.0 && a_hi < 1.0, "a interval leaves the passive region");
    require(b_lo > 0.0, "b interval must be strictly positive");

    GainBounds bounds;
    bounds.K = {0.0, (1.0 + a_lo) / b_hi};
    bounds.offset = {(1.0 - a_hi) / b_hi, (1.0 - a_lo) / b_lo};
    bounds.N = {bounds.K.lo + bounds.offset.lo, bounds.K.hi + bounds.offset.hi};
    return bounds;
}

}  // namespace unireg
