#pragma once

#include <cstdint>

#include "unireg/common.hpp"

namespace unireg {

/// First-order passive unidirectional plant.
///
///   x(k+1) = a x(k) + b u(k)   if u(k) > 0
///   x(k+1) = f x(k)            if u(k) = 0
///   y      = c x(k)
struct PlantParams {
    double a = 0.98195;     ///< driven-branch state coefficient
    double b = 0.00042345;  ///< input gain, > 0
    double c = 1.0;         ///< output gain
    double f = 0.98195;     ///< dissipation coefficient
    double T = 0.1;         ///< sampling period [s]

    /// Throws std::invalid_argument unless |a| < 1, |f| < 1, b > 0, T > 0.
    void validate() const;
};

struct PlantState {
    double x = 0.0;
    std::int64_t k = 0;
};

/// Linear per-step ramp on a and b.
struct DriftSchedule {
    double a_rate = 0.0;
    double b_rate = 0.0;
    bool active = false;
};

PlantState plant_step(const PlantParams& params, const PlantState& state, double u);

double plant_output(const PlantParams& params, const PlantState& state);

/// Parameters after k steps of drift. Throws DivergenceError if the ramp
/// leaves the passive region.
PlantParams apply_drift(const PlantParams& params, const DriftSchedule& schedule, std::int64_t k);

}  // namespace unireg
