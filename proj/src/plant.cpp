#include "unireg/plant.hpp"

#include <cmath>
#include <string>

#include "unireg/common.hpp"

namespace unireg {

void PlantParams::validate() const {
    require_finite(a, "a");
    require_finite(b, "b");
    require_finite(c, "c");
    require_finite(f, "f");
    require_finite(T, "T");
    require(std::abs(a) < 1.0, "plant is not passive: |a| must be < 1");
    require(std::abs(f) < 1.0, "plant is not passive: |f| must be < 1");
    require(b > 0.0, "input gain b must be > 0");
    require(T > 0.0, "sampling period T must be > 0");
}

PlantState plant_step(const PlantParams& params, const PlantState& state, double u) {
    require_finite(u, "u");
    require_finite(state.x, "x");
    require(u >= 0.0, "plant input must be nonnegative (unidirectional)");

    const double next = u > 0.0 ? params.a * state.x + params.b * u : params.f * state.x;
    if (!std::isfinite(next)) {
        throw DivergenceError("plant state became non-finite at step " + std::to_string(state.k));
    }
    return PlantState{next, state.k + 1};
}

double plant_output(const PlantParams& params, const PlantState& state) {
    return params.c * state.x;
}

PlantParams apply_drift(const PlantParams& params, const DriftSchedule& schedule, std::int64_t k) {
    if (!schedule.active) {
        return params;
    }
    PlantParams drifted = params;
    drifted.a = params.a + static_cast<double>(k) * schedule.a_rate;
    drifted.b = params.b + static_cast<double>(k) * schedule.b_rate;
    if (!(std::abs(drifted.a) < 1.0) || !(drifted.b > 0.0)) {
        throw DivergenceError("drift left the passive region at step " + std::to_string(k));
    }
    return drifted;
}

}  // namespace unireg
