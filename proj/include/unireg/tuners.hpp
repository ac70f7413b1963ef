#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "unireg/common.hpp"
#include "unireg/regulator.hpp"

namespace unireg {

/// Counts every evaluation of a wrapped cost function and rejects
/// non-finite results.
class CostOracle {
public:
    using Function = std::function<double(std::span<const double>)>;

    explicit CostOracle(Function fn) : fn_(std::move(fn)) {}

    double operator()(std::span<const double> point);
    double operator()(double x) { return (*this)(std::span<const double>(&x, 1)); }
    double operator()(double x, double y) {
        const double point[2] = {x, y};
        return (*this)(std::span<const double>(point, 2));
    }

    std::int64_t evaluations() const { return evaluations_; }

private:
    Function fn_;
    std::int64_t evaluations_ = 0;
};

struct SearchInterval {
    Interval range;
    double tolerance = 1e-4;

    void validate() const;
};

struct SearchBox {
    SearchInterval x;
    SearchInterval y;

    void validate() const;
};

inline constexpr std::int64_t kGoldenSectionMaxIterations = 1'000'000;
inline constexpr std::int64_t kHillClimbMaxIterations = 100'000;

/// Distribution of the random step multiplier; must have positive mean.
struct StepDistribution {
    double lo = 0.0;
    double hi = 1.0;

    double draw(Rng& rng) const { return lo + (hi - lo) * rng.uniform(); }
    double mean() const { return 0.5 * (lo + hi); }
};

struct HillClimbConfig {
    double step = 0.1;
    StepDistribution distribution;
    double threshold = 0.0;
    std::int64_t max_iterations = kHillClimbMaxIterations;

    void validate() const;
};

struct GoldenSectionBracket {
    Interval bracket;  ///< final bracket, width <= tolerance
    std::int64_t iterations = 0;
};

/// Golden-section bracket shrinking on one interval. Two oracle calls per
/// loop iteration.
GoldenSectionBracket golden_section_bracket(CostOracle& oracle, const SearchInterval& interval,
                                            std::int64_t max_iterations = kGoldenSectionMaxIterations);

/// Golden-section minimization on one interval; returns the midpoint of
/// the final bracket.
double golden_section_1d(CostOracle& oracle, const SearchInterval& interval,
                         std::int64_t max_iterations = kGoldenSectionMaxIterations);

/// Alternating-coordinate golden-section minimization of f(x, y).
/// x' and y' start at their interval midpoints.
std::pair<double, double> golden_section_2d(
    CostOracle& oracle, const SearchBox& box,
    std::int64_t max_iterations = kGoldenSectionMaxIterations);

/// The 2n points point +/- step along each axis, ordered +e1, -e1, +e2, -e2, ...
std::vector<std::vector<double>> shc_neighbors(std::span<const double> point, double step);

/// Offline stochastic hill climbing toward the maximum of `objective`.
std::vector<double> shc_offline_maximize(CostOracle& objective, std::span<const double> start,
                                         const HillClimbConfig& cfg, Rng& rng);

/// Offline stochastic hill climbing on the negated cost.
std::vector<double> shc_offline_minimize(CostOracle& cost, std::span<const double> start,
                                         const HillClimbConfig& cfg, Rng& rng);

/// One online hill-climbing update toward the best of the current point and
/// its neighbors: 2n + 1 oracle calls, one random draw.
std::vector<double> shc_online_step_maximize(CostOracle& objective,
                                             std::span<const double> current,
                                             const HillClimbConfig& cfg, Rng& rng);

std::vector<double> shc_online_step_minimize(CostOracle& cost, std::span<const double> current,
                                             const HillClimbConfig& cfg, Rng& rng);

}  // namespace unireg
