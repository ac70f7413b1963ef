#include "unireg/tuners.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace unireg {

namespace {

const double kInverseGoldenRatio = 1.0 / std::numbers::phi;

CostOracle negated(CostOracle& oracle) {
    return CostOracle([&oracle](std::span<const double> p) { return -oracle(p); });
}

}  // namespace

double CostOracle::operator()(std::span<const double> point) {
    ++evaluations_;
    const double value = fn_(point);
    if (!std::isfinite(value)) {
        throw std::runtime_error("cost oracle returned a non-finite value");
    }
    return value;
}

void SearchInterval::validate() const {
    require_finite(range.lo, "interval lower bound");
    require_finite(range.hi, "interval upper bound");
    require(range.lo < range.hi, "search interval needs lower < upper");
    require(tolerance > 0.0, "search tolerance must be > 0");
}

void SearchBox::validate() const {
    x.validate();
    y.validate();
}

void HillClimbConfig::validate() const {
    require(step > 0.0, "hill-climbing step must be > 0");
    require(threshold >= 0.0, "hill-climbing threshold must be >= 0");
    require(distribution.mean() > 0.0, "step distribution must have a positive mean");
    require(max_iterations > 0, "iteration cap must be > 0");
}

GoldenSectionBracket golden_section_bracket(CostOracle& oracle, const SearchInterval& interval,
                                            std::int64_t max_iterations) {
    interval.validate();
    double a = interval.range.lo;
    double b = interval.range.hi;
    double width = b - a;
    std::int64_t iterations = 0;
    while (width > interval.tolerance) {
        if (iterations == max_iterations) {
            throw IterationLimitError("golden-section search exceeded " +
                                      std::to_string(max_iterations) + " iterations");
        }
        ++iterations;
        const double low = b - kInverseGoldenRatio * width;
        const double high = a + kInverseGoldenRatio * width;
        if (oracle(low) < oracle(high)) {
            b = high;
        } else {
            a = low;
        }
        width = b - a;
    }
    return {{a, b}, iterations};
}

double golden_section_1d(CostOracle& oracle, const SearchInterval& interval,
                         std::int64_t max_iterations) {
    const auto result = golden_section_bracket(oracle, interval, max_iterations);
    return 0.5 * (result.bracket.lo + result.bracket.hi);
}

std::pair<double, double> golden_section_2d(CostOracle& oracle, const SearchBox& box,
                                            std::int64_t max_iterations) {
    box.validate();
    double xa = box.x.range.lo, xb = box.x.range.hi;
    double ya = box.y.range.lo, yb = box.y.range.hi;
    double dx = xb - xa;
    double dy = yb - ya;
    double x_best = 0.5 * (xa + xb);
    double y_best = 0.5 * (ya + yb);

    std::int64_t iterations = 0;
    while (dx > box.x.tolerance || dy > box.y.tolerance) {
        if (++iterations > max_iterations) {
            throw IterationLimitError("2-D golden-section search exceeded " +
                                      std::to_string(max_iterations) + " iterations");
        }
        if (dx > box.x.tolerance) {
            const double low = xb - kInverseGoldenRatio * dx;
            const double high = xa + kInverseGoldenRatio * dx;
            if (oracle(low, y_best) < oracle(high, y_best)) {
                xb = high;
                x_best = low;
            } else {
                xa = low;
                x_best = high;
            }
        }
        if (dy > box.y.tolerance) {
            const double low = yb - kInverseGoldenRatio * dy;
            const double high = ya + kInverseGoldenRatio * dy;
            if (oracle(x_best, low) < oracle(x_best, high)) {
                yb = high;
                y_best = low;
            } else {
                ya = low;
                y_best = high;
            }
        }
        dx = xb - xa;
        dy = yb - ya;
    }
    return {x_best, y_best};
}

std::vector<std::vector<double>> shc_neighbors(std::span<const double> point, double step) {
    require(step > 0.0, "neighborhood step must be > 0");
    std::vector<std::vector<double>> neighbors;
    neighbors.reserve(2 * point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> y(point.begin(), point.end());
            y[i] += sign * step;
            neighbors.push_back(std::move(y));
        }
    }
    return neighbors;
}

std::vector<double> shc_offline_maximize(CostOracle& objective, std::span<const double> start,
                                         const HillClimbConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<double> x(start.begin(), start.end());
    double improvement = std::numeric_limits<double>::infinity();
    std::int64_t iterations = 0;
    while (improvement > cfg.threshold) {
        if (++iterations > cfg.max_iterations) {
            throw IterationLimitError("stochastic hill climbing exceeded " +
                                      std::to_string(cfg.max_iterations) + " iterations");
        }
        const double current_value = objective(x);
        std::vector<double> best = x;
        double best_value = current_value;
        for (auto& z : shc_neighbors(x, cfg.step)) {
            const double value = objective(z);
            if (value > best_value) {
                best_value = value;
                best = std::move(z);
            }
        }
        improvement = best_value - current_value;
        const double r = cfg.distribution.draw(rng);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += r * (best[i] - x[i]);
        }
    }
    return x;
}

std::vector<double> shc_offline_minimize(CostOracle& cost, std::span<const double> start,
                                         const HillClimbConfig& cfg, Rng& rng) {
    CostOracle reward = negated(cost);
    return shc_offline_maximize(reward, start, cfg, rng);
}

std::vector<double> shc_online_step_maximize(CostOracle& objective,
                                             std::span<const double> current,
                                             const HillClimbConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<double> best(current.begin(), current.end());
    double best_value = objective(current);
    for (auto& z : shc_neighbors(current, cfg.step)) {
        const double value = objective(z);
        if (value > best_value) {
            best_value = value;
            best = std::move(z);
        }
    }
    const double r = cfg.distribution.draw(rng);
    std::vector<double> next(current.begin(), current.end());
    for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] += r * (best[i] - next[i]);
    }
    return next;
}

std::vector<double> shc_online_step_minimize(CostOracle& cost, std::span<const double> current,
                                             const HillClimbConfig& cfg, Rng& rng) {
    CostOracle reward = negated(cost);
    return shc_online_step_maximize(reward, current, cfg, rng);
}

}  // namespace unireg
