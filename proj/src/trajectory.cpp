#include "unireg/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "unireg/common.hpp"

namespace unireg {

namespace {

constexpr double kIntegerTolerance = 1e-9;

void require_kind(const TrajectorySpec& spec, TrajectoryKind kind) {
    require(spec.kind() == kind, "trajectory kind mismatch: expected " +
                                     std::string(to_string(kind)) + ", got " +
                                     std::string(to_string(spec.kind())));
}

}  // namespace

std::string_view to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::Rectangular: return "rectangular";
        case TrajectoryKind::Versine: return "versine";
        case TrajectoryKind::RandomSteps: return "random-steps";
        case TrajectoryKind::RandomVersine: return "random-versine";
        case TrajectoryKind::Arbitrary: return "arbitrary";
    }
    return "unknown";
}

std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name) {
    for (auto kind : {TrajectoryKind::Rectangular, TrajectoryKind::Versine,
                      TrajectoryKind::RandomSteps, TrajectoryKind::RandomVersine,
                      TrajectoryKind::Arbitrary}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

TrajectorySpec TrajectorySpec::rectangular(double period, double sample_period, double amplitude) {
    TrajectorySpec spec;
    spec.kind_ = TrajectoryKind::Rectangular;
    spec.period_ = period;
    spec.sample_period_ = sample_period;
    spec.amplitude_ = amplitude;
    spec.validate();
    return spec;
}

TrajectorySpec TrajectorySpec::versine(double period, double sample_period, double amplitude,
                                       bool normalized) {
    TrajectorySpec spec;
    spec.kind_ = TrajectoryKind::Versine;
    spec.period_ = period;
    spec.sample_period_ = sample_period;
    spec.amplitude_ = amplitude;
    spec.normalized_ = normalized;
    spec.validate();
    return spec;
}

TrajectorySpec TrajectorySpec::random_steps(double period, double sample_period, double amplitude,
                                            std::uint64_t seed) {
    TrajectorySpec spec;
    spec.kind_ = TrajectoryKind::RandomSteps;
    spec.period_ = period;
    spec.sample_period_ = sample_period;
    spec.amplitude_ = amplitude;
    spec.seed_ = seed;
    spec.validate();
    return spec;
}

TrajectorySpec TrajectorySpec::random_versine(double period, double sample_period,
                                              double amplitude, std::uint64_t seed,
                                              bool normalized) {
    TrajectorySpec spec;
    spec.kind_ = TrajectoryKind::RandomVersine;
    spec.period_ = period;
    spec.sample_period_ = sample_period;
    spec.amplitude_ = amplitude;
    spec.seed_ = seed;
    spec.normalized_ = normalized;
    spec.validate();
    return spec;
}

TrajectorySpec TrajectorySpec::arbitrary(std::vector<double> samples, double sample_period) {
    require(!samples.empty(), "arbitrary trajectory needs at least one sample");
    TrajectorySpec spec;
    spec.kind_ = TrajectoryKind::Arbitrary;
    spec.sample_period_ = sample_period;
    spec.period_ = sample_period * static_cast<double>(samples.size());
    spec.amplitude_ = 0.0;
    for (double v : samples) {
        require_finite(v, "trajectory sample");
        spec.amplitude_ = std::max(spec.amplitude_, std::abs(v));
    }
    spec.samples_ = std::move(samples);
    spec.validate();
    return spec;
}

void TrajectorySpec::validate() const {
    require_finite(period_, "period");
    require_finite(sample_period_, "sample period");
    require_finite(amplitude_, "amplitude");
    require(period_ > 0.0, "trajectory period must be > 0");
    require(sample_period_ > 0.0, "sample period must be > 0");
    require(amplitude_ >= 0.0, "trajectory amplitude must be >= 0");
}

std::optional<std::int64_t> TrajectorySpec::integer_period_steps() const {
    const double steps = period_ / sample_period_;
    const double rounded = std::round(steps);
    if (rounded >= 1.0 && std::abs(steps - rounded) <= kIntegerTolerance * std::max(1.0, steps)) {
        return static_cast<std::int64_t>(rounded);
    }
    return std::nullopt;
}

std::int64_t TrajectorySpec::default_episode_length() const {
    if (kind_ == TrajectoryKind::Arbitrary) {
        return static_cast<std::int64_t>(samples_.size());
    }
    if (auto steps = integer_period_steps()) {
        return *steps;
    }
    return std::max<std::int64_t>(1, std::llround(period_ / sample_period_));
}

double TrajectorySpec::phase(std::int64_t k) const {
    if (auto steps = integer_period_steps()) {
        const std::int64_t m = ((k % *steps) + *steps) % *steps;
        return static_cast<double>(m) / static_cast<double>(*steps);
    }
    const double cycles = static_cast<double>(k) * sample_period_ / period_;
    return cycles - std::floor(cycles);
}

std::int64_t TrajectorySpec::segment_index(std::int64_t k) const {
    if (k <= 0) {
        return -1;
    }
    // Segment n covers n*L < k <= (n+1)*L.
    if (auto steps = integer_period_steps()) {
        return (k - 1) / *steps;
    }
    const double position = static_cast<double>(k) * sample_period_ / period_;
    return static_cast<std::int64_t>(std::ceil(position)) - 1;
}

double TrajectorySpec::segment_amplitude(std::int64_t n) const {
    const std::uint64_t bits = derive_seed(seed_, static_cast<std::uint64_t>(n));
    const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return amplitude_ * unit;
}

double TrajectorySpec::versine_shape(std::int64_t k) const {
    const double raw = 1.0 - std::cos(2.0 * std::numbers::pi * phase(k));
    return normalized_ ? raw / 2.0 : raw;
}

double TrajectorySpec::operator()(std::int64_t k) const {
    switch (kind_) {
        case TrajectoryKind::Rectangular: return unireg::rectangular(*this, k);
        case TrajectoryKind::Versine: return unireg::versine(*this, k);
        case TrajectoryKind::RandomSteps: return unireg::random_steps(*this, k);
        case TrajectoryKind::RandomVersine: return unireg::random_versine(*this, k);
        case TrajectoryKind::Arbitrary: return unireg::arbitrary(*this, k);
    }
    return 0.0;
}

double rectangular(const TrajectorySpec& spec, std::int64_t k) {
    require_kind(spec, TrajectoryKind::Rectangular);
    // H(sin(2 pi phase)) is 1 exactly on the open first half of each period.
    const double phase = spec.phase(k);
    return (phase > 0.0 && phase < 0.5) ? spec.amplitude() : 0.0;
}

double versine(const TrajectorySpec& spec, std::int64_t k) {
    require_kind(spec, TrajectoryKind::Versine);
    return spec.amplitude() * spec.versine_shape(k);
}

double random_steps(const TrajectorySpec& spec, std::int64_t k) {
    require_kind(spec, TrajectoryKind::RandomSteps);
    const std::int64_t n = spec.segment_index(k);
    return n < 0 ? 0.0 : spec.segment_amplitude(n);
}

double random_versine(const TrajectorySpec& spec, std::int64_t k) {
    require_kind(spec, TrajectoryKind::RandomVersine);
    const std::int64_t n = spec.segment_index(k);
    return n < 0 ? 0.0 : spec.segment_amplitude(n) * spec.versine_shape(k);
}

double arbitrary(const TrajectorySpec& spec, std::int64_t k) {
    require_kind(spec, TrajectoryKind::Arbitrary);
    const auto& samples = spec.samples();
    if (k <= 0) {
        return samples.front();
    }
    const auto index = static_cast<std::size_t>(k);
    return index < samples.size() ? samples[index] : samples.back();
}

}  // namespace unireg
