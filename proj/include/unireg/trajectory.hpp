#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unireg {

enum class TrajectoryKind { Rectangular, Versine, RandomSteps, RandomVersine, Arbitrary };

std::string_view to_string(TrajectoryKind kind);
std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name);

/// Reference-signal description. All kinds are pure functions of the step
/// index; the random kinds draw one amplitude per segment of length tau.
///
/// The Heaviside step uses H(0) = 0, so the rectangular wave starts at 0.
class TrajectorySpec {
public:
    static TrajectorySpec rectangular(double period, double sample_period, double amplitude = 1.0);
    static TrajectorySpec versine(double period, double sample_period, double amplitude = 1.0,
                                  bool normalized = false);
    static TrajectorySpec random_steps(double period, double sample_period, double amplitude,
                                       std::uint64_t seed);
    static TrajectorySpec random_versine(double period, double sample_period, double amplitude,
                                         std::uint64_t seed, bool normalized = false);
    static TrajectorySpec arbitrary(std::vector<double> samples, double sample_period);

    TrajectoryKind kind() const { return kind_; }
    double period() const { return period_; }
    double sample_period() const { return sample_period_; }
    double amplitude() const { return amplitude_; }
    std::uint64_t seed() const { return seed_; }
    bool normalized() const { return normalized_; }
    const std::vector<double>& samples() const { return samples_; }

    /// Steps per period (tau / T), when that ratio is an integer.
    std::optional<std::int64_t> integer_period_steps() const;

    /// Natural episode length: one period, or the sample count for arbitrary.
    std::int64_t default_episode_length() const;

    double operator()(std::int64_t k) const;

    /// Amplitude of random segment n, uniform on [0, amplitude].
    double segment_amplitude(std::int64_t n) const;

    /// Phase of step k within its period, in [0, 1). Exact when tau / T is an integer.
    double phase(std::int64_t k) const;

    /// Segment owning step k: segment n covers n L < k <= (n + 1) L with
    /// L = tau / T, which is the H(0) = 0 reading of the Heaviside window.
    /// Returns -1 for k <= 0.
    std::int64_t segment_index(std::int64_t k) const;

    /// 1 - cos(2 pi phase), halved when normalized.
    double versine_shape(std::int64_t k) const;

private:
    TrajectorySpec() = default;
    void validate() const;

    TrajectoryKind kind_ = TrajectoryKind::Rectangular;
    double period_ = 1.0;
    double sample_period_ = 1.0;
    double amplitude_ = 1.0;
    std::uint64_t seed_ = 0;
    bool normalized_ = false;
    std::vector<double> samples_;
};

double rectangular(const TrajectorySpec& spec, std::int64_t k);
double versine(const TrajectorySpec& spec, std::int64_t k);
double random_steps(const TrajectorySpec& spec, std::int64_t k);
double random_versine(const TrajectorySpec& spec, std::int64_t k);
double arbitrary(const TrajectorySpec& spec, std::int64_t k);

}  // namespace unireg
