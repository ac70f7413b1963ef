#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unireg/ase.hpp"
#include "unireg/plant.hpp"
#include "unireg/regulator.hpp"
#include "unireg/trajectory.hpp"
#include "unireg/tuners.hpp"

namespace unireg {

/// Eligibility diagnostics attached to the step on which the ASE ran.
struct AseTrace {
    AseBranch branch = AseBranch::NotFull;
    std::optional<double> omega;
    std::optional<double> xi;
    std::optional<double> draw;
};

struct EpisodeRecord {
    std::int64_t k = 0;
    double t = 0.0;
    double r = 0.0;
    double x = 0.0;
    double u = 0.0;
    double e = 0.0;
    double K = 0.0;
    double N = 0.0;
    std::optional<AseTrace> ase;
};

struct EpisodeLog {
    int episode = 1;
    std::vector<EpisodeRecord> records;
    RegulatorGains final_gains;  ///< gains in force after the last step

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
};

/// Live plant state shared by consecutive episodes of one session.
struct ClosedLoop {
    PlantParams params;
    DriftSchedule drift;
    PlantState state;
    double divergence_factor = 1e6;
    double max_reference = 0.0;
};

/// Called after every plant step with the step's record; may change the
/// gains used from the next step on.
using StepHook = std::function<void(EpisodeRecord& record, RegulatorGains& gains)>;

/// Thrown when the state leaves the divergence bound; carries the steps
/// completed so far.
class EpisodeAborted : public DivergenceError {
public:
    EpisodeAborted(const std::string& message, EpisodeLog partial)
        : DivergenceError(message), partial_(std::move(partial)) {}
    const EpisodeLog& partial() const { return partial_; }

private:
    EpisodeLog partial_;
};

/// Runs `length` closed-loop steps. Each step samples r, forms e = r - x,
/// computes u, records, then advances the plant.
EpisodeLog run_episode(ClosedLoop& loop, RegulatorGains gains, const TrajectorySpec& trajectory,
                       std::int64_t length, const StepHook& hook = {}, int episode = 1);

/// Single episode from rest (x = 0, k = 0).
EpisodeLog run_episode(const PlantParams& params, const RegulatorGains& gains,
                       const TrajectorySpec& trajectory, std::int64_t length);

/// Sum of |e| over the episode.
double cost_J(const EpisodeLog& log);

/// Sum of |e| + alpha u over the episode.
double cost_Jprime(const EpisodeLog& log, double alpha);

struct FeasibilityVerdict {
    bool output_limit_ok = false;  ///< max u < limit
    double max_u = 0.0;
    bool peak_ratio_ok = false;  ///< max u / sum |u| < gamma / steps
    double peak_ratio = 0.0;
    double peak_ratio_bound = 0.0;
    bool peak_ratio_vacuous = false;  ///< sum |u| was zero
};

FeasibilityVerdict feasibility_check(const EpisodeLog& log, double output_limit, double gamma);

/// An episode converges when mean |e| over its final quarter is below
/// `error_threshold` and neither gain moved by `gain_change_limit` or more
/// during it.
struct ConvergenceRule {
    double error_threshold = 0.02;
    double gain_change_limit = 5.0;
    double tail_fraction = 0.25;

    static ConvergenceRule from_ase(const AseConfig& cfg) {
        return {2.0 * cfg.epsilon, cfg.beta4, 0.25};
    }
};

bool episode_converged(const EpisodeLog& log, const ConvergenceRule& rule);

struct MetricsSummary {
    double mean_abs_error = 0.0;
    double rms_error = 0.0;
    double max_u = 0.0;
    double mean_u = 0.0;
    /// First episode number from which every remaining episode converges.
    std::optional<int> episodes_to_convergence;
};

/// Error and effort metrics over logs[first_log..]; convergence over all logs.
MetricsSummary summarize_metrics(const std::vector<EpisodeLog>& logs, const ConvergenceRule& rule,
                                 std::size_t first_log = 0);

enum class TuningMethod { Fixed, Gss, Gss2d, Shc, ShcAse };

std::string_view to_string(TuningMethod method);
std::optional<TuningMethod> parse_tuning_method(std::string_view name);

struct SessionConfig {
    PlantParams plant;
    DriftSchedule drift;
    double initial_state = 0.0;
    TrajectorySpec trajectory = TrajectorySpec::rectangular(100.0, 0.1);
    TuningMethod method = TuningMethod::ShcAse;
    RegulatorGains initial_gains;
    int episodes = 10;
    std::int64_t episode_length = 0;  ///< 0 selects one trajectory period
    double alpha = 1e-3;
    double output_limit = 1000.0;
    std::uint64_t seed = 0;
    AseConfig ase;
    HillClimbConfig shc{10.0, {}, 0.0, kHillClimbMaxIterations};
    /// Golden-section box over (K, N - K).
    SearchBox gss_box{{{0.0, 600.0}, 1.0}, {{0.0, 600.0}, 1.0}};
    double divergence_factor = 1e6;
    bool abort_on_unstable = false;

    std::int64_t resolved_episode_length() const;
    void validate() const;
};

struct SessionResult {
    MetricsSummary metrics;
    std::vector<EpisodeLog> logs;
    std::vector<double> episode_costs;  ///< cost_J per episode
    std::int64_t tuner_updates = 0;
    std::int64_t oracle_evaluations = 0;
    int unstable_episodes = 0;  ///< episodes ending outside the stability region
    std::optional<std::string> abort_reason;

    bool aborted() const { return abort_reason.has_value(); }
};

SessionResult run_adaptive_session(const SessionConfig& cfg);

}  // namespace unireg
