#include "unireg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace unireg {

namespace {

std::string describe(const EpisodeRecord& rec) {
    std::ostringstream out;
    out.precision(17);
    out << "k=" << rec.k << " t=" << rec.t << " r=" << rec.r << " x=" << rec.x << " u=" << rec.u
        << " e=" << rec.e << " K=" << rec.K << " N=" << rec.N;
    return out.str();
}

/// Stops a tuner once the session's episode budget is spent.
struct BudgetExhausted {};

}  // namespace

EpisodeLog run_episode(ClosedLoop& loop, RegulatorGains gains, const TrajectorySpec& trajectory,
                       std::int64_t length, const StepHook& hook, int episode) {
    require(length >= 1, "episode length must be >= 1");
    EpisodeLog log;
    log.episode = episode;
    log.records.reserve(static_cast<std::size_t>(length));

    for (std::int64_t step = 0; step < length; ++step) {
        EpisodeRecord rec;
        rec.k = loop.state.k;
        rec.t = static_cast<double>(rec.k) * loop.params.T;
        rec.r = trajectory(rec.k);
        rec.x = loop.state.x;
        rec.e = rec.r - rec.x;
        rec.K = gains.K;
        rec.N = gains.N;
        rec.u = control_output(gains, rec.e, rec.r);
        loop.max_reference = std::max(loop.max_reference, std::abs(rec.r));

        PlantState next;
        try {
            next = plant_step(apply_drift(loop.params, loop.drift, rec.k), loop.state, rec.u);
        } catch (const DivergenceError& err) {
            throw EpisodeAborted(std::string(err.what()) + "; last valid record: " +
                                     (log.empty() ? describe(rec) : describe(log.records.back())),
                                 log);
        }
        const double bound = loop.divergence_factor * std::max(loop.max_reference, 1.0);
        if (std::abs(next.x) > bound) {
            log.records.push_back(rec);
            throw EpisodeAborted("state diverged (|x| > " + std::to_string(bound) +
                                     ") after record " + describe(rec),
                                 log);
        }
        loop.state = next;
        if (hook) {
            hook(rec, gains);
        }
        log.records.push_back(rec);
    }
    log.final_gains = gains;
    return log;
}

EpisodeLog run_episode(const PlantParams& params, const RegulatorGains& gains,
                       const TrajectorySpec& trajectory, std::int64_t length) {
    params.validate();
    gains.validate();
    ClosedLoop loop{params, {}, {}, 1e6, 0.0};
    return run_episode(loop, gains, trajectory, length);
}

double cost_J(const EpisodeLog& log) {
    return cost_Jprime(log, 0.0);
}

double cost_Jprime(const EpisodeLog& log, double alpha) {
    require(alpha >= 0.0, "cost weight alpha must be >= 0");
    double total = 0.0;
    for (const auto& rec : log.records) {
        total += std::abs(rec.e) + alpha * rec.u;
    }
    return total;
}

FeasibilityVerdict feasibility_check(const EpisodeLog& log, double output_limit, double gamma) {
    require(!log.empty(), "feasibility check needs a nonempty log");
    FeasibilityVerdict verdict;
    double total = 0.0;
    for (const auto& rec : log.records) {
        verdict.max_u = std::max(verdict.max_u, rec.u);
        total += std::abs(rec.u);
    }
    verdict.output_limit_ok = verdict.max_u < output_limit;
    verdict.peak_ratio_bound = gamma / static_cast<double>(log.size());
    if (total == 0.0) {
        verdict.peak_ratio_vacuous = true;
        verdict.peak_ratio_ok = true;
        return verdict;
    }
    verdict.peak_ratio = verdict.max_u / total;
    verdict.peak_ratio_ok = verdict.peak_ratio < verdict.peak_ratio_bound;
    return verdict;
}

bool episode_converged(const EpisodeLog& log, const ConvergenceRule& rule) {
    if (log.empty()) {
        return false;
    }
    const auto n = log.size();
    const auto tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(rule.tail_fraction * static_cast<double>(n))));
    double tail_error = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) {
        tail_error += std::abs(log.records[i].e);
    }
    tail_error /= static_cast<double>(tail);

    const auto [k_min, k_max] = std::minmax_element(
        log.records.begin(), log.records.end(),
        [](const EpisodeRecord& a, const EpisodeRecord& b) { return a.K < b.K; });
    const auto [n_min, n_max] = std::minmax_element(
        log.records.begin(), log.records.end(),
        [](const EpisodeRecord& a, const EpisodeRecord& b) { return a.N < b.N; });
    return tail_error < rule.error_threshold && (k_max->K - k_min->K) < rule.gain_change_limit &&
           (n_max->N - n_min->N) < rule.gain_change_limit;
}

MetricsSummary summarize_metrics(const std::vector<EpisodeLog>& logs, const ConvergenceRule& rule,
                                 std::size_t first_log) {
    require(!logs.empty(), "metrics need at least one episode");
    MetricsSummary summary;
    double abs_sum = 0.0, sq_sum = 0.0, u_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = std::min(first_log, logs.size()); i < logs.size(); ++i) {
        for (const auto& rec : logs[i].records) {
            abs_sum += std::abs(rec.e);
            sq_sum += rec.e * rec.e;
            u_sum += rec.u;
            summary.max_u = std::max(summary.max_u, rec.u);
            ++count;
        }
    }
    if (count > 0) {
        summary.mean_abs_error = abs_sum / static_cast<double>(count);
        summary.rms_error = std::sqrt(sq_sum / static_cast<double>(count));
        summary.mean_u = u_sum / static_cast<double>(count);
    }

    std::optional<int> converged_from;
    for (std::size_t i = logs.size(); i-- > 0;) {
        if (!episode_converged(logs[i], rule)) {
            break;
        }
        converged_from = logs[i].episode;
    }
    summary.episodes_to_convergence = converged_from;
    return summary;
}

std::string_view to_string(TuningMethod method) {
    switch (method) {
        case TuningMethod::Fixed: return "fixed";
        case TuningMethod::Gss: return "gss";
        case TuningMethod::Gss2d: return "gss2d";
        case TuningMethod::Shc: return "shc";
        case TuningMethod::ShcAse: return "shc-ase";
    }
    return "unknown";
}

std::optional<TuningMethod> parse_tuning_method(std::string_view name) {
    for (auto method : {TuningMethod::Fixed, TuningMethod::Gss, TuningMethod::Gss2d,
                        TuningMethod::Shc, TuningMethod::ShcAse}) {
        if (to_string(method) == name) {
            return method;
        }
    }
    return std::nullopt;
}

std::int64_t SessionConfig::resolved_episode_length() const {
    return episode_length > 0 ? episode_length : trajectory.default_episode_length();
}

void SessionConfig::validate() const {
    plant.validate();
    initial_gains.validate();
    require_finite(initial_state, "initial state");
    require(episodes >= 1, "episode count must be >= 1");
    require(episode_length >= 0, "episode length must be >= 1 (or 0 for one period)");
    require(alpha >= 0.0, "cost weight alpha must be >= 0");
    require(output_limit > 0.0, "output limit must be > 0");
    require(divergence_factor > 0.0, "divergence factor must be > 0");
    ase.validate();
    shc.validate();
    gss_box.validate();
    require(gss_box.x.range.lo >= 0.0 && gss_box.y.range.lo >= 0.0,
            "golden-section box must lie in the nonnegative quadrant");
}

namespace {

class Session {
public:
    explicit Session(const SessionConfig& cfg)
        : cfg_(cfg),
          length_(cfg.resolved_episode_length()),
          loop_{cfg.plant, cfg.drift, {cfg.initial_state, 0}, cfg.divergence_factor, 0.0},
          gains_(cfg.initial_gains),
          ase_rng_(derive_seed(cfg.seed, 1)),
          tuner_rng_(derive_seed(cfg.seed, 2)) {}

    SessionResult run() {
        try {
            switch (cfg_.method) {
                case TuningMethod::Fixed: run_fixed(); break;
                case TuningMethod::Gss: run_gss(); break;
                case TuningMethod::Gss2d: run_gss2d(); break;
                case TuningMethod::Shc: run_shc(); break;
                case TuningMethod::ShcAse: run_ase(); break;
            }
        } catch (const EpisodeAborted& err) {
            result_.abort_reason = err.what();
            if (!err.partial().empty()) {
                result_.logs.push_back(err.partial());
            }
        }
        if (!result_.logs.empty()) {
            result_.metrics =
                summarize_metrics(result_.logs, ConvergenceRule::from_ase(cfg_.ase));
        }
        return std::move(result_);
    }

private:
    bool budget_left() const { return static_cast<int>(result_.logs.size()) < cfg_.episodes; }

    /// Runs one episode with fixed gains and records it.
    const EpisodeLog& episode(const RegulatorGains& gains, const StepHook& hook = {}) {
        const int index = static_cast<int>(result_.logs.size()) + 1;
        result_.logs.push_back(run_episode(loop_, gains, cfg_.trajectory, length_, hook, index));
        const auto& log = result_.logs.back();
        result_.episode_costs.push_back(cost_J(log));
        check_stability(log.final_gains);
        return log;
    }

    void check_stability(const RegulatorGains& gains) {
        const auto verdict = stability_check(loop_.params, gains);
        if (!verdict.contraction) {
            ++result_.unstable_episodes;
            if (cfg_.abort_on_unstable) {
                throw EpisodeAborted("gains left the stability region: |a - bK| = " +
                                         std::to_string(std::abs(verdict.contraction_factor)),
                                     EpisodeLog{});
            }
        }
    }

    /// Scores a candidate (K, N - K) with one live episode.
    double candidate_cost(double feedback, double offset) {
        if (!budget_left()) {
            throw BudgetExhausted{};
        }
        ++result_.oracle_evaluations;
        const RegulatorGains candidate{std::max(0.0, feedback),
                                       std::max(0.0, feedback) + std::max(0.0, offset)};
        return cost_Jprime(episode(candidate), cfg_.alpha);
    }

    void hold_remaining() {
        while (budget_left()) {
            episode(gains_);
        }
    }

    void run_fixed() { hold_remaining(); }

    void run_gss() {
        const double feedback = gains_.K;
        CostOracle oracle([&](std::span<const double> p) { return candidate_cost(feedback, p[0]); });
        try {
            const double offset = golden_section_1d(oracle, cfg_.gss_box.y);
            gains_ = {feedback, feedback + offset};
            ++result_.tuner_updates;
        } catch (const BudgetExhausted&) {
            return;
        }
        hold_remaining();
    }

    void run_gss2d() {
        CostOracle oracle([&](std::span<const double> p) { return candidate_cost(p[0], p[1]); });
        try {
            const auto [feedback, offset] = golden_section_2d(oracle, cfg_.gss_box);
            gains_ = {feedback, feedback + offset};
            ++result_.tuner_updates;
        } catch (const BudgetExhausted&) {
            return;
        }
        hold_remaining();
    }

    void run_shc() {
        CostOracle oracle([&](std::span<const double> p) { return candidate_cost(p[0], p[1]); });
        std::vector<double> point{gains_.K, gains_.N - gains_.K};
        try {
            while (true) {
                point = shc_online_step_minimize(oracle, point, cfg_.shc, tuner_rng_);
                point[0] = std::max(0.0, point[0]);
                point[1] = std::max(0.0, point[1]);
                gains_ = {point[0], point[0] + point[1]};
                ++result_.tuner_updates;
            }
        } catch (const BudgetExhausted&) {
        }
    }

    void run_ase() {
        AseBuffers buffers(cfg_.ase.capacity);
        const StepHook hook = [&](EpisodeRecord& rec, RegulatorGains& gains) {
            buffers.push(rec.r, rec.e);
            if (!buffers.full()) {
                return;
            }
            const AseDecision decision = ase_evaluate(buffers, gains, cfg_.ase, ase_rng_);
            AseTrace trace{decision.branch, decision.omega, decision.xi, std::nullopt};
            if (decision.any_eligible()) {
                const AdaptResult adapted = adapt_gains(gains, decision, ase_rng_);
                gains = adapted.gains;
                trace.draw = adapted.draw;
                ++result_.tuner_updates;
            }
            rec.ase = trace;
        };
        while (budget_left()) {
            gains_ = episode(gains_, hook).final_gains;
        }
    }

    const SessionConfig& cfg_;
    std::int64_t length_;
    ClosedLoop loop_;
    RegulatorGains gains_;
    Rng ase_rng_;
    Rng tuner_rng_;
    SessionResult result_;
};

}  // namespace

SessionResult run_adaptive_session(const SessionConfig& cfg) {
    cfg.validate();
    return Session(cfg).run();
}

}  // namespace unireg
