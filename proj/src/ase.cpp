#include "unireg/ase.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace unireg {

std::string_view to_string(OmegaVariant variant) {
    return variant == OmegaVariant::MeanDiff ? "mean-diff" : "max-diff";
}

std::optional<OmegaVariant> parse_omega_variant(std::string_view name) {
    if (name == "mean-diff") return OmegaVariant::MeanDiff;
    if (name == "max-diff") return OmegaVariant::MaxDiff;
    return std::nullopt;
}

void AseConfig::validate() const {
    for (double beta : {beta1, beta2, beta3, beta4, beta5}) {
        require(beta > 0.0 && std::isfinite(beta), "ASE step sizes must be finite and > 0");
    }
    require(gamma > 1.0 && std::isfinite(gamma), "ASE gamma must be > 1");
    require(epsilon > 0.0 && std::isfinite(epsilon), "ASE epsilon must be > 0");
    require(rho > 0.0 && std::isfinite(rho), "ASE rho must be > 0");
    require(capacity >= 4, "ASE buffer capacity must be >= 4");
}

AseBuffers::AseBuffers(std::size_t capacity) : capacity_(capacity) {
    require(capacity >= 1, "buffer capacity must be >= 1");
}

void AseBuffers::push(double reference, double error) {
    if (full()) {
        throw std::logic_error("ASE buffers are full; evaluate before pushing");
    }
    references_.push_back(reference);
    errors_.push_back(error);
}

void AseBuffers::dequeue() {
    if (!empty()) {
        references_.pop_front();
        errors_.pop_front();
    }
}

void AseBuffers::flush() {
    references_.clear();
    errors_.clear();
}

std::string_view to_string(AseBranch branch) {
    switch (branch) {
        case AseBranch::NotFull: return "not_full";
        case AseBranch::RejectNegativeReference: return "reject_negative_reference";
        case AseBranch::RejectNotAscending: return "reject_not_ascending";
        case AseBranch::RejectLeadingReferenceZero: return "reject_leading_reference_zero";
        case AseBranch::RejectControlNotPositive: return "reject_control_not_positive";
        case AseBranch::RejectLeadingErrorNotPositive: return "reject_leading_error_not_positive";
        case AseBranch::RejectBelowThreshold: return "reject_below_threshold";
        case AseBranch::DecreaseNAllNegative: return "decrease_n_all_negative";
        case AseBranch::DecreaseKSomeNegative: return "decrease_k_some_negative";
        case AseBranch::DecreaseKPeakRatio: return "decrease_k_peak_ratio";
        case AseBranch::IncreaseByPriority: return "increase_by_priority";
    }
    return "unknown";
}

bool is_reject(AseBranch branch) {
    switch (branch) {
        case AseBranch::RejectNegativeReference:
        case AseBranch::RejectNotAscending:
        case AseBranch::RejectLeadingReferenceZero:
        case AseBranch::RejectControlNotPositive:
        case AseBranch::RejectLeadingErrorNotPositive:
        case AseBranch::RejectBelowThreshold:
            return true;
        default:
            return false;
    }
}

bool is_decision(AseBranch branch) {
    return branch == AseBranch::DecreaseNAllNegative ||
           branch == AseBranch::DecreaseKSomeNegative ||
           branch == AseBranch::DecreaseKPeakRatio || branch == AseBranch::IncreaseByPriority;
}

OmegaResult omega(std::span<const double> errors, OmegaVariant variant) {
    require(errors.size() >= 2, "omega needs at least two error samples");
    const double mean_error =
        std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
    if (mean_error == 0.0) {
        return {0.0, true};
    }
    std::vector<double> diffs(errors.size() - 1);
    for (std::size_t i = 1; i < errors.size(); ++i) {
        diffs[i - 1] = errors[i] - errors[i - 1];
    }
    double spread = 0.0;
    if (variant == OmegaVariant::MeanDiff) {
        spread = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
    } else {
        spread = *std::max_element(diffs.begin(), diffs.end());
    }
    // + 0.0 folds a negative zero into +0.
    return {-spread / mean_error + 0.0, false};
}

namespace {

AseDecision reject(AseBuffers& buffers, AseBranch branch) {
    buffers.dequeue();
    AseDecision decision;
    decision.branch = branch;
    return decision;
}

AseDecision decide(AseBuffers& buffers, AseDecision decision) {
    buffers.flush();
    return decision;
}

}  // namespace

AseDecision ase_evaluate(AseBuffers& buffers, const RegulatorGains& gains, const AseConfig& cfg,
                         Rng& rng) {
    if (!buffers.full()) {
        return AseDecision{};
    }
    const std::vector<double> R(buffers.references().begin(), buffers.references().end());
    const std::vector<double> E(buffers.errors().begin(), buffers.errors().end());
    for (std::size_t i = 0; i < R.size(); ++i) {
        require_finite(R[i], "buffered reference");
        require_finite(E[i], "buffered error");
    }
    const std::size_t n = R.size();

    if (std::any_of(R.begin(), R.end(), [](double r) { return r < 0.0; })) {
        return reject(buffers, AseBranch::RejectNegativeReference);
    }
    if (std::adjacent_find(R.begin(), R.end(), [](double prev, double next) { return next < prev; }) !=
        R.end()) {
        return reject(buffers, AseBranch::RejectNotAscending);
    }
    const std::size_t half = (n + 1) / 2;
    if (std::all_of(R.begin(), R.begin() + static_cast<std::ptrdiff_t>(half),
                    [](double r) { return r == 0.0; })) {
        return reject(buffers, AseBranch::RejectLeadingReferenceZero);
    }

    std::vector<double> U(n);
    for (std::size_t i = 0; i < n; ++i) {
        U[i] = gains.K * E[i] + (gains.N - gains.K) * R[i];
    }
    // A zero first command with positive first error only means the gains are
    // still zero; the window is in the driven direction and stays eligible.
    if (U[0] < 0.0 || (U[0] == 0.0 && !(E[0] > 0.0))) {
        return reject(buffers, AseBranch::RejectControlNotPositive);
    }

    if (std::all_of(E.begin(), E.end(), [](double e) { return e < 0.0; })) {
        AseDecision d;
        d.branch = AseBranch::DecreaseNAllNegative;
        d.eligible_n = true;
        d.direction_n = -1;
        d.step_n = cfg.beta1;
        return decide(buffers, d);
    }
    if (!(E[0] > 0.0) || !(E[1] > 0.0)) {
        return reject(buffers, AseBranch::RejectLeadingErrorNotPositive);
    }
    if (std::any_of(E.begin(), E.end(), [](double e) { return e < 0.0; })) {
        AseDecision d;
        d.branch = AseBranch::DecreaseKSomeNegative;
        d.eligible_k = true;
        d.direction_k = -1;
        d.step_k = cfg.beta2;
        return decide(buffers, d);
    }
    // Increases are only allowed when every error exceeds the threshold.
    if (std::any_of(E.begin(), E.end(), [&](double e) { return !(e > cfg.epsilon); })) {
        return reject(buffers, AseBranch::RejectBelowThreshold);
    }
    const double mean_u = std::accumulate(U.begin(), U.end(), 0.0) / static_cast<double>(n);
    const double max_u = *std::max_element(U.begin(), U.end());
    if (max_u > cfg.gamma * mean_u) {
        AseDecision d;
        d.branch = AseBranch::DecreaseKPeakRatio;
        d.eligible_k = true;
        d.direction_k = -1;
        d.step_k = cfg.beta3;
        return decide(buffers, d);
    }

    const OmegaResult priority = omega(E, cfg.omega_variant);
    const double xi = rng.uniform();
    AseDecision d;
    d.branch = AseBranch::IncreaseByPriority;
    d.omega = priority.value;
    d.omega_degenerate = priority.degenerate;
    d.xi = xi;
    if (priority.value > cfg.rho * xi) {
        d.eligible_k = true;
        d.direction_k = +1;
        d.step_k = cfg.beta4;
    } else {
        d.eligible_n = true;
        d.direction_n = +1;
        d.step_n = cfg.beta5;
    }
    return decide(buffers, d);
}

GainUpdate shc_update(double value, int direction, double step, bool eligible, Rng& rng) {
    if (!eligible) {
        return {value, std::nullopt};
    }
    require(step >= 0.0, "update step must be >= 0");
    const double draw = rng.uniform();
    const double delta = draw * step;
    const double updated = direction > 0 ? value + delta : value - delta;
    return {std::max(0.0, updated), draw};
}

AdaptResult adapt_gains(const RegulatorGains& gains, const AseDecision& decision, Rng& rng) {
    AdaptResult result{gains, std::nullopt};
    if (decision.eligible_k) {
        const auto update =
            shc_update(gains.K, decision.direction_k, decision.step_k, true, rng);
        result.gains.K = std::min(update.value, gains.N);
        result.draw = update.draw;
    } else if (decision.eligible_n) {
        const auto update =
            shc_update(gains.N, decision.direction_n, decision.step_n, true, rng);
        result.gains.N = std::max(update.value, gains.K);
        result.draw = update.draw;
    }
    return result;
}

}  // namespace unireg
