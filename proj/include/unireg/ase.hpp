#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "unireg/common.hpp"
#include "unireg/regulator.hpp"

namespace unireg {

enum class OmegaVariant { MeanDiff, MaxDiff };

std::string_view to_string(OmegaVariant variant);
std::optional<OmegaVariant> parse_omega_variant(std::string_view name);

/// Hyperparameters of the associated search element.
struct AseConfig {
    double beta1 = 2.0;   ///< N decrease when every error is negative
    double beta2 = 2.0;   ///< K decrease when some error is negative
    double beta3 = 2.0;   ///< K decrease when control peak/mean ratio exceeds gamma
    double beta4 = 5.0;   ///< K increase
    double beta5 = 10.0;  ///< N increase
    double gamma = 1.1;   ///< bound on max(U) / mean(U)
    double epsilon = 0.01;
    double rho = 0.003;   ///< weight on the uniform draw compared against Omega
    std::size_t capacity = 10;
    OmegaVariant omega_variant = OmegaVariant::MeanDiff;

    void validate() const;
};

/// Paired FIFO windows of reference (R) and error (E) samples, oldest first.
class AseBuffers {
public:
    explicit AseBuffers(std::size_t capacity);

    /// Throws std::logic_error when already full; evaluate first.
    void push(double reference, double error);
    void dequeue();
    void flush();

    std::size_t size() const { return references_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool full() const { return size() == capacity_; }
    bool empty() const { return references_.empty(); }

    const std::deque<double>& references() const { return references_; }
    const std::deque<double>& errors() const { return errors_; }

private:
    std::size_t capacity_;
    std::deque<double> references_;
    std::deque<double> errors_;
};

/// Outcome of one eligibility evaluation. The six reject branches dequeue
/// one sample; the four decision branches flush both buffers.
enum class AseBranch {
    NotFull,
    RejectNegativeReference,
    RejectNotAscending,
    RejectLeadingReferenceZero,
    RejectControlNotPositive,
    RejectLeadingErrorNotPositive,
    RejectBelowThreshold,
    DecreaseNAllNegative,
    DecreaseKSomeNegative,
    DecreaseKPeakRatio,
    IncreaseByPriority,
};

inline constexpr std::size_t kAseOutcomeCount = 10;

std::string_view to_string(AseBranch branch);
bool is_reject(AseBranch branch);
bool is_decision(AseBranch branch);

struct AseDecision {
    bool eligible_k = false;
    bool eligible_n = false;
    int direction_k = 0;
    int direction_n = 0;
    double step_k = 0.0;
    double step_n = 0.0;
    AseBranch branch = AseBranch::NotFull;
    std::optional<double> omega;  ///< set when the priority branch ran
    std::optional<double> xi;
    bool omega_degenerate = false;  ///< mean(E) was zero

    bool any_eligible() const { return eligible_k || eligible_n; }
};

struct OmegaResult {
    double value = 0.0;
    bool degenerate = false;
};

/// Steady-state proximity of an error window:
/// -mean(diff(E)) / mean(E) or -max(diff(E)) / mean(E).
/// A zero mean yields 0 with `degenerate` set.
OmegaResult omega(std::span<const double> errors, OmegaVariant variant);

/// Runs the eligibility analysis on full buffers and applies the resulting
/// dequeue or flush in place. Draws from `rng` only in the priority branch.
AseDecision ase_evaluate(AseBuffers& buffers, const RegulatorGains& gains, const AseConfig& cfg,
                         Rng& rng);

/// Stochastic step on one gain. Returns the value and the draw (if any).
struct GainUpdate {
    double value = 0.0;
    std::optional<double> draw;
};

GainUpdate shc_update(double value, int direction, double step, bool eligible, Rng& rng);

/// Applies the decision to K or N. If the step breaks N >= K, the updated
/// gain is pinned to the other one, so at most one gain changes per call.
struct AdaptResult {
    RegulatorGains gains;
    std::optional<double> draw;
};

AdaptResult adapt_gains(const RegulatorGains& gains, const AseDecision& decision, Rng& rng);

}  // namespace unireg
