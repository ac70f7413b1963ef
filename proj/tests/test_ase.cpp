#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "support.hpp"
#include "unireg/ase.hpp"

using namespace unireg;

namespace {

AseBuffers filled(const std::vector<double>& R, const std::vector<double>& E) {
    AseBuffers b(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
        b.push(R[i], E[i]);
    }
    return b;
}

AseConfig config_with_capacity(std::size_t capacity) {
    AseConfig cfg;
    cfg.capacity = capacity;
    return cfg;
}

/// Reference classifier written straight from the step list, kept apart from
/// the library code on purpose.
AseBranch expected_branch(const std::vector<double>& R, const std::vector<double>& E,
                          const RegulatorGains& g, const AseConfig& cfg) {
    const std::size_t n = R.size();
    for (double r : R) {
        if (r < 0) return AseBranch::RejectNegativeReference;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (R[i] < R[i - 1]) return AseBranch::RejectNotAscending;
    }
    bool first_half_zero = true;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        first_half_zero = first_half_zero && R[i] == 0.0;
    }
    if (first_half_zero) return AseBranch::RejectLeadingReferenceZero;
    const double u0 = g.K * E[0] + (g.N - g.K) * R[0];
    if (u0 < 0 || (u0 == 0 && E[0] <= 0)) return AseBranch::RejectControlNotPositive;
    int negatives = 0;
    for (double e : E) negatives += e < 0;
    if (negatives == static_cast<int>(n)) return AseBranch::DecreaseNAllNegative;
    if (E[0] <= 0 || E[1] <= 0) return AseBranch::RejectLeadingErrorNotPositive;
    if (negatives > 0) return AseBranch::DecreaseKSomeNegative;
    for (double e : E) {
        if (e <= cfg.epsilon) return AseBranch::RejectBelowThreshold;
    }
    double sum = 0, peak = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = g.K * E[i] + (g.N - g.K) * R[i];
        sum += u;
        peak = std::max(peak, u);
    }
    if (peak > cfg.gamma * sum / static_cast<double>(n)) return AseBranch::DecreaseKPeakRatio;
    return AseBranch::IncreaseByPriority;
}

}  // namespace

TEST_CASE("buffer bookkeeping") {
    AseBuffers b(4);
    b.push(1.0, 0.1);
    CHECK(b.size() == 1);
    CHECK(b.references().size() == b.errors().size());
    b.push(1.0, 0.2);
    b.push(1.0, 0.3);
    CHECK_FALSE(b.full());
    b.push(1.0, 0.4);
    CHECK(b.full());
    CHECK_THROWS_AS(b.push(1.0, 0.5), std::logic_error);
    b.dequeue();
    CHECK(b.size() == 3);
    CHECK(b.errors().front() == 0.2);
    b.flush();
    CHECK(b.empty());
}

TEST_CASE("evaluation of partial buffers is a no-op") {
    AseBuffers b(4);
    b.push(-1.0, 0.1);
    Rng rng(1);
    const auto d = ase_evaluate(b, {1.0, 2.0}, config_with_capacity(4), rng);
    CHECK(d.branch == AseBranch::NotFull);
    CHECK_FALSE(d.any_eligible());
    CHECK(b.size() == 1);
}

TEST_CASE("negative reference rejects and dequeues one sample") {
    auto b = filled({0.5, -0.1, 0.7, 0.8}, {0.3, 0.2, 0.1, 0.05});
    Rng rng(1);
    const auto d = ase_evaluate(b, {10.0, 60.0}, config_with_capacity(4), rng);
    CHECK(d.branch == AseBranch::RejectNegativeReference);
    CHECK_FALSE(d.any_eligible());
    CHECK(b.size() == 3);
    CHECK(b.references().front() == -0.1);
}

TEST_CASE("all-negative errors decrease N by beta1") {
    auto b = filled({1.0, 1.0, 1.0, 1.0}, {-0.1, -0.2, -0.1, -0.05});
    Rng rng(1);
    const auto cfg = config_with_capacity(4);
    const auto d = ase_evaluate(b, {10.0, 60.0}, cfg, rng);
    CHECK(d.branch == AseBranch::DecreaseNAllNegative);
    CHECK(d.eligible_n);
    CHECK_FALSE(d.eligible_k);
    CHECK(d.direction_n == -1);
    CHECK(d.step_n == cfg.beta1);
    CHECK(b.empty());
}

TEST_CASE("peak-to-mean ratio decreases K by beta3") {
    // U = K E + (N - K) R = [28, 32, 36, 40.5]; 40.5 > 1.1 * 34.125.
    auto b = filled({0.5, 0.6, 0.7, 0.8}, {0.3, 0.2, 0.1, 0.05});
    Rng rng(1);
    const auto cfg = config_with_capacity(4);
    const auto d = ase_evaluate(b, {10.0, 60.0}, cfg, rng);
    CHECK(d.branch == AseBranch::DecreaseKPeakRatio);
    CHECK(d.eligible_k);
    CHECK(d.direction_k == -1);
    CHECK(d.step_k == cfg.beta3);
    CHECK(b.empty());

    // N = 110 gives U = [53, 62, 71, 80.5]; 80.5 > 1.1 * 66.625 still holds.
    auto c = filled({0.5, 0.6, 0.7, 0.8}, {0.3, 0.2, 0.1, 0.05});
    CHECK(ase_evaluate(c, {10.0, 110.0}, cfg, rng).branch == AseBranch::DecreaseKPeakRatio);
}

TEST_CASE("priority branch compares omega with rho times xi") {
    // U = [103, 102, 101, 100.5]; max 103 <= 1.1 * 101.625.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto b = filled({1.0, 1.0, 1.0, 1.0}, {0.3, 0.2, 0.1, 0.05});
        auto cfg = config_with_capacity(4);
        cfg.rho = 1.0;
        Rng rng(seed);
        Rng replay(seed);
        const auto d = ase_evaluate(b, {10.0, 110.0}, cfg, rng);
        REQUIRE(d.branch == AseBranch::IncreaseByPriority);
        REQUIRE(d.omega.has_value());
        CHECK(*d.omega == doctest::Approx(0.08333333333333333 / 0.1625).epsilon(1e-12));
        CHECK(*d.xi == replay.uniform());
        if (*d.omega > cfg.rho * *d.xi) {
            CHECK(d.eligible_k);
            CHECK(d.direction_k == 1);
            CHECK(d.step_k == cfg.beta4);
        } else {
            CHECK(d.eligible_n);
            CHECK(d.direction_n == 1);
            CHECK(d.step_n == cfg.beta5);
        }
        CHECK(b.empty());
    }
}

TEST_CASE("priority branch picks N when the weight dominates") {
    auto b = filled({1.0, 1.0, 1.0, 1.0}, {0.3, 0.2, 0.1, 0.05});
    auto cfg = config_with_capacity(4);
    cfg.rho = 1e9;
    Rng rng(3);
    const auto d = ase_evaluate(b, {10.0, 110.0}, cfg, rng);
    CHECK(d.eligible_n);
    CHECK(d.step_n == cfg.beta5);
}

TEST_CASE("omega") {
    const std::vector<double> flat{0.4, 0.4, 0.4};
    CHECK(omega(flat, OmegaVariant::MeanDiff).value == 0.0);
    CHECK(omega(flat, OmegaVariant::MaxDiff).value == 0.0);
    CHECK_FALSE(std::signbit(omega(flat, OmegaVariant::MeanDiff).value));

    const std::vector<double> decay{0.3, 0.2, 0.1, 0.05};
    CHECK(omega(decay, OmegaVariant::MeanDiff).value == doctest::Approx(0.5128205128).epsilon(1e-9));
    CHECK(omega(decay, OmegaVariant::MaxDiff).value == doctest::Approx(0.05 / 0.1625).epsilon(1e-12));

    const std::vector<double> growing{1.0, 2.0};
    CHECK(omega(growing, OmegaVariant::MeanDiff).value == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));

    const std::vector<double> balanced{1.0, -1.0};
    const auto degenerate = omega(balanced, OmegaVariant::MeanDiff);
    CHECK(degenerate.degenerate);
    CHECK(degenerate.value == 0.0);

    const std::vector<double> single{1.0};
    CHECK_THROWS(omega(single, OmegaVariant::MeanDiff));
    CHECK(parse_omega_variant("max-diff") == OmegaVariant::MaxDiff);
    CHECK(parse_omega_variant(to_string(OmegaVariant::MeanDiff)) == OmegaVariant::MeanDiff);
}

TEST_CASE("shc_update") {
    Rng rng(5);
    SUBCASE("ineligible leaves the value and draws nothing") {
        Rng before = rng;
        const auto u = shc_update(100.0, 1, 5.0, false, rng);
        CHECK(u.value == 100.0);
        CHECK_FALSE(u.draw.has_value());
        CHECK(rng.uniform() == before.uniform());
    }
    SUBCASE("upward step is omega times S") {
        Rng replay = rng;
        const auto u = shc_update(100.0, 1, 5.0, true, rng);
        const double w = replay.uniform();
        CHECK(*u.draw == w);
        CHECK(u.value == 100.0 + w * 5.0);
    }
    SUBCASE("downward step clamps at zero") {
        std::uint64_t seed = 0;
        while (Rng(seed).uniform() <= 0.2) ++seed;  // need omega * 5 > 1
        Rng r(seed);
        CHECK(shc_update(1.0, -1, 5.0, true, r).value == 0.0);
    }
    SUBCASE("negative step is rejected") {
        CHECK_THROWS(shc_update(1.0, 1, -1.0, true, rng));
    }
}

TEST_CASE("adapt_gains") {
    Rng rng(8);
    SUBCASE("zero decision") {
        CHECK(adapt_gains({5.0, 9.0}, AseDecision{}, rng).gains == RegulatorGains{5.0, 9.0});
    }
    SUBCASE("N decrease below K pins N to K") {
        AseDecision d;
        d.eligible_n = true;
        d.direction_n = -1;
        d.step_n = 1e6;
        const auto r = adapt_gains({5.0, 6.0}, d, rng);
        CHECK(r.gains.K == 5.0);
        CHECK(r.gains.N == 5.0);
    }
    SUBCASE("K increase inside the ordering") {
        AseDecision d;
        d.eligible_k = true;
        d.direction_k = 1;
        d.step_k = 5.0;
        const auto r = adapt_gains({10.0, 100.0}, d, rng);
        CHECK(r.gains.N == 100.0);
        CHECK(r.gains.K == 10.0 + *r.draw * 5.0);
    }
    SUBCASE("K increase past N pins K to N") {
        AseDecision d;
        d.eligible_k = true;
        d.direction_k = 1;
        d.step_k = 1e6;
        const auto r = adapt_gains({10.0, 11.0}, d, rng);
        CHECK(r.gains == RegulatorGains{11.0, 11.0});
    }
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(AseConfig{}.validate());
    AseConfig cfg;
    cfg.gamma = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.capacity = 3;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.beta2 = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.rho = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("odd capacity uses the first ceil(n/2) references") {
    const auto cfg = config_with_capacity(5);
    Rng rng(2);
    auto zeros = filled({0.0, 0.0, 0.0, 1.0, 1.0}, {0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(ase_evaluate(zeros, {1.0, 2.0}, cfg, rng).branch == AseBranch::RejectLeadingReferenceZero);
    auto two = filled({0.0, 0.0, 1.0, 1.0, 1.0}, {0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(ase_evaluate(two, {1.0, 2.0}, cfg, rng).branch != AseBranch::RejectLeadingReferenceZero);
}

TEST_CASE("fuzz: every outcome is reachable and decisions obey the gates") {
    Gen gen(51);
    std::map<AseBranch, int> hits;
    for (int trial = 0; trial < 40000; ++trial) {
        const std::size_t n = static_cast<std::size_t>(gen.integer(4, 12));
        AseConfig cfg = config_with_capacity(n);
        cfg.rho = gen.coin() ? 0.003 : gen.uniform(0.01, 2.0);
        cfg.omega_variant = gen.coin() ? OmegaVariant::MeanDiff : OmegaVariant::MaxDiff;

        std::vector<double> R(n), E(n);
        const int r_mode = gen.integer(0, 5);
        double level = gen.uniform(0.0, 2.0);
        for (std::size_t i = 0; i < n; ++i) {
            switch (r_mode) {
                case 0: R[i] = level; break;
                case 1: level += gen.uniform(0.0, 0.1); R[i] = level; break;
                case 2: R[i] = gen.uniform(-1.0, 1.0); break;
                case 3: R[i] = gen.uniform(0.0, 2.0); break;
                case 4: R[i] = i < (n + 1) / 2 ? 0.0 : 1.0; break;
                default: R[i] = i < (n + 1) / 2 - 1 ? 0.0 : 1.0; break;
            }
        }
        const int e_mode = gen.integer(0, 5);
        double e = gen.uniform(0.02, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            switch (e_mode) {
                case 0: E[i] = -gen.uniform(1e-4, 0.5); break;
                case 1: e *= gen.uniform(0.9, 1.0); E[i] = e; break;
                case 2: E[i] = i < 2 ? gen.uniform(0.01, 0.5) : gen.uniform(-0.2, 0.3); break;
                case 3: E[i] = i == 0 ? gen.uniform(-0.3, 0.0) : gen.uniform(-0.1, 0.5); break;
                case 4: E[i] = gen.uniform(0.0, 0.03); break;
                default: E[i] = gen.uniform(0.011, 1.0); break;
            }
        }
        double K = gen.coin(0.1) ? 0.0 : gen.uniform(0.0, 200.0);
        double N = gen.coin(0.2) ? K : K + gen.uniform(0.0, 200.0);
        if (gen.coin(0.05)) K = N = 0.0;
        const RegulatorGains gains{K, N};

        auto buffers = filled(R, E);
        Rng rng(gen.bits());
        const AseDecision d = ase_evaluate(buffers, gains, cfg, rng);
        REQUIRE(d.branch == expected_branch(R, E, gains, cfg));
        ++hits[d.branch];

        REQUIRE_FALSE((d.eligible_k && d.eligible_n));
        if (!d.eligible_k) {
            REQUIRE(d.direction_k == 0);
            REQUIRE(d.step_k == 0.0);
        }
        if (!d.eligible_n) {
            REQUIRE(d.direction_n == 0);
            REQUIRE(d.step_n == 0.0);
        }
        if (is_reject(d.branch)) {
            REQUIRE_FALSE(d.any_eligible());
            REQUIRE(buffers.size() == n - 1);
            REQUIRE(buffers.references().size() == buffers.errors().size());
            REQUIRE(buffers.errors().front() == E[1]);
        } else {
            REQUIRE(is_decision(d.branch));
            REQUIRE(d.eligible_k != d.eligible_n);
            REQUIRE(buffers.empty());
        }
        if (d.direction_k == 1 || d.direction_n == 1) {
            double sum = 0, peak = -INFINITY;
            for (std::size_t i = 0; i < n; ++i) {
                REQUIRE(E[i] > cfg.epsilon);
                const double u = K * E[i] + (N - K) * R[i];
                sum += u;
                peak = std::max(peak, u);
            }
            REQUIRE(peak <= cfg.gamma * sum / static_cast<double>(n));
        }
        const bool some_negative = std::any_of(E.begin(), E.end(), [](double v) { return v < 0; });
        const bool all_negative = std::all_of(E.begin(), E.end(), [](double v) { return v < 0; });
        if (some_negative && !all_negative && E[0] > 0 && E[1] > 0 && d.any_eligible()) {
            REQUIRE(d.branch == AseBranch::DecreaseKSomeNegative);
            REQUIRE(d.direction_k == -1);
        }

        // At most one gain moves, and the ordering survives.
        const auto adapted = adapt_gains(gains, d, rng);
        REQUIRE(((adapted.gains.K == K) || (adapted.gains.N == N)));
        REQUIRE(adapted.gains.K >= 0.0);
        REQUIRE(adapted.gains.N >= adapted.gains.K);
    }
    CHECK(hits.size() == kAseOutcomeCount);
    for (auto [branch, count] : hits) {
        INFO(to_string(branch));
        CHECK(count > 0);
    }
}
