#include <doctest.h>

#include <cmath>
#include <random>

#include "itolab/energy.hpp"
#include "itolab/error.hpp"
#include "itolab/random.hpp"

using namespace itolab;

namespace {

Scenario scalar(IncreasingDriver A, MartingalePath h, double drift, double horizon) {
    SpaceFamily S({1.0}, {lp_space(2.0, {1.0})});
    std::vector<DualStepProcess> drifts{DualStepProcess::with_default_dominator(0, {}, {HVector{drift}}, S)};
    return Scenario(S, std::move(A), std::move(h), std::move(drifts), horizon);
}

MartingalePath still(double x) { return MartingalePath(HVector{x}, {}, {}); }

double inner(const HVector& x, const HVector& y, const SpaceFamily& S) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += S.h_weights()[j] * x[j] * y[j];
    return s;
}

// Ledger terms summed event by event for pure-jump scenarios, using only the
// scenario evaluators.
EnergyLedger oracle_ledger(const Scenario& S, double t) {
    const auto& H = S.spaces();
    EnergyLedger L;
    L.t = t;
    HVector v = S.state(t);
    L.lhs = inner(v, v, H);
    L.term_h0 = inner(S.noise().initial(), S.noise().initial(), H);
    for (const auto& j : S.driver().jumps()) {
        if (j.time > t) continue;
        HVector vs = S.state(j.time);
        HVector total(H.dim());
        for (const auto& d : S.drifts()) {
            L.term_drift += 2.0 * inner(d(j.time), vs, H) * j.size;
            total += d(j.time);
        }
        L.term_correction += inner(total, total, H) * j.size * j.size;
    }
    for (double s : S.noise().event_times()) {
        if (s > t) continue;
        HVector dh = S.noise().jump_at(s);
        L.term_stoch += 2.0 * inner(S.state_left(s), dh, H);
        L.term_qv += inner(dh, dh, H);
    }
    L.residual = L.lhs - (L.term_h0 + L.term_drift + L.term_stoch - L.term_correction + L.term_qv);
    return L;
}

} // namespace

TEST_SUITE("energy") {

TEST_CASE("ledger examples") {
    auto one = energy_ledger(one_jump_scenario(), 2.0);
    CHECK(one.lhs == 1.0);
    CHECK(one.term_h0 == 0.0);
    CHECK(one.term_drift == 2.0);
    CHECK(one.term_stoch == 0.0);
    CHECK(one.term_correction == 1.0);
    CHECK(one.term_qv == 0.0);
    CHECK(one.residual == 0.0);
    CHECK(one.within(1e-9));

    // Mass above 1 is fine for ledgers; only partitions need normalising.
    auto two = energy_ledger(scalar(IncreasingDriver({{1.0, 1.0}, {2.0, 1.0}}), still(0.0), 1.0, 3.0), 3.0);
    CHECK(two.lhs == 4.0);
    CHECK(two.term_drift == 6.0);
    CHECK(two.term_correction == 2.0);
    CHECK(two.residual == 0.0);

    auto noise = energy_ledger(scalar(IncreasingDriver(), MartingalePath(HVector{1.0}, {1.0}, {HVector{0.0}}), 0.0, 2.0), 2.0);
    CHECK(noise.lhs == 0.0);
    CHECK(noise.term_h0 == 1.0);
    CHECK(noise.term_stoch == -2.0);
    CHECK(noise.term_qv == 1.0);
    CHECK(noise.residual == 0.0);

    CHECK_THROWS_AS(energy_ledger(one_jump_scenario(), 2.5), Error);
    CHECK_THROWS_AS(energy_ledger(one_jump_scenario(), -1.0), Error);
}

TEST_CASE("ledger terms match an event-by-event oracle") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        for (const auto& L : event_ledgers(S)) {
            auto O = oracle_ledger(S, L.t);
            const double scale = 1.0 + std::abs(O.lhs) + std::abs(O.term_drift) + std::abs(O.term_stoch);
            CHECK(std::abs(L.lhs - O.lhs) <= 1e-12 * scale);
            CHECK(std::abs(L.term_drift - O.term_drift) <= 1e-11 * scale);
            CHECK(std::abs(L.term_stoch - O.term_stoch) <= 1e-11 * scale);
            CHECK(std::abs(L.term_correction - O.term_correction) <= 1e-11 * scale);
            CHECK(std::abs(L.term_qv - O.term_qv) <= 1e-12 * scale);
            CHECK(L.within(1e-9));
        }
    }
}

TEST_CASE("ledger invariants") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        std::vector<double> times;
        for (int k = 0; k <= 40; ++k) times.push_back(S.horizon() * k / 40.0);
        auto ledgers = energy_ledgers(S, times);
        REQUIRE(ledgers.size() == times.size());
        for (std::size_t k = 0; k < ledgers.size(); ++k) {
            CHECK(ledgers[k].t == times[k]);
            CHECK(ledgers[k].term_correction >= 0.0);
            CHECK(ledgers[k].term_qv >= 0.0);
            if (k > 0) CHECK(ledgers[k].term_qv >= ledgers[k - 1].term_qv);
            CHECK(ledgers[k].within(1e-9));
        }
        // Requested order is preserved.
        std::vector<double> reversed(times.rbegin(), times.rend());
        auto back = energy_ledgers(S, reversed);
        CHECK(back.front().lhs == ledgers.back().lhs);
    }
}

TEST_CASE("ledger with a density part") {
    // v(t) = A(t) = t/2 plus a jump of 1/2 at t = 1/2.
    auto S = mixed_driver_scenario();
    auto L = energy_ledger(S, 1.0);
    CHECK(L.lhs == doctest::Approx(1.0));
    CHECK(L.term_correction == doctest::Approx(0.25));
    // 2 int v dA: density part 2 * int_0^1 v(s)/2 ds, jump part 2 * v(1/2) / 2.
    // v(s) = s/2 on [0, 1/2), s/2 + 1/2 on [1/2, 1].
    // int_0^{1/2} s/2 ds = 1/16 and int_{1/2}^1 (s/2 + 1/2) ds = 7/16.
    const double density_part = 2.0 * 0.5 * (1.0 / 16.0 + 7.0 / 16.0);
    const double jump_part = 2.0 * 0.75 * 0.5;
    CHECK(L.term_drift == doctest::Approx(density_part + jump_part));
    CHECK(L.within(1e-9));
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto R = random_scenario(RandomScenarioSpec{.seed = seed, .with_density = true});
        for (const auto& E : event_ledgers(R)) CHECK(E.within(1e-9));
        CHECK(energy_ledger(R, R.horizon()).within(1e-9));
    }
}

TEST_CASE("cadlag modification") {
    auto trivial = cadlag_modification(scalar(IncreasingDriver({{1.0, 0.5}}), still(0.7), 0.0, 2.0));
    for (double t : {0.0, 0.5, 1.0, 1.5}) CHECK(trivial(t)[0] == 0.7);

    auto one = cadlag_modification(one_jump_scenario());
    CHECK(one(1.0)[0] == 1.0);
    CHECK(one.left_limit(1.0)[0] == 0.0);
    CHECK(one.steps()(1.0)[0] == 1.0);
    CHECK_THROWS_AS(cadlag_modification(mixed_driver_scenario()).steps(), Error);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        auto path = cadlag_modification(S);
        auto steps = path.steps();
        for (double t : S.event_times()) {
            CHECK(path(t) == S.state(t));
            CHECK(steps(t) == S.state(t));
            // Right-continuity and left limits on a fine offset.
            const double eps = 1e-9;
            HVector right = path(std::min(t + eps, S.horizon()));
            HVector left = path(t - eps);
            for (std::size_t j = 0; j < right.size(); ++j) {
                CHECK(right[j] == doctest::Approx(path(t)[j]).epsilon(1e-9).scale(1.0));
                CHECK(left[j] == doctest::Approx(path.left_limit(t)[j]).epsilon(1e-9).scale(1.0));
            }
        }
    }
}

TEST_CASE("weak jump relation") {
    auto one = weak_jump_check(one_jump_scenario(), 1.0);
    CHECK(one.lhs[0] == 1.0);
    CHECK(one.rhs[0] == 1.0);
    auto noise_only = weak_jump_check(scalar(IncreasingDriver(), MartingalePath(HVector{1.0}, {1.0}, {HVector{0.0}}), 3.0, 2.0), 1.0);
    CHECK(noise_only.lhs[0] == 0.0);
    CHECK(noise_only.rhs[0] == 0.0);
    try {
        weak_jump_check(one_jump_scenario(), 0.5);
        FAIL("0.5 is not an event");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_an_event);
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        for (double t : S.event_times()) {
            auto w = weak_jump_check(S, t);
            for (std::size_t j = 0; j < w.lhs.size(); ++j) CHECK(std::abs(w.lhs[j] - w.rhs[j]) <= 1e-12 * (1.0 + std::abs(w.rhs[j])));
        }
    }
}

TEST_CASE("telescoping identity") {
    auto zero = scalar(IncreasingDriver({{1.0, 1.0}}), still(0.0), 0.0, 2.0);
    PartitionHierarchy Pz(TimeChange(zero.driver()), 3);
    for (const auto& row : telescoping_check(zero, Pz, 3).rows) {
        for (double term : row.terms) CHECK(term == 0.0);
        CHECK(row.lhs == 0.0);
    }

    auto one = one_jump_scenario();
    PartitionHierarchy P(TimeChange(one.driver()), 2);
    auto rep = telescoping_check(one, P, 2);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].t == 1.0);
    CHECK(rep.rows[0].lhs == 1.0);
    // Nonzero terms: the drift pairing 2 v* v(1) dA and -|v(1) - h(1)|^2.
    CHECK(rep.rows[0].terms[1] == 2.0);
    CHECK(rep.rows[0].terms[5] == -1.0);
    CHECK(rep.max_relative_defect == 0.0);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        PartitionHierarchy Q(TimeChange(S.driver()), 6);
        for (int level : {1, 3, 5, 6}) CHECK(telescoping_check(S, Q, level).max_relative_defect <= 1e-10);
    }
}

TEST_CASE("stochastic term by two routes") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed, .max_jumps = 20, .min_jump = 0.01});
        PartitionHierarchy P(TimeChange(S.driver()), 12);
        for (double t : {S.horizon() / 2.0, S.horizon()}) {
            double direct = energy_ledger(S, t).term_stoch;
            double partition = stochastic_term_partition(S, P, 12, t);
            CHECK(std::abs(direct - partition) <= 1e-10 * (1.0 + std::abs(direct)));
        }
    }
}

TEST_CASE("correction sums") {
    auto zero = scalar(IncreasingDriver({{0.5, 0.4}, {1.0, 0.3}}), MartingalePath(HVector{0.0}, {0.7}, {HVector{2.0}}), 0.0, 2.0);
    PartitionHierarchy Pz(TimeChange(zero.driver()), 6);
    for (double K : correction_study(zero, Pz, 2.0, 6).sums) CHECK(K == 0.0);

    auto one = one_jump_scenario();
    PartitionHierarchy P(TimeChange(one.driver()), 4);
    auto study = correction_study(one, P, 2.0, 4);
    CHECK(study.target == 1.0);
    for (double K : study.sums) CHECK(K == 1.0);
    CHECK_THROWS_AS(correction_study(one, P, 2.0, 5), Error);

    // Mixed driver: the density contributes nothing in the limit.
    auto mixed = mixed_driver_scenario();
    PartitionHierarchy M(TimeChange(mixed.driver()), 14);
    auto m = correction_study(mixed, M, 1.0, 14);
    CHECK(m.target == doctest::Approx(0.25));
    for (int n = 2; n + 2 <= 14; ++n) CHECK(m.gaps[n + 2] <= 0.5 * m.gaps[n]);
    CHECK(m.gaps.back() < 1e-3);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed, .max_jumps = 20, .min_jump = 0.01});
        PartitionHierarchy Q(TimeChange(S.driver()), 12);
        auto c = correction_study(S, Q, S.horizon(), 12);
        CHECK(c.gaps.back() <= 1e-12 * (1.0 + c.target));
        CHECK(c.target == doctest::Approx(energy_ledger(S, S.horizon()).term_correction).epsilon(1e-12).scale(1.0));
        // Once two consecutive levels agree the sum has reached the target.
        for (int n = 0; n + 1 <= 12; ++n) {
            if (c.sums[n] == c.sums[n + 1] && Q.stagnation_mass(n) == 0.0) CHECK(c.gaps[n] <= 1e-12 * (1.0 + c.target));
        }
    }
}

TEST_CASE("Hilbert-space Ito formula for pure-jump paths") {
    SpaceFamily R({1.0}, {lp_space(2.0, {1.0})});
    auto constant = hilbert_ito_check(still(3.0), 5.0, R);
    CHECK(constant.lhs == 9.0);
    CHECK(constant.rhs == 9.0);
    auto drop = hilbert_ito_check(MartingalePath(HVector{1.0}, {1.0}, {HVector{0.0}}), 2.0, R);
    CHECK(drop.lhs == 0.0);
    CHECK(drop.rhs == 0.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        auto sides = hilbert_ito_check(S.noise(), S.horizon(), S.spaces());
        CHECK(std::abs(sides.lhs - sides.rhs) <= 1e-12 * (1.0 + std::abs(sides.lhs)));
    }
}

TEST_CASE("homogeneity under scaling") {
    auto same = homogeneity_check(one_jump_scenario(), 1.0, 2.0);
    CHECK(same.max_ratio_deviation == 0.0);
    auto half = homogeneity_check(one_jump_scenario(), 2.0, 2.0);
    CHECK(half.scaled.lhs == 0.25);
    CHECK(half.scaled.term_drift == 0.5);
    CHECK(half.scaled.term_correction == 0.25);
    CHECK(half.max_ratio_deviation == 0.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        for (double n : {2.0, 10.0}) {
            auto h = homogeneity_check(S, n, S.horizon());
            CHECK(h.max_ratio_deviation <= 1e-10);
            CHECK(h.scaled.within(1e-9));
        }
    }
}

TEST_CASE("drift term bounded by the Hoelder product") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed, .with_density = seed % 2 == 1});
        const double t = S.horizon();
        double bound = 0.0;
        for (std::size_t i = 0; i < S.spaces().count(); ++i) {
            const double p = S.spaces().space(i).exponent;
            bound += S.drifts()[i].running_bound(t, S.driver(), S.spaces()) * std::pow(state_norm_integral(S, i, t), 1.0 / p);
        }
        CHECK(std::abs(energy_ledger(S, t).term_drift) / 2.0 <= bound * (1.0 + 1e-9) + 1e-12);
    }
}

}
