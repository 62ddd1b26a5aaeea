// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "itolab/energy.hpp"
#include "itolab/error.hpp"
#include "itolab/random.hpp"
#include "itolab/spde.hpp"

using namespace itolab;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

// Generated jumps are at least 1e-3 of a mass of at least 0.3, so 2^-13 separates them.
constexpr int separating_level = 13;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// 1. Energy identity at every event time of 1000 random pure-jump scenarios.
Outcome energy_identity() {
    double worst = 0.0;
    std::size_t checked = 0, failures = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        for (const auto& L : event_ledgers(S)) {
            ++checked;
            worst = std::max(worst, std::abs(L.residual) / (1.0 + std::abs(L.lhs)));
            if (!L.within(1e-9)) ++failures;
        }
    }
    return {failures == 0, fmt("%.0f ledgers, worst scaled residual %.3g, %.0f above 1e-9", double(checked), worst,
                               double(failures))};
}

// 2. Discrete telescoping identity, 200 scenarios x 4 levels.
Outcome telescoping() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        PartitionHierarchy P(TimeChange(S.driver()), 8);
        for (int level : {2, 4, 6, 8}) worst = std::max(worst, telescoping_check(S, P, level).max_relative_defect);
    }
    return {worst <= 1e-10, fmt("max relative defect %.3g (limit 1e-10)", worst)};
}

// 3. Time change: substitution, Lipschitz bound, squared increments.
Outcome time_change_suite() {
    std::mt19937_64 rng(split_seed(3, 0));
    std::uniform_real_distribution<double> u(0.0, 2.2);
    double worst_sub = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto A = random_driver(rng, 30, 2.0, 1e-3, k % 2 == 0);
        auto x = random_step(rng, 10, 2.0, Side::left_open);
        double t = u(rng);
        for (auto window : {Window::closed, Window::open}) {
            auto s = substitution_check(x, A, t, window);
            worst_sub = std::max(worst_sub, s.scale > 0.0 ? std::abs(s.lhs - s.rhs) / s.scale : std::abs(s.lhs - s.rhs));
        }
    }
    std::size_t lipschitz_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        TimeChange beta(random_driver(rng, 30, 2.0, 1e-3, k % 2 == 1));
        std::uniform_real_distribution<double> r(0.0, 1.1);
        double s = r(rng), t = r(rng);
        if (s > t) std::swap(s, t);
        if (!lipschitz_check(beta, s, t)) ++lipschitz_failures;
    }
    // Pure-jump drivers: jump-sum oracle reached exactly at a finite level.
    std::size_t unreached = 0;
    for (int k = 0; k < 200; ++k) {
        auto A = random_driver(rng, 20, 2.0, 1e-3, false);
        auto x = random_step(rng, 10, 2.0, Side::left_open);
        double t = u(rng);
        double target = 0.0;
        for (const auto& j : A.jumps())
            if (j.time <= t) target += std::pow(x(j.time) * j.size, 2);
        auto sums = squared_increment_sums(x, A, separating_level, t);
        if (std::abs(sums.back() - target) > 1e-12 * (1.0 + target)) ++unreached;
    }
    IncreasingDriver unit({}, {{0.0, 1.0, 1.0}});
    double unit_level12 = squared_increment_sums(StepFunction<double>(1.0), unit, 12, 1.0).back();
    bool ok = worst_sub <= 1e-12 && lipschitz_failures == 0 && unreached == 0 && unit_level12 < 1e-3;
    return {ok, fmt("substitution rel. error %.3g, Lipschitz failures %.0f, unit-density level-12 sum %.3g", worst_sub,
                    double(lipschitz_failures), unit_level12) +
                    fmt(", pure-jump misses %.0f", double(unreached))};
}

// 4. Correction sums reach the jump correction once jumps are separated.
Outcome correction_convergence() {
    std::size_t failures = 0;
    int deepest = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        PartitionHierarchy P(TimeChange(S.driver()), separating_level);
        int level = 0;
        auto separated = [&](int n) {
            for (const auto& j : S.driver().jumps())
                if (!P.contains(n, j.time)) return false;
            return true;
        };
        while (level < separating_level && !separated(level)) ++level;
        if (!separated(level)) {
            ++failures;
            continue;
        }
        deepest = std::max(deepest, level);
        auto c = correction_study(S, P, S.horizon(), separating_level);
        const double ledger = energy_ledger(S, S.horizon()).term_correction;
        for (int n = level; n <= separating_level; ++n) {
            if (std::abs(c.sums[n] - ledger) > 1e-12 * (1.0 + ledger)) {
                ++failures;
                break;
            }
        }
    }
    auto mixed = mixed_driver_scenario();
    PartitionHierarchy M(TimeChange(mixed.driver()), 14);
    auto m = correction_study(mixed, M, 1.0, 14);
    bool halving = true;
    for (int n = 0; n + 2 <= 14; ++n) halving = halving && m.gaps[n + 2] <= 0.5 * m.gaps[n];
    return {failures == 0 && halving,
            fmt("pure-jump failures %.0f (separating level <= %.0f), mixed gap %.3g at level 14", double(failures),
                double(deepest), m.gaps.back()) +
                (halving ? ", halving every two levels" : ", halving violated")};
}

// 5. Every ledger term scales by 1/n^2.
Outcome homogeneity() {
    double worst = 0.0;
    bool residuals = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto S = random_scenario(RandomScenarioSpec{.seed = seed});
        for (double n : {2.0, 10.0}) {
            auto h = homogeneity_check(S, n, S.horizon());
            worst = std::max(worst, h.max_ratio_deviation);
            residuals = residuals && h.base.within(1e-9) && h.scaled.within(1e-9);
        }
    }
    return {worst <= 1e-10 && residuals, fmt("max ratio deviation %.3g (limit 1e-10)", worst)};
}

// 6. Intersection dual norm against an exhaustive search and the analytic 1-D value.
Outcome dual_norm_oracle() {
    std::mt19937_64 rng(split_seed(6, 0));
    const std::vector<double> exps{1.0, 1.5, 2.0, 3.0};
    std::uniform_int_distribution<std::size_t> pick(0, exps.size() - 1);
    std::size_t misses = 0;
    double worst_gap = 0.0;
    for (int k = 0; k < 30; ++k) {
        const std::size_t d = 1 + k % 2;
        auto mu = testing::random_weights(rng, d), w0 = testing::random_weights(rng, d),
             w1 = testing::random_weights(rng, d);
        double p0 = exps[pick(rng)], p1 = exps[pick(rng)];
        SpaceFamily S(mu, {lp_space(p0, w0), lp_space(p1, w1)});
        auto w = testing::random_vector(rng, d, 2.0);
        auto brute = testing::brute_force_intersection(w, mu, w0, p0, w1, p1, d == 1 ? 4000 : 300);
        double value = dual_norm_intersection(w, S);
        worst_gap = std::max(worst_gap, std::abs(value - brute.value));
        if (value > brute.value + 1e-9 || value < brute.value - brute.resolution - 1e-9) ++misses;
    }
    double worst_analytic = 0.0;
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int k = 0; k < 30; ++k) {
        double a = u(rng), b = u(rng), x = u(rng) - 1.5, p = exps[pick(rng)];
        // Norms a|.| and b|.| on R as weighted L_p norms.
        SpaceFamily S({1.0}, {lp_space(p, {std::pow(a, p)}), lp_space(p, {std::pow(b, p)})});
        worst_analytic = std::max(worst_analytic, std::abs(dual_norm_intersection(HVector{x}, S) - std::abs(x) / (a + b)));
    }
    return {misses == 0 && worst_analytic <= 1e-4,
            fmt("exhaustive misses %.0f of 30 (max |diff| %.3g), analytic error %.3g", double(misses), worst_gap,
                worst_analytic)};
}

// 7. SPDE run: per-step ledger closes; correction shrinks with the time step.
Outcome spde_demo() {
    SpdeConfig cfg;
    auto run = euler_run(cfg);
    std::vector<double> times(run.times.begin() + 1, run.times.end());
    auto ledgers = energy_ledgers(run.scenario, times);
    double worst = 0.0;
    bool closed = ledgers.size() == 100;
    for (const auto& L : ledgers) {
        worst = std::max(worst, std::abs(L.residual) / (1.0 + std::abs(L.lhs)));
        closed = closed && L.within(1e-9);
    }
    cfg.wiener = false;
    cfg.jumps = false;
    auto coarse = euler_run(cfg);
    cfg.dt /= 2.0;
    auto fine = euler_run(cfg);
    const double a = energy_ledger(coarse.scenario, coarse.scenario.horizon()).term_correction;
    const double b = energy_ledger(fine.scenario, fine.scenario.horizon()).term_correction;
    const double factor = a / b;
    return {closed && factor >= 1.8,
            fmt("%.0f steps, worst scaled residual %.3g, halving factor %.4f", double(ledgers.size()), worst, factor)};
}

// 8. Cross integrand outgrows the hypothesis integrands along the ramp.
Outcome integrability_gap() {
    SpdeConfig cfg;
    cfg.grid = 128;
    cfg.length = 1.0;
    cfg.p1 = 1.5;
    cfg.p2 = 4.0;
    cfg.wiener = false;
    cfg.jumps = false;
    cfg.dt = 1.0 / 40.0;
    auto rep = integrability_report(amplitude_ramp_run(cfg, 1, 40));
    bool monotone = true;
    for (std::size_t k = 1; k < rep.ratio.size(); ++k) monotone = monotone && rep.ratio[k] > rep.ratio[k - 1];
    const double growth = rep.ratio.back() / rep.ratio.front();
    return {monotone && growth >= 10.0 && rep.hypotheses_finite && rep.gap,
            fmt("ratio %.3g -> %.3g, growth %.2fx", rep.ratio.front(), rep.ratio.back(), growth) +
                (monotone ? ", monotone" : ", not monotone") + (rep.hypotheses_finite ? ", hypotheses finite" : "")};
}

// 9. Generated noise passes the ensemble gate; a one-sd drift fails it.
Outcome ensemble_statistics() {
    SpdeConfig cfg;
    cfg.grid = 4;
    cfg.dt = 1e-3;
    cfg.horizon = 0.01;
    const std::size_t N = 10000;
    const std::size_t steps = cfg.steps();
    auto spaces = spde_spaces(cfg);
    std::vector<MartingalePath> paths;
    paths.reserve(N);
    for (std::size_t k = 0; k < N; ++k) {
        auto c = cfg;
        c.seed = split_seed(9, k);
        paths.push_back(euler_run(c).scenario.noise());
    }
    std::vector<double> grid;
    for (std::size_t k = 1; k <= steps; ++k) grid.push_back(static_cast<double>(k) * cfg.dt);
    auto clean = ensemble_martingale_check([&](std::uint64_t k) { return paths[k]; }, N, grid, spaces);

    // Per-step increment standard deviation in each coordinate, computed here.
    std::vector<std::vector<double>> sd(steps, std::vector<double>(cfg.grid, 0.0));
    for (std::size_t s = 0; s < steps; ++s) {
        const double lo = s == 0 ? 0.0 : grid[s - 1];
        for (std::size_t j = 0; j < cfg.grid; ++j) {
            double sum = 0.0, sum2 = 0.0;
            for (const auto& h : paths) {
                double inc = h(grid[s])[j] - h(lo)[j];
                sum += inc;
                sum2 += inc * inc;
            }
            const double mean = sum / N;
            sd[s][j] = std::sqrt(std::max(0.0, sum2 / N - mean * mean));
        }
    }
    auto drifted = [&](std::uint64_t k) {
        const auto& h = paths[k];
        std::vector<double> times(grid);
        std::vector<HVector> values;
        HVector shift(cfg.grid);
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t j = 0; j < cfg.grid; ++j) shift[j] += sd[s][j];
            values.push_back(h(grid[s]) + shift);
        }
        return MartingalePath(h.initial(), std::move(times), std::move(values));
    };
    auto dirty = ensemble_martingale_check(drifted, N, grid, spaces);
    return {clean.passed && !dirty.passed,
            fmt("N = %.0f, clean worst z %.3g, drifted worst z %.3g", double(N), clean.worst_z, dirty.worst_z)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"energy identity suite", energy_identity},
        {"telescoping suite", telescoping},
        {"time-change suite", time_change_suite},
        {"correction convergence", correction_convergence},
        {"homogeneity", homogeneity},
        {"dual-norm oracle equivalence", dual_norm_oracle},
        {"SPDE demo", spde_demo},
        {"integrability gap", integrability_gap},
        {"ensemble martingale statistics", ensemble_statistics},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %zu %s: %s (%s; %.2f s)\n", k + 1, criteria[k].first, out.passed ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.passed) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
