// Command-line runner for the verification suites.
//
// Every subcommand writes CSV/JSON artifacts into --out and exits with 0 only
// when all tolerances hold. Output is a pure function of the flags.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itolab/driver.hpp"
#include "itolab/energy.hpp"
#include "itolab/error.hpp"
#include "itolab/io.hpp"
#include "itolab/random.hpp"
#include "itolab/scenario.hpp"
#include "itolab/spaces.hpp"
#include "itolab/spde.hpp"

namespace fs = std::filesystem;
using namespace itolab;

namespace {

constexpr int exit_breach = 1;
constexpr int exit_config = 2;

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "itolab-out";
    std::optional<std::size_t> n;
    std::optional<double> tol;
    std::optional<int> levels;
    bool inject_fault = false;
    int first_mode = 1;
    int last_mode = 40;
};

std::ofstream open_out(const RunOptions& o, const std::string& name) {
    std::ofstream os(fs::path(o.out) / name, std::ios::binary);
    if (!os) throw Error(ErrorCode::invalid_argument, "cannot write " + (fs::path(o.out) / name).string());
    return os;
}

void write_json(const RunOptions& o, const std::string& name, const Json& j) { open_out(o, name) << j.dump(2) << '\n'; }

std::string num(double x) { return format_number(x); }

double ledger_ratio(const EnergyLedger& L) { return std::abs(L.residual) / (1.0 + L.lhs); }

void corrupt(EnergyLedger& L) {
    L.term_drift += 1e-3 * (1.0 + std::abs(L.lhs));
    L.residual = L.lhs - (L.term_h0 + L.term_drift + L.term_stoch - L.term_correction + L.term_qv);
}

int verify_identity(const RunOptions& o) {
    const std::size_t n = o.n.value_or(200);
    const std::uint64_t seed = o.seed.value_or(0);
    const double tol = o.tol.value_or(1e-9);
    const int levels = o.levels.value_or(4);
    constexpr double telescoping_tol = 1e-10;

    struct Item {
        std::string label;
        Scenario scenario;
    };
    auto make = [&](std::size_t k) -> Item {
        if (!o.config.empty()) return {"config", normalize_mass(scenario_from_json(read_json_file(o.config)))};
        RandomScenarioSpec spec;
        spec.seed = seed + k;
        return {std::to_string(spec.seed), random_scenario(spec)};
    };
    const std::size_t count = o.config.empty() ? n : 1;

    auto ledger_csv = open_out(o, "ledger.csv");
    write_ledger_header(ledger_csv, true);
    auto tele_csv = open_out(o, "telescoping.csv");
    tele_csv << "seed,level,points,max_relative_defect\n";

    double worst_ledger = 0.0;
    double worst_tele = 0.0;
    std::size_t rows = 0;
    std::vector<std::string> failures;
    for (std::size_t k = 0; k < count; ++k) {
        Item item = make(k);
        auto ledgers = event_ledgers(item.scenario);
        if (o.inject_fault && k == 0 && !ledgers.empty()) corrupt(ledgers.front());
        bool ok = true;
        for (const auto& L : ledgers) {
            write_ledger_row(ledger_csv, L, &item.label);
            worst_ledger = std::max(worst_ledger, ledger_ratio(L));
            ok = ok && L.within(tol);
        }
        rows += ledgers.size();
        PartitionHierarchy P(TimeChange(item.scenario.driver()), levels);
        for (int level = 1; level <= levels; ++level) {
            auto report = telescoping_check(item.scenario, P, level);
            tele_csv << item.label << ',' << level << ',' << report.rows.size() << ','
                     << num(report.max_relative_defect) << '\n';
            worst_tele = std::max(worst_tele, report.max_relative_defect);
            ok = ok && report.max_relative_defect <= telescoping_tol;
        }
        if (!ok) failures.push_back(item.label);
    }

    const bool passed = failures.empty();
    write_json(o, "summary.json",
               Json{{"command", "verify-identity"},
                    {"scenarios", count},
                    {"ledgers", rows},
                    {"tolerance", tol},
                    {"max_residual_ratio", worst_ledger},
                    {"max_telescoping_defect", worst_tele},
                    {"failing_seeds", failures},
                    {"passed", passed}});
    std::cout << "verify-identity: " << count << " scenarios, " << rows << " ledgers, max |residual|/(1+lhs) = "
              << num(worst_ledger) << ", max telescoping defect = " << num(worst_tele) << '\n';
    for (const auto& f : failures) std::cout << "FAIL seed " << f << '\n';
    return passed ? 0 : exit_breach;
}

int converge_partitions(const RunOptions& o) {
    const int levels = o.levels.value_or(10);
    const double tol = o.tol.value_or(1e-12);
    Scenario S = !o.config.empty() ? scenario_from_json(read_json_file(o.config))
                 : o.seed            ? random_scenario(RandomScenarioSpec{.seed = *o.seed})
                                     : one_jump_scenario();
    S = normalize_mass(S);
    PartitionHierarchy P(TimeChange(S.driver()), levels);
    const double t = S.horizon();
    auto study = correction_study(S, P, t, levels);
    if (o.inject_fault && !study.gaps.empty()) study.gaps.back() += 1.0;

    auto csv = open_out(o, "correction.csv");
    write_correction_csv(csv, study);
    for (int variant : {1, 2}) {
        std::vector<StepApproximationError> rows;
        for (int level = 0; level <= levels; ++level) {
            auto errs = step_approximation_errors(S, P, level, variant);
            rows.insert(rows.end(), errs.begin(), errs.end());
        }
        auto step_csv = open_out(o, "step_errors_v" + std::to_string(variant) + ".csv");
        write_step_error_csv(step_csv, rows);
    }

    bool passed = true;
    std::string criterion;
    if (S.driver().pure_jump()) {
        criterion = "final gap <= tol (1 + target)";
        passed = study.gaps.back() <= tol * (1.0 + study.target);
    } else {
        criterion = "gap(n + 2) <= gap(n) / 2";
        for (std::size_t k = 0; k + 2 < study.gaps.size(); ++k) passed = passed && study.gaps[k + 2] <= 0.5 * study.gaps[k];
    }
    write_json(o, "summary.json",
               Json{{"command", "converge-partitions"},
                    {"t", t},
                    {"target", study.target},
                    {"final_gap", study.gaps.back()},
                    {"pure_jump", S.driver().pure_jump()},
                    {"criterion", criterion},
                    {"passed", passed}});
    std::cout << "converge-partitions: target " << num(study.target) << ", K_n at level " << levels << " = "
              << num(study.sums.back()) << ", gap " << num(study.gaps.back()) << '\n';
    if (!passed) std::cout << "FAIL " << criterion << '\n';
    return passed ? 0 : exit_breach;
}

int lemma1_suite(const RunOptions& o) {
    const std::size_t n = o.n.value_or(1000);
    const std::uint64_t seed = o.seed.value_or(0);
    const double tol = o.tol.value_or(1e-12);
    const int levels = o.levels.value_or(12);

    struct Tally {
        std::size_t count = 0;
        std::size_t failures = 0;
        double worst = 0.0;
        std::vector<std::uint64_t> failing;
        void add(double defect, bool ok, std::uint64_t id) {
            ++count;
            worst = std::max(worst, defect);
            if (!ok) {
                ++failures;
                if (failing.size() < 10) failing.push_back(id);
            }
        }
    };
    Tally closed, open, lipschitz, squares;

    for (std::size_t k = 0; k < n; ++k) {
        auto rng = make_engine(seed, k);
        std::bernoulli_distribution coin(0.5);
        auto A = random_driver(rng, 20, 2.0, 1e-3, coin(rng));
        auto x = random_step(rng, 10, 2.0, Side::left_open);
        double t = std::uniform_real_distribution<double>(0.0, 2.2)(rng);
        for (auto window : {Window::closed, Window::open}) {
            auto sides = substitution_check(x, A, t, window);
            double defect = sides.scale > 0.0 ? std::abs(sides.lhs - sides.rhs) / sides.scale
                                              : std::abs(sides.lhs - sides.rhs);
            if (o.inject_fault && k == 0) defect = 1.0;
            (window == Window::closed ? closed : open).add(defect, defect <= tol, seed + k);
        }
        TimeChange beta(A);
        std::uniform_real_distribution<double> level(0.0, A.total_mass() + 0.2);
        double r1 = level(rng), r2 = level(rng);
        double gap = lipschitz_gap(beta, std::min(r1, r2), std::max(r1, r2)) - std::abs(r1 - r2);
        lipschitz.add(std::max(0.0, gap), lipschitz_check(beta, std::min(r1, r2), std::max(r1, r2)), seed + k);
    }

    // Squared increments: exact at a finite level for pure-jump drivers.
    const std::size_t jump_cases = std::max<std::size_t>(1, n / 10);
    for (std::size_t k = 0; k < (n == 0 ? 0 : jump_cases); ++k) {
        auto rng = make_engine(seed + 1'000'003, k);
        auto A = random_driver(rng, 20, 2.0, 1e-3, false);
        auto x = random_step(rng, 10, 2.0, Side::left_open);
        double t = std::uniform_real_distribution<double>(0.0, 2.2)(rng);
        auto sums = squared_increment_sums(x, A, levels, t);
        double target = squared_increment_target(x, A, t);
        double defect = std::abs(sums.back() - target) / (1.0 + target);
        squares.add(defect, defect <= tol, k);
    }
    IncreasingDriver unit({}, {{0.0, 1.0, 1.0}});
    StepFunction<double> one(1.0);
    auto unit_sums = squared_increment_sums(one, unit, levels, 1.0);
    const bool unit_ok = unit_sums.back() < 1e-3;

    auto csv = open_out(o, "lemma1.csv");
    csv << "check,count,failures,max_defect\n";
    auto row = [&](const char* name, const Tally& t) {
        csv << name << ',' << t.count << ',' << t.failures << ',' << num(t.worst) << '\n';
    };
    row("substitution_closed", closed);
    row("substitution_open", open);
    row("lipschitz", lipschitz);
    row("squared_increments_pure_jump", squares);
    auto sq = open_out(o, "squared_increments.csv");
    sq << "level,sum,target\n";
    for (std::size_t l = 0; l < unit_sums.size(); ++l) sq << l << ',' << num(unit_sums[l]) << ",0\n";

    const bool passed = closed.failures + open.failures + lipschitz.failures + squares.failures == 0 && unit_ok;
    write_json(o, "summary.json",
               Json{{"command", "lemma1-suite"},
                    {"cases", n},
                    {"substitution_max_defect", std::max(closed.worst, open.worst)},
                    {"lipschitz_failures", lipschitz.failures},
                    {"squared_increment_max_defect", squares.worst},
                    {"unit_density_final_sum", unit_sums.back()},
                    {"passed", passed}});
    std::cout << "lemma1-suite: " << n << " cases, substitution defect " << num(std::max(closed.worst, open.worst))
              << ", lipschitz failures " << lipschitz.failures << ", squared-increment defect " << num(squares.worst)
              << ", unit-density sum at level " << levels << " = " << num(unit_sums.back()) << '\n';
    for (const Tally* t : {&closed, &open, &lipschitz, &squares}) {
        for (auto id : t->failing) std::cout << "FAIL seed " << id << '\n';
    }
    if (!unit_ok) std::cout << "FAIL unit-density squared increments not below 1e-3\n";
    return passed ? 0 : exit_breach;
}

SpdeConfig spde_config(const RunOptions& o, SpdeConfig defaults) {
    SpdeConfig c = o.config.empty() ? defaults : spde_config_from_json(read_json_file(o.config));
    if (o.seed) c.seed = *o.seed;
    return c;
}

double total_correction(const SpdeRun& run) {
    return energy_ledger(run.scenario, run.scenario.horizon()).term_correction;
}

int spde_demo(const RunOptions& o) {
    const double tol = o.tol.value_or(1e-9);
    SpdeConfig cfg = spde_config(o, SpdeConfig{});
    SpdeRun run = euler_run(cfg);
    auto ledgers = energy_ledgers(run.scenario, run.times);
    if (o.inject_fault && ledgers.size() > 1) corrupt(ledgers[1]);

    auto csv = open_out(o, "spde_steps.csv");
    write_spde_csv(csv, run, ledgers);
    double worst = 0.0;
    std::vector<std::size_t> bad;
    for (std::size_t k = 0; k < ledgers.size(); ++k) {
        worst = std::max(worst, ledger_ratio(ledgers[k]));
        if (!ledgers[k].within(tol)) bad.push_back(k);
    }
    bool passed = bad.empty();

    Json summary{{"command", "spde-demo"},
                 {"config", to_json(cfg)},
                 {"steps", run.times.size() - 1},
                 {"max_residual_ratio", worst},
                 {"term_correction", ledgers.back().term_correction}};
    if (!cfg.wiener && !cfg.jumps) {
        SpdeConfig half = cfg;
        half.dt = cfg.dt / 2.0;
        const double factor = total_correction(run) / total_correction(euler_run(half));
        summary["halving_factor"] = factor;
        passed = passed && factor >= 1.8;
        std::cout << "spde-demo: halving dt reduces term_correction by " << num(factor) << '\n';
        if (factor < 1.8) std::cout << "FAIL halving factor below 1.8\n";
    }
    summary["passed"] = passed;
    write_json(o, "summary.json", summary);
    std::cout << "spde-demo: " << run.times.size() - 1 << " steps, max |residual|/(1+lhs) = " << num(worst) << '\n';
    for (auto k : bad) std::cout << "FAIL step " << k << " seed " << cfg.seed << '\n';
    return passed ? 0 : exit_breach;
}

int integrability_demo(const RunOptions& o) {
    SpdeConfig defaults;
    defaults.grid = 128;
    defaults.length = 1.0;
    defaults.p1 = 1.5;
    defaults.p2 = 4.0;
    defaults.wiener = false;
    defaults.jumps = false;
    defaults.dt = 1.0 / (o.last_mode - o.first_mode + 1);
    SpdeConfig cfg = spde_config(o, defaults);
    auto run = amplitude_ramp_run(cfg, o.first_mode, o.last_mode);
    auto report = integrability_report(run);

    auto csv = open_out(o, "integrability.csv");
    csv << "t,norm_w1p,norm_lp,cross,hypothesis,ratio\n";
    for (std::size_t k = 0; k < report.times.size(); ++k) {
        csv << num(report.times[k]) << ',' << num(run.norm_w1p[k + 1]) << ',' << num(run.norm_lp[k + 1]) << ','
            << num(report.cross[k]) << ',' << num(report.hypothesis[k]) << ',' << num(report.ratio[k]) << '\n';
    }
    Json j = to_json(report);
    j["command"] = "integrability-demo";
    j["config"] = to_json(cfg);
    const bool passed = report.hypotheses_finite;
    j["passed"] = passed;
    write_json(o, "integrability.json", j);
    std::cout << "integrability-demo: ratio " << num(report.ratio.front()) << " -> " << num(report.ratio.back())
              << ", " << (report.gap ? "gap" : "no gap") << ", hypotheses "
              << (report.hypotheses_finite ? "finite" : "not finite") << '\n';
    return passed ? 0 : exit_breach;
}

int dual_norm(const RunOptions& o) {
    const std::size_t n = o.n.value_or(30);
    const std::uint64_t seed = o.seed.value_or(0);
    const double analytic_tol = o.tol.value_or(1e-4);

    auto csv = open_out(o, "dual_norm.csv");
    csv << "case,kind,dim,search,reference,tolerance,passed\n";
    bool passed = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        auto rng = make_engine(seed, k);
        std::uniform_real_distribution<double> weight(0.5, 1.5), value(-2.0, 2.0);
        const std::vector<double> exps{1.0, 1.5, 2.0, 3.0};
        std::uniform_int_distribution<std::size_t> pick_p(0, exps.size() - 1), pick_d(1, 2);

        // Random two-space family against the exhaustive grid search.
        const std::size_t d = pick_d(rng);
        auto weights = [&] {
            std::vector<double> w(d);
            for (auto& x : w) x = weight(rng);
            return w;
        };
        auto hw = weights();
        auto w0 = weights();
        auto w1 = weights();
        SpaceFamily S(hw, {lp_space(exps[pick_p(rng)], w0), lp_space(exps[pick_p(rng)], w1)});
        HVector w(d);
        for (std::size_t j = 0; j < d; ++j) w[j] = value(rng);
        double search = dual_norm_intersection(w, S);
        auto brute = dual_norm_exhaustive(w, S);
        double slack = brute.resolution + 1e-9 * (1.0 + brute.value);
        bool ok = std::abs(search - brute.value) <= slack;
        if (o.inject_fault && k == 0) ok = false;
        worst = std::max(worst, std::abs(search - brute.value));
        csv << k << ",exhaustive," << d << ',' << num(search) << ',' << num(brute.value) << ',' << num(slack) << ','
            << ok << '\n';
        passed = passed && ok;

        // Scalar norms a|x| and b|x|: the dual norm of w is |w| / (a + b).
        const double a = weight(rng), b = weight(rng), p = exps[pick_p(rng)], q = exps[pick_p(rng)];
        SpaceFamily R({1.0}, {lp_space(p, {std::pow(a, p)}), lp_space(q, {std::pow(b, q)})});
        HVector x{value(rng)};
        double s = dual_norm_intersection(x, R);
        double exact = std::abs(x[0]) / (a + b);
        bool ok2 = std::abs(s - exact) <= analytic_tol;
        csv << k << ",analytic,1," << num(s) << ',' << num(exact) << ',' << num(analytic_tol) << ',' << ok2 << '\n';
        passed = passed && ok2;
    }
    write_json(o, "summary.json",
               Json{{"command", "dual-norm"}, {"cases", n}, {"max_exhaustive_difference", worst}, {"passed", passed}});
    std::cout << "dual-norm: " << n << " cases, max |search - exhaustive| = " << num(worst) << ", "
              << (passed ? "all within tolerance" : "FAIL") << '\n';
    return passed ? 0 : exit_breach;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification runner for the cadlag energy equality"};
    app.require_subcommand(1);
    RunOptions opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "base random seed");
        sub->add_option("--out", opts.out, "output directory (created if absent)");
        sub->add_option("--n", opts.n, "number of cases");
        sub->add_option("--tol", opts.tol, "tolerance override");
        sub->add_option("--levels", opts.levels, "partition levels");
        // Corrupts one computed value; used to test that breaches are reported.
        sub->add_flag("--inject-fault", opts.inject_fault)->group("");
        return sub;
    };
    using Runner = int (*)(const RunOptions&);
    std::vector<std::pair<CLI::App*, Runner>> commands{
        {add_common(app.add_subcommand("verify-identity", "energy ledgers and telescoping on random scenarios")),
         verify_identity},
        {add_common(app.add_subcommand("converge-partitions", "correction sums and step approximation errors")),
         converge_partitions},
        {add_common(app.add_subcommand("lemma1-suite", "time-change substitution, Lipschitz and squared increments")),
         lemma1_suite},
        {add_common(app.add_subcommand("spde-demo", "Euler run of the p-Laplacian model with its ledgers")),
         spde_demo},
        {add_common(app.add_subcommand("integrability-demo", "amplitude ramp and the cross-term ratio")),
         integrability_demo},
        {add_common(app.add_subcommand("dual-norm", "intersection dual norm against exhaustive and exact values")),
         dual_norm},
    };
    auto* ramp = commands[4].first;
    ramp->add_option("--first-mode", opts.first_mode, "first sine mode of the ramp")->check(CLI::PositiveNumber);
    ramp->add_option("--last-mode", opts.last_mode, "last sine mode of the ramp")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    try {
        fs::create_directories(opts.out);
        for (auto& [sub, run] : commands) {
            if (sub->parsed()) return run(opts);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return e.code() == ErrorCode::malformed_config ? exit_config : exit_breach;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return exit_config;
}
