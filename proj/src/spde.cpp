#include "itolab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "itolab/driver.hpp"
#include "itolab/error.hpp"
#include "itolab/random.hpp"

namespace itolab {

namespace {

// |x|^{p-2} x, with 0 at x = 0 for every p > 1.
double signed_power(double x, double p) {
    if (x == 0.0) return 0.0;
    if (p == 2.0) return x;
    return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double rms(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Linearised coefficient (p - 1)|x|^{p-2}. For p >= 2 the worst case is the largest
// amplitude; for p < 2 it diverges at zero, so the typical (rms) amplitude is used.
double linearised(std::span<const double> x, double p) {
    if (p == 2.0) return 1.0;
    double level = p > 2.0 ? max_abs(x) : rms(x);
    if (level == 0.0) return 0.0;
    return (p - 1.0) * std::pow(level, p - 2.0);
}

double stability_rate(const HVector& u, const SpdeConfig& cfg) {
    const double h = cfg.spacing();
    auto du = forward_difference(u, h);
    return 4.0 * linearised(du, cfg.p1) / (h * h) + linearised(u.span(), cfg.p2);
}

HVector sine_mode(const SpdeConfig& cfg, int mode, double amplitude) {
    HVector u(cfg.grid);
    const double h = cfg.spacing();
    for (std::size_t j = 0; j < cfg.grid; ++j) {
        double x = static_cast<double>(j + 1) * h;
        u[j] = amplitude * std::sin(mode * std::numbers::pi * x / cfg.length);
    }
    return u;
}

std::vector<DualStepProcess> step_drifts(const std::vector<double>& breaks, const std::vector<HVector>& states,
                                         const SpdeConfig& cfg, const SpaceFamily& S) {
    std::vector<HVector> a1, a2;
    std::vector<double> eta1, eta2;
    for (const auto& u : states) {
        a1.push_back(p_laplacian(u, cfg.p1, cfg));
        eta1.push_back(flux_dual_bound(u, cfg.p1, cfg));
        a2.push_back(power_drift(u, cfg.p2));
        eta2.push_back(dual_norm_lp(a2.back(), 1, S));
    }
    std::vector<DualStepProcess> drifts;
    drifts.emplace_back(0, breaks, std::move(a1), std::move(eta1), S);
    drifts.emplace_back(1, breaks, std::move(a2), std::move(eta2), S);
    return drifts;
}

void record_norms(SpdeRun& run, const SpaceFamily& S) {
    for (const auto& u : run.states) {
        run.norm_w1p.push_back(v_norm(u, 0, S));
        run.norm_lp.push_back(v_norm(u, 1, S));
    }
}

} // namespace

void SpdeConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_argument, "spde config: " + what); };
    if (grid < 3) fail("grid must have at least 3 nodes");
    if (!(length > 0.0) || !std::isfinite(length)) fail("length must be positive");
    if (!(p1 > 1.0) || !(p2 > 1.0)) fail("exponents must exceed 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("horizon must be positive");
    if (!std::isfinite(amplitude)) fail("amplitude must be finite");
    if (!std::isfinite(sigma) || !std::isfinite(gamma)) fail("noise coefficients must be finite");
    if (jumps && (!(jump_rate >= 0.0) || marks == 0)) fail("jump noise needs a nonnegative rate and marks");
    if (!(blowup_cap > 0.0)) fail("blowup cap must be positive");
}

std::size_t SpdeConfig::steps() const {
    return static_cast<std::size_t>(std::max(1.0, std::round(horizon / dt)));
}

SpaceFamily spde_spaces(const SpdeConfig& cfg) {
    const double h = cfg.spacing();
    std::vector<double> nodes(cfg.grid, h);
    std::vector<SpaceDescriptor> spaces{w1p_space(cfg.p1, nodes, h, std::vector<double>(cfg.grid + 1, h)),
                                        lp_space(cfg.p2, nodes)};
    return SpaceFamily(nodes, std::move(spaces));
}

HVector p_laplacian(const HVector& u, double p1, const SpdeConfig& cfg) {
    if (!(p1 > 1.0)) throw Error(ErrorCode::invalid_argument, "p-Laplacian needs p1 > 1");
    require_dim(u, cfg.grid, "p_laplacian");
    const double h = cfg.spacing();
    auto du = forward_difference(u, h);
    HVector out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        out[j] = (signed_power(du[j + 1], p1) - signed_power(du[j], p1)) / h;
    }
    return out;
}

HVector power_drift(const HVector& u, double p2) {
    if (!(p2 > 1.0)) throw Error(ErrorCode::invalid_argument, "power drift needs p2 > 1");
    HVector out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = signed_power(u[j], p2);
    return out;
}

double flux_dual_bound(const HVector& u, double p1, const SpdeConfig& cfg) {
    const double h = cfg.spacing();
    auto du = forward_difference(u, h);
    // |F|^{q1} = |Du|^{(p1-1) q1} = |Du|^{p1}.
    double s = 0.0;
    for (double g : du) s += h * std::pow(std::abs(g), p1);
    return std::pow(s, (p1 - 1.0) / p1);
}

HVector initial_profile(const SpdeConfig& cfg) { return sine_mode(cfg, cfg.mode, cfg.amplitude); }

SpdeRun euler_run(const SpdeConfig& cfg) {
    cfg.validate();
    SpaceFamily spaces = spde_spaces(cfg);
    const std::size_t n = cfg.steps();
    const std::size_t d = cfg.grid;

    auto rng = make_engine(cfg.seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(cfg.dt));
    const bool jump_noise = cfg.jumps && cfg.jump_rate > 0.0;
    std::poisson_distribution<int> arrivals(jump_noise ? cfg.jump_rate * cfg.dt : 1.0);
    std::uniform_int_distribution<std::size_t> mark(1, std::max<std::size_t>(1, cfg.marks));
    double mean_mark = 0.0;
    for (std::size_t z = 1; z <= cfg.marks; ++z) mean_mark += 1.0 / (1.0 + static_cast<double>(z));
    if (cfg.marks > 0) mean_mark /= static_cast<double>(cfg.marks);

    std::vector<double> times{0.0};
    std::vector<HVector> states{initial_profile(cfg)};
    std::vector<DriverJump> jumps;
    std::vector<double> noise_times;
    std::vector<HVector> noise_values;
    HVector noise = states.front();

    for (std::size_t k = 0; k < n; ++k) {
        const HVector& u = states.back();
        if (cfg.dt * stability_rate(u, cfg) > 2.0) {
            throw Error(ErrorCode::numerical_blowup,
                        "time step outside the explicit stability region at step " + std::to_string(k));
        }
        HVector dn(d);
        if (cfg.wiener && cfg.sigma != 0.0) {
            for (std::size_t j = 0; j < d; ++j) dn[j] += cfg.sigma * u[j] * gauss(rng);
        }
        if (jump_noise) {
            double marks_sum = 0.0;
            for (int a = arrivals(rng); a > 0; --a) marks_sum += 1.0 / (1.0 + static_cast<double>(mark(rng)));
            const double compensated = marks_sum - cfg.jump_rate * cfg.dt * mean_mark;
            for (std::size_t j = 0; j < d; ++j) dn[j] += cfg.gamma * u[j] * compensated;
        }
        HVector next = u + (p_laplacian(u, cfg.p1, cfg) + power_drift(u, cfg.p2)) * cfg.dt + dn;
        if (!next.all_finite() || max_abs(next.span()) > cfg.blowup_cap) {
            throw Error(ErrorCode::numerical_blowup, "state exceeded the blow-up cap at step " + std::to_string(k + 1));
        }
        const double t = static_cast<double>(k + 1) * cfg.dt;
        times.push_back(t);
        jumps.push_back({t, cfg.dt});
        noise += dn;
        noise_times.push_back(t);
        noise_values.push_back(noise);
        states.push_back(std::move(next));
    }

    std::vector<double> breaks(times.begin() + 1, times.end() - 1);
    std::vector<HVector> drift_states(states.begin(), states.end() - 1);
    auto drifts = step_drifts(breaks, drift_states, cfg, spaces);
    MartingalePath h(states.front(), std::move(noise_times), std::move(noise_values));
    const double T = times.back();
    SpdeRun run{cfg, Scenario(spaces, IncreasingDriver(std::move(jumps)), std::move(h), std::move(drifts), T),
                std::move(times), std::move(states), {}, {}};
    record_norms(run, spaces);
    return run;
}

SpdeRun amplitude_ramp_run(const SpdeConfig& cfg, int first_mode, int last_mode) {
    cfg.validate();
    if (first_mode < 1 || last_mode < first_mode) {
        throw Error(ErrorCode::invalid_argument, "ramp needs 1 <= first_mode <= last_mode");
    }
    SpaceFamily spaces = spde_spaces(cfg);
    std::vector<double> times{0.0};
    std::vector<HVector> states{HVector(cfg.grid)};
    for (int mode = first_mode; mode <= last_mode; ++mode) {
        HVector unit = sine_mode(cfg, mode, 1.0);
        double c = cfg.amplitude * mode;
        if (std::abs(cfg.p2 - cfg.p1) > 1e-12) {
            const double a = v_norm(unit, 0, spaces);
            const double b = v_norm(unit, 1, spaces);
            c = cfg.amplitude * std::pow(std::pow(a, cfg.p1) / std::pow(b, cfg.p2), 1.0 / (cfg.p2 - cfg.p1));
        }
        times.push_back(static_cast<double>(times.size()) * cfg.dt);
        states.push_back(unit * c);
    }

    std::vector<double> breaks(times.begin() + 1, times.end() - 1);
    std::vector<HVector> drift_states(states.begin(), states.end() - 1);
    auto drifts = step_drifts(breaks, drift_states, cfg, spaces);

    std::vector<DriverJump> jumps;
    std::vector<double> noise_times;
    std::vector<HVector> noise_values;
    HVector explained(cfg.grid);
    for (std::size_t k = 1; k < states.size(); ++k) {
        const HVector& prev = states[k - 1];
        explained += (p_laplacian(prev, cfg.p1, cfg) + power_drift(prev, cfg.p2)) * cfg.dt;
        jumps.push_back({times[k], cfg.dt});
        noise_times.push_back(times[k]);
        noise_values.push_back(states[k] - explained);
    }
    MartingalePath h(states.front(), std::move(noise_times), std::move(noise_values));
    const double T = times.back();
    SpdeRun run{cfg, Scenario(spaces, IncreasingDriver(std::move(jumps)), std::move(h), std::move(drifts), T),
                std::move(times), std::move(states), {}, {}};
    record_norms(run, spaces);
    return run;
}

IntegrabilityReport integrability_report(const SpdeRun& run) {
    const auto& S = run.scenario;
    const auto& spaces = S.spaces();
    const double p1 = spaces.space(0).exponent;
    const double p2 = spaces.space(1).exponent;
    const double q1 = spaces.space(0).conjugate();
    const double q2 = spaces.space(1).conjugate();

    IntegrabilityReport r;
    r.state_integral_w1p = state_norm_integral(S, 0, S.horizon());
    r.state_integral_lp = state_norm_integral(S, 1, S.horizon());
    r.dual_bound_w1p = S.drifts()[0].running_bound(S.horizon(), S.driver(), spaces);
    r.dual_bound_lp = S.drifts()[1].running_bound(S.horizon(), S.driver(), spaces);

    for (std::size_t k = 1; k < run.times.size(); ++k) {
        const double t = run.times[k];
        const double dA = S.driver().jump_at(t);
        const double a = run.norm_w1p[k];
        const double b = run.norm_lp[k];
        const double eta1 = S.drifts()[0].dominator()(t);
        const double eta2 = S.drifts()[1].dominator()(t);
        const double cross = a * std::pow(b, p2 - 1.0);
        const double hyp = std::pow(a, p1) + std::pow(b, p2) + std::pow(eta1, q1) + std::pow(eta2, q2);
        r.times.push_back(t);
        r.cross.push_back(cross);
        r.hypothesis.push_back(hyp);
        r.ratio.push_back(hyp > 0.0 ? cross / hyp : 0.0);
        r.cross_integral += cross * dA;
        if (hyp > 0.0 && cross > hyp) r.gap = true;
    }
    r.hypotheses_finite = std::isfinite(r.state_integral_w1p) && std::isfinite(r.state_integral_lp) &&
                          std::isfinite(r.dual_bound_w1p) && std::isfinite(r.dual_bound_lp);
    return r;
}

} // namespace itolab
