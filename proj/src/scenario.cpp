#include "itolab/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "itolab/error.hpp"

namespace itolab {

namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> gl_nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                         0.9061798459386640};
constexpr std::array<double, 5> gl_weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};

// int_{(0,t]} f(s) dA(s): exact on jumps, composite Gauss-Legendre on the density
// pieces between consecutive cut points.
template <class F>
double integrate_against_driver(const IncreasingDriver& A, std::vector<double> cuts, double t, F&& f) {
    double sum = 0.0;
    for (const auto& j : A.jumps()) {
        if (j.time <= t) sum += f(j.time) * j.size;
    }
    for (const auto& seg : A.density()) {
        double end = std::min(seg.end, t);
        if (!(end > seg.start) || seg.slope == 0.0) continue;
        std::vector<double> pts{seg.start, end};
        for (double c : cuts) {
            if (c > seg.start && c < end) pts.push_back(c);
        }
        std::sort(pts.begin(), pts.end());
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            constexpr int pieces = 8;
            double h = (pts[k + 1] - pts[k]) / pieces;
            for (int p = 0; p < pieces; ++p) {
                double mid = pts[k] + (p + 0.5) * h;
                for (std::size_t g = 0; g < gl_nodes.size(); ++g) {
                    sum += gl_weights[g] * 0.5 * h * f(mid + 0.5 * h * gl_nodes[g]) * seg.slope;
                }
            }
        }
    }
    return sum;
}

double power_norm(double n, double p) { return p == 1.0 ? n : std::pow(n, p); }

double root(double x, double p) { return p == 1.0 ? x : std::pow(x, 1.0 / p); }

} // namespace

MartingalePath::MartingalePath(HVector initial, std::vector<double> times, std::vector<HVector> values) {
    if (times.size() != values.size()) {
        throw Error(ErrorCode::dimension_mismatch, "martingale path needs one value per event time");
    }
    if (!initial.all_finite()) throw Error(ErrorCode::invalid_argument, "martingale initial value not finite");
    std::vector<HVector> all;
    all.reserve(values.size() + 1);
    const std::size_t d = initial.size();
    all.push_back(std::move(initial));
    for (auto& v : values) {
        require_dim(v, d, "martingale path value");
        if (!v.all_finite()) throw Error(ErrorCode::invalid_argument, "martingale path value not finite");
        all.push_back(std::move(v));
    }
    path_ = StepFunction<HVector>(std::move(times), std::move(all), Side::right_open);
}

double MartingalePath::quadratic_variation(double t, const SpaceFamily& S) const {
    auto times = path_.breaks();
    auto values = path_.values();
    double qv = 0.0;
    for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) {
        HVector jump = values[k + 1] - values[k];
        qv += h_inner(jump, jump, S);
    }
    return qv;
}

MartingalePath MartingalePath::scaled(double factor) const {
    auto values = path_.values();
    std::vector<HVector> rest;
    for (std::size_t k = 1; k < values.size(); ++k) rest.push_back(values[k] * factor);
    auto times = path_.breaks();
    return MartingalePath(values[0] * factor, std::vector<double>(times.begin(), times.end()), std::move(rest));
}

DualStepProcess::DualStepProcess(std::size_t space_index, std::vector<double> breaks, std::vector<HVector> values,
                                 std::vector<double> dominators, const SpaceFamily& S)
    : space_(space_index) {
    const auto& space = S.space(space_index);
    if (dominators.size() != values.size()) {
        throw Error(ErrorCode::dimension_mismatch, "one dominator per drift value is required");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        require_dim(values[k], S.dim(), "drift value");
        if (!values[k].all_finite()) throw Error(ErrorCode::invalid_argument, "drift value not finite");
        double bound = space.kind == SpaceKind::lp ? dual_norm_lp(values[k], space_index, S)
                                                   : dual_norm_lower_bound(values[k], space_index, S);
        if (!(dominators[k] >= bound - 1e-12 * (1.0 + bound))) {
            throw Error(ErrorCode::invalid_argument,
                        "dominator " + std::to_string(dominators[k]) + " below the dual norm " +
                            std::to_string(bound) + " on piece " + std::to_string(k));
        }
    }
    value_ = StepFunction<HVector>(breaks, std::move(values), Side::left_open);
    eta_ = StepFunction<double>(std::move(breaks), std::move(dominators), Side::left_open);
}

DualStepProcess DualStepProcess::with_default_dominator(std::size_t space_index, std::vector<double> breaks,
                                                        std::vector<HVector> values, const SpaceFamily& S) {
    std::vector<double> eta;
    for (const auto& v : values) eta.push_back(dual_norm_lp_part(v, space_index, S));
    return DualStepProcess(space_index, std::move(breaks), std::move(values), std::move(eta), S);
}

double DualStepProcess::running_bound(double t, const IncreasingDriver& A, const SpaceFamily& S) const {
    const double q = S.space(space_).conjugate();
    if (!std::isinf(q)) {
        return root(stieltjes_integral(eta_.map([q](double e) { return std::pow(e, q); }), A, t), q);
    }
    double sup = 0.0;
    for (const auto& j : A.jumps()) {
        if (j.time <= t) sup = std::max(sup, eta_(j.time));
    }
    auto breaks = eta_.breaks();
    auto values = eta_.values();
    for (const auto& seg : A.density()) {
        if (seg.slope == 0.0) continue;
        for (std::size_t k = 0; k < values.size(); ++k) {
            double lo = std::max(seg.start, k == 0 ? 0.0 : breaks[k - 1]);
            double hi = std::min(seg.end, k < breaks.size() ? breaks[k] : infinite_time);
            if (hi > lo && lo <= t) sup = std::max(sup, values[k]);
        }
    }
    return sup;
}

Scenario::Scenario(SpaceFamily spaces, IncreasingDriver driver, MartingalePath noise,
                   std::vector<DualStepProcess> drifts, double horizon)
    : spaces_(std::move(spaces)), driver_(std::move(driver)), noise_(std::move(noise)), drifts_(std::move(drifts)),
      horizon_(horizon) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw Error(ErrorCode::invalid_argument, "scenario horizon must be positive and finite");
    }
    require_dim(noise_.initial(), spaces_.dim(), "scenario martingale");
    if (drifts_.size() != spaces_.count()) {
        throw Error(ErrorCode::dimension_mismatch, "scenario needs exactly one drift per space");
    }
    for (std::size_t i = 0; i < drifts_.size(); ++i) {
        if (drifts_[i].space_index() != i) {
            throw Error(ErrorCode::invalid_argument, "drift " + std::to_string(i) + " refers to another space");
        }
        require_dim(drifts_[i].value().values().front(), spaces_.dim(), "scenario drift");
    }
}

HVector Scenario::drift_integral(double t, Window window) const {
    HVector sum(spaces_.dim());
    for (const auto& drift : drifts_) sum += stieltjes_integral(drift.value(), driver_, t, window);
    return sum;
}

HVector Scenario::drift_between(double a, double b) const {
    HVector sum(spaces_.dim());
    for (const auto& drift : drifts_) sum += stieltjes_between(drift.value(), driver_, a, b);
    return sum;
}

HVector Scenario::state(double t) const { return drift_integral(t) + noise_(t); }

HVector Scenario::state_left(double t) const { return drift_integral(t, Window::open) + noise_.left_limit(t); }

HVector Scenario::total_drift(double t) const {
    HVector sum(spaces_.dim());
    for (const auto& drift : drifts_) sum += drift(t);
    return sum;
}

std::vector<double> Scenario::event_times() const {
    std::vector<double> times;
    for (const auto& j : driver_.jumps()) {
        if (j.time <= horizon_) times.push_back(j.time);
    }
    for (double t : noise_.event_times()) {
        if (t <= horizon_) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

std::vector<double> Scenario::breakpoints() const {
    auto times = event_times();
    for (double t : driver_.breakpoints()) times.push_back(t);
    for (const auto& drift : drifts_) {
        for (double t : drift.value().breaks()) times.push_back(t);
    }
    std::erase_if(times, [this](double t) { return t > horizon_; });
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

bool Scenario::is_event_time(double t) const {
    auto times = event_times();
    return std::binary_search(times.begin(), times.end(), t);
}

Scenario scaling_reduce(const Scenario& S, double n) {
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::invalid_argument, "scaling factor must be positive");
    return Scenario(S.spaces(), S.driver().scaled(1.0 / n), S.noise().scaled(1.0 / n), S.drifts(), S.horizon());
}

Scenario normalize_mass(const Scenario& S) {
    const double mass = S.driver().total_mass();
    return mass > 1.0 ? scaling_reduce(S, mass) : S;
}

double state_norm_integral(const Scenario& S, std::size_t i, double t) {
    const double p = S.spaces().space(i).exponent;
    return integrate_against_driver(S.driver(), S.breakpoints(), t,
                                    [&](double s) { return power_norm(v_norm(S.state(s), i, S.spaces()), p); });
}

double regularity_process(const Scenario& S, double t) {
    const auto& spaces = S.spaces();
    double r = h_norm(S.noise().initial(), spaces) + S.driver()(t);
    for (std::size_t i = 0; i < spaces.count(); ++i) {
        const double p = spaces.space(i).exponent;
        r += root(state_norm_integral(S, i, t), p);
        r += S.drifts()[i].running_bound(t, S.driver(), spaces);
        for (std::size_t k = 1; k <= spaces.dim(); ++k) {
            auto norm_p = S.noise().steps().map(
                [&](const HVector& h) { return power_norm(v_norm(project(h, k, spaces), i, spaces), p); });
            double weight = std::exp2(-spaces.basis_constants()[k - 1]);
            r += weight * root(stieltjes_integral(norm_p, S.driver(), t), p);
        }
    }
    return r;
}

StepFunction<HVector> step_approximation(const std::function<HVector(double)>& path, const PartitionHierarchy& P,
                                         int level, int variant) {
    auto taus = P.finite_points(level);
    std::vector<HVector> values;
    values.reserve(taus.size() + 1);
    if (variant == 1) {
        // v(tau_j) on [tau_j, tau_{j+1}), zero before tau_1.
        values.push_back(path(0.0) * 0.0);
        for (double tau : taus) values.push_back(path(tau));
        return StepFunction<HVector>(std::move(taus), std::move(values), Side::right_open);
    }
    if (variant == 2) {
        // v(tau_{j+1}) on (tau_j, tau_{j+1}]; beyond the last finite point the
        // next partition time is the +inf sentinel.
        for (double tau : taus) values.push_back(path(tau));
        values.push_back(path(infinite_time));
        return StepFunction<HVector>(std::move(taus), std::move(values), Side::left_open);
    }
    throw Error(ErrorCode::invalid_argument, "step approximation variant must be 1 or 2");
}

std::vector<StepApproximationError> step_approximation_errors(const Scenario& S, const PartitionHierarchy& P,
                                                              int level, int variant) {
    auto approx = step_approximation([&S](double t) { return S.state(t); }, P, level, variant);
    auto cuts = S.breakpoints();
    for (double tau : P.finite_points(level)) cuts.push_back(tau);
    std::vector<StepApproximationError> out;
    for (std::size_t i = 0; i < S.spaces().count(); ++i) {
        const double p = S.spaces().space(i).exponent;
        double err = integrate_against_driver(S.driver(), cuts, infinite_time, [&](double s) {
            return power_norm(v_norm(S.state(s) - approx(s), i, S.spaces()), p);
        });
        out.push_back({level, i, err});
    }
    return out;
}

EnsembleReport ensemble_martingale_check(const PathSampler& sampler, std::size_t N, std::span<const double> grid,
                                         const SpaceFamily& S) {
    if (N < 100) throw Error(ErrorCode::invalid_argument, "ensemble check needs N >= 100");
    const std::size_t d = S.dim();
    const std::size_t G = grid.size();
    std::vector<double> mean(G * d, 0.0);
    std::vector<double> m2(G * d, 0.0);
    std::vector<double> qv(G, 0.0);

    for (std::size_t n = 0; n < N; ++n) {
        MartingalePath h = sampler(n);
        require_dim(h.initial(), d, "ensemble sample");
        const HVector* prev = &h.initial();
        for (std::size_t g = 0; g < G; ++g) {
            const HVector& cur = h(grid[g]);
            for (std::size_t j = 0; j < d; ++j) {
                double x = cur[j] - (*prev)[j];
                double& mu = mean[g * d + j];
                double delta = x - mu;
                mu += delta / static_cast<double>(n + 1);
                m2[g * d + j] += delta * (x - mu);
            }
            qv[g] += h.quadratic_variation(grid[g], S);
            prev = &cur;
        }
    }

    EnsembleReport report;
    report.samples = N;
    report.grid.assign(grid.begin(), grid.end());
    for (std::size_t g = 0; g < G; ++g) report.mean_qv.push_back(qv[g] / static_cast<double>(N));
    const double rootN = std::sqrt(static_cast<double>(N));
    for (std::size_t k = 0; k < G * d; ++k) {
        double sd = std::sqrt(m2[k] / static_cast<double>(N - 1));
        double mu = std::abs(mean[k]);
        if (sd == 0.0) {
            if (mu != 0.0) {
                report.passed = false;
                report.worst_z = infinite_time;
            }
            continue;
        }
        double z = mu / (sd / rootN);
        report.worst_z = std::max(report.worst_z, z);
        if (z > 3.0) report.passed = false;
    }
    return report;
}

} // namespace itolab
