#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "itolab/driver.hpp"
#include "itolab/hvector.hpp"
#include "itolab/spaces.hpp"
#include "itolab/step_function.hpp"

namespace itolab {

/// Pure-jump cadlag H-valued path, constant between event times.
class MartingalePath {
public:
    MartingalePath() = default;
    /// `values[k]` is the value from `times[k]` onwards; times must be positive and increasing.
    MartingalePath(HVector initial, std::vector<double> times, std::vector<HVector> values);

    const HVector& operator()(double t) const { return path_(t); }
    const HVector& left_limit(double t) const { return path_.left_limit(t); }
    HVector jump_at(double t) const { return path_(t) - path_.left_limit(t); }

    const HVector& initial() const { return path_.values().front(); }
    std::span<const double> event_times() const { return path_.breaks(); }
    const StepFunction<HVector>& steps() const noexcept { return path_; }
    std::size_t dim() const { return initial().size(); }

    /// [h]_t = sum_{s <= t} |Delta h(s)|^2_H, exact for pure-jump paths.
    double quadratic_variation(double t, const SpaceFamily& S) const;

    MartingalePath scaled(double factor) const;

private:
    StepFunction<HVector> path_;
};

/// Piecewise-constant V_i*-valued drift v_i* on left-open pieces, with a
/// dominating step process eta_i >= ||v_i*||_{V_i*}.
class DualStepProcess {
public:
    DualStepProcess() = default;
    /// Checks eta_i against the dual norm (analytic for L_p spaces, a certified
    /// lower bound for W1p spaces).
    DualStepProcess(std::size_t space_index, std::vector<double> breaks, std::vector<HVector> values,
                    std::vector<double> dominators, const SpaceFamily& S);
    /// eta_i taken as the exact dual norm (L_p) or the L_p-part dual norm, which
    /// dominates the W1p dual norm.
    static DualStepProcess with_default_dominator(std::size_t space_index, std::vector<double> breaks,
                                                  std::vector<HVector> values, const SpaceFamily& S);

    std::size_t space_index() const noexcept { return space_; }
    const HVector& operator()(double t) const { return value_(t); }
    const StepFunction<HVector>& value() const noexcept { return value_; }
    const StepFunction<double>& dominator() const noexcept { return eta_; }

    /// Q_i(t): (int_{(0,t]} eta^q dA)^{1/q}, or for q = inf the right-continuous
    /// running dA-essential supremum of eta.
    double running_bound(double t, const IncreasingDriver& A, const SpaceFamily& S) const;

private:
    std::size_t space_ = 0;
    StepFunction<HVector> value_;
    StepFunction<double> eta_;
};

/// The semimartingale v(t) = sum_i int_{(0,t]} v_i* dA + h(t) with all its parts.
class Scenario {
public:
    Scenario(SpaceFamily spaces, IncreasingDriver driver, MartingalePath noise, std::vector<DualStepProcess> drifts,
             double horizon);

    const SpaceFamily& spaces() const noexcept { return spaces_; }
    const IncreasingDriver& driver() const noexcept { return driver_; }
    const MartingalePath& noise() const noexcept { return noise_; }
    const std::vector<DualStepProcess>& drifts() const noexcept { return drifts_; }
    double horizon() const noexcept { return horizon_; }

    /// z^(2)(t) (closed window) or z^(1)(t) (open window).
    HVector drift_integral(double t, Window window = Window::closed) const;
    /// Drift integral over (a, b].
    HVector drift_between(double a, double b) const;
    /// v(t) = z^(2)(t) + h(t).
    HVector state(double t) const;
    /// v(t-) = z^(1)(t) + h(t-).
    HVector state_left(double t) const;
    /// v*(t) = sum_i v_i*(t).
    HVector total_drift(double t) const;

    /// Driver jump times and noise event times in (0, horizon], sorted and unique.
    std::vector<double> event_times() const;
    /// Every time where some ingredient changes behaviour, within (0, horizon].
    std::vector<double> breakpoints() const;
    bool is_event_time(double t) const;

private:
    SpaceFamily spaces_;
    IncreasingDriver driver_;
    MartingalePath noise_;
    std::vector<DualStepProcess> drifts_;
    double horizon_ = 0.0;
};

/// v, A and h scaled by 1/n with the drifts unchanged; the result again
/// satisfies the defining identity exactly.
Scenario scaling_reduce(const Scenario& S, double n);

/// Rescale so that the driver mass is at most 1 (factor 1 when already so).
Scenario normalize_mass(const Scenario& S);

/// The localising process r(t) built from |h(0)|, A, the p_i-integrals of v,
/// Q_i and the weighted projections w_k = Pi^k h.
double regularity_process(const Scenario& S, double t);

/// int_{(0,t]} ||v(s)||^{p_i}_{V_i} dA(s); exact on jumps, Gauss-Legendre on density pieces.
double state_norm_integral(const Scenario& S, std::size_t i, double t);

/// Step approximations of the state along a partition level.
struct StepApproximationError {
    int level = 0;
    std::size_t space = 0;
    double error = 0.0; ///< int ||v - v_n^(l)||^{p_i}_{V_i} dA
};

/// Left-sampled (variant 1) or right-sampled (variant 2) step path of `path` at a level.
StepFunction<HVector> step_approximation(const std::function<HVector(double)>& path, const PartitionHierarchy& P,
                                         int level, int variant);

/// int ||path - approximation||^{p_i}_{V_i} dA, per space, for the scenario state.
std::vector<StepApproximationError> step_approximation_errors(const Scenario& S, const PartitionHierarchy& P,
                                                              int level, int variant);

/// Ensemble test of the martingale property of a path generator.
struct EnsembleReport {
    bool passed = true;
    std::size_t samples = 0;
    double worst_z = 0.0;               ///< max |mean| / (std / sqrt(N)) over times and coordinates
    std::vector<double> grid;           ///< evaluation times
    std::vector<double> mean_qv;        ///< empirical <h> at grid times (mean of [h])
};

using PathSampler = std::function<MartingalePath(std::uint64_t sample_index)>;

/// Increments between consecutive grid times (starting at 0) must have
/// |mean| <= 3 std / sqrt(N) in every coordinate; zero-variance increments pass
/// only when their mean is zero.
EnsembleReport ensemble_martingale_check(const PathSampler& sampler, std::size_t N, std::span<const double> grid,
                                         const SpaceFamily& S);

} // namespace itolab
