#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "itolab/hvector.hpp"
#include "itolab/scenario.hpp"
#include "itolab/spaces.hpp"

namespace itolab {

/// 1-D finite-difference model of
///   du = [div(|Du|^{p1-2} Du) + |u|^{p2-2} u] dt + sigma u dW + int gamma u / (1 + z) q(dt, dz)
/// on (0, length) with zero boundary values and `grid` interior nodes.
struct SpdeConfig {
    std::size_t grid = 32;
    double length = 2.0;
    double p1 = 2.0;
    double p2 = 3.0;
    double dt = 1e-3;
    double horizon = 0.1;

    // Initial profile amplitude * sin(mode pi x / length).
    double amplitude = 1.0;
    int mode = 1;

    bool wiener = true;
    double sigma = 0.5; ///< f(u, Du) = sigma u, independent increments per node

    bool jumps = true;
    double jump_rate = 5.0;    ///< Poisson intensity lambda
    std::size_t marks = 4;     ///< marks uniform on {1, ..., marks}
    double gamma = 0.2;        ///< g(u)(z) = gamma u / (1 + z)

    double blowup_cap = 1e8; ///< abort when max |u| exceeds this
    std::uint64_t seed = 0;

    /// Throws ErrorCode::invalid_argument on inadmissible values.
    void validate() const;
    /// Node spacing length / (grid + 1).
    double spacing() const noexcept { return length / static_cast<double>(grid + 1); }
    std::size_t steps() const;
};

/// H = L_2 and V_2 = L_{p2} with node weights equal to the spacing; V_1 = W^1_{p1}
/// with the same node and edge weights.
SpaceFamily spde_spaces(const SpdeConfig& cfg);

/// (F_{j+1/2} - F_{j-1/2}) / spacing with flux F = |Du|^{p1-2} Du on the d + 1 edges.
HVector p_laplacian(const HVector& u, double p1, const SpdeConfig& cfg);
/// |u|^{p2-2} u pointwise.
HVector power_drift(const HVector& u, double p2);
/// L_{q1} norm of the flux magnitude |Du|^{p1-1}; bounds the W^1_{p1}-dual norm
/// of p_laplacian(u) by summation by parts.
double flux_dual_bound(const HVector& u, double p1, const SpdeConfig& cfg);

HVector initial_profile(const SpdeConfig& cfg);

struct SpdeRun {
    SpdeConfig config;
    Scenario scenario;
    std::vector<double> times;    ///< 0 and the step times
    std::vector<HVector> states;  ///< u_k from the recursion
    std::vector<double> norm_w1p; ///< ||u_k||_{W^1_{p1}}
    std::vector<double> norm_lp;  ///< ||u_k||_{L_{p2}}
};

/// Explicit Euler run packaged as a scenario: A jumps by dt at each step time,
/// v_1*, v_2* are the drift evaluations at the previous state and h collects the
/// initial value and the noise increments. Throws ErrorCode::numerical_blowup
/// (with the step index) when the state exceeds the cap or the time step leaves
/// the explicit stability region.
SpdeRun euler_run(const SpdeConfig& cfg);

/// Deterministic path u_k = c_k sin(k' pi x / length) for modes k' = first..last,
/// with amplitudes balancing ||u||_{L_{p2}}^{p2} against ||u||_{W^1_{p1}}^{p1}. The
/// noise path absorbs whatever the drift does not explain, so v = u exactly at
/// the step times.
SpdeRun amplitude_ramp_run(const SpdeConfig& cfg, int first_mode, int last_mode);

struct IntegrabilityReport {
    double state_integral_w1p = 0.0; ///< int ||u||^{p1}_{W^1_{p1}} dA
    double state_integral_lp = 0.0;  ///< int ||u||^{p2}_{L_{p2}} dA
    double dual_bound_w1p = 0.0;     ///< (int eta_1^{q1} dA)^{1/q1}
    double dual_bound_lp = 0.0;      ///< (int eta_2^{q2} dA)^{1/q2}
    double cross_integral = 0.0;     ///< int ||u||_{W^1_{p1}} ||u||^{p2-1}_{L_{p2}} dA
    std::vector<double> times;
    std::vector<double> cross;       ///< cross integrand per step
    std::vector<double> hypothesis;  ///< ||u||^{p1} + ||u||^{p2} + eta_1^{q1} + eta_2^{q2} per step
    std::vector<double> ratio;       ///< cross / hypothesis
    bool hypotheses_finite = false;
    bool gap = false;                ///< some cross integrand exceeds the hypothesis integrand
};

IntegrabilityReport integrability_report(const SpdeRun& run);

} // namespace itolab
