#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "itolab/driver.hpp"
#include "itolab/hvector.hpp"
#include "itolab/scenario.hpp"

namespace itolab {

/// Both sides of the energy equality at one time, term by term.
struct EnergyLedger {
    double t = 0.0;
    double lhs = 0.0;             ///< |v(t)|^2
    double term_h0 = 0.0;         ///< |h(0)|^2
    double term_drift = 0.0;      ///< 2 sum_i int <v_i*, v> dA
    double term_stoch = 0.0;      ///< 2 int (v(s-), dh(s))
    double term_correction = 0.0; ///< int |v*|^2 dA over the jumps of A, i.e. sum |v*|^2 (Delta A)^2
    double term_qv = 0.0;         ///< [h]_t
    double residual = 0.0;

    /// |residual| <= tol (1 + lhs).
    bool within(double tol) const noexcept;
};

/// The cadlag path v~ = z^(2) + h of a scenario, with left limits.
class CadlagPath {
public:
    explicit CadlagPath(Scenario scenario) : scenario_(std::move(scenario)) {}

    HVector operator()(double t) const { return scenario_.state(t); }
    HVector left_limit(double t) const { return scenario_.state_left(t); }
    HVector jump_at(double t) const { return (*this)(t) - left_limit(t); }

    /// The path as a right-continuous step function; only for pure-jump drivers.
    StepFunction<HVector> steps() const;

    const Scenario& scenario() const noexcept { return scenario_; }

private:
    Scenario scenario_;
};

CadlagPath cadlag_modification(const Scenario& S);

struct WeakJump {
    HVector lhs; ///< jump of v~ - h at t
    HVector rhs; ///< Delta A(t) sum_i v_i*(t)
};
/// Throws ErrorCode::not_an_event unless t is a driver jump or noise event time.
WeakJump weak_jump_check(const Scenario& S, double t);

/// Ledger at a single time t <= horizon.
EnergyLedger energy_ledger(const Scenario& S, double t);
/// Ledgers at every requested time (any order), sharing one pass over the path.
std::vector<EnergyLedger> energy_ledgers(const Scenario& S, std::span<const double> times);
/// Ledgers at every event time of the scenario.
std::vector<EnergyLedger> event_ledgers(const Scenario& S);

/// Discrete telescoping identity at one partition point tau_j.
struct TelescopingRow {
    double t = 0.0;
    double lhs = 0.0; ///< |v(tau_j)|^2
    /// |h0|^2, drift pairings, noise pairings after tau_1, 2(h0, h(tau_1) - h0),
    /// squared noise increments, -|v(tau_1) - h(tau_1)|^2, -sum |dv - dh|^2 after tau_1.
    std::array<double, 7> terms{};
    double defect = 0.0;          ///< lhs - sum(terms)
    double relative_defect = 0.0; ///< |defect| / (|lhs| + sum |terms|)
};

struct TelescopingReport {
    int level = 0;
    std::vector<TelescopingRow> rows;
    double max_relative_defect = 0.0;
};

TelescopingReport telescoping_check(const Scenario& S, const PartitionHierarchy& P, int level);

/// 2 sum_k (v(tau_k), h(tau_{k+1} ^ t) - h(tau_k ^ t)) + |h(t)|^2 - |h0|^2 - [h]_t: the
/// stochastic term rebuilt from partition increments, as in the telescoping route.
double stochastic_term_partition(const Scenario& S, const PartitionHierarchy& P, int level, double t);

struct CorrectionStudy {
    double t = 0.0;
    double target = 0.0;       ///< sum_{s <= t} |v*(s)|^2 (Delta A(s))^2
    std::vector<double> sums;  ///< K_n(t) for n = 0..max_level
    std::vector<double> gaps;  ///< |K_n(t) - target|
};

CorrectionStudy correction_study(const Scenario& S, const PartitionHierarchy& P, double t, int max_level);

struct ItoSides {
    double lhs = 0.0;
    double rhs = 0.0;
};
/// |h(t)|^2 against |h(0)|^2 + 2 int (h(s-), dh(s)) + [h]_t for a pure-jump path.
ItoSides hilbert_ito_check(const MartingalePath& h, double t, const SpaceFamily& S);

struct HomogeneityReport {
    EnergyLedger base;
    EnergyLedger scaled;
    /// max over terms of |n^2 scaled - base| / |base| (zero when both vanish).
    double max_ratio_deviation = 0.0;
};
HomogeneityReport homogeneity_check(const Scenario& S, double n, double t);

} // namespace itolab
