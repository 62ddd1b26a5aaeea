#include "itolab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "itolab/error.hpp"

namespace itolab {

bool EnergyLedger::within(double tol) const noexcept { return std::abs(residual) <= tol * (1.0 + lhs); }

namespace {

void close_ledger(EnergyLedger& L) {
    L.residual = L.lhs - (L.term_h0 + L.term_drift + L.term_stoch - L.term_correction + L.term_qv);
}

double squared(const HVector& x, const SpaceFamily& S) { return h_inner(x, x, S); }

// Distinct partition times at a level, starting with 0 and ending with the
// +inf sentinel.
std::vector<double> partition_with_ends(const PartitionHierarchy& P, int level) {
    std::vector<double> taus{0.0};
    for (double t : P.finite_points(level)) taus.push_back(t);
    taus.push_back(infinite_time);
    return taus;
}

} // namespace

StepFunction<HVector> CadlagPath::steps() const {
    if (!scenario_.driver().pure_jump()) {
        throw Error(ErrorCode::unsupported, "a driver with a density part has no step representation");
    }
    auto times = scenario_.breakpoints();
    std::vector<HVector> values{scenario_.state(0.0)};
    for (double t : times) values.push_back(scenario_.state(t));
    return StepFunction<HVector>(std::move(times), std::move(values), Side::right_open);
}

CadlagPath cadlag_modification(const Scenario& S) { return CadlagPath(S); }

WeakJump weak_jump_check(const Scenario& S, double t) {
    if (!S.is_event_time(t)) {
        throw Error(ErrorCode::not_an_event, "t = " + std::to_string(t) + " is not an event time");
    }
    const auto& h = S.noise();
    HVector lhs = (S.state(t) - h(t)) - (S.state_left(t) - h.left_limit(t));
    HVector rhs = S.total_drift(t) * S.driver().jump_at(t);
    return {std::move(lhs), std::move(rhs)};
}

std::vector<EnergyLedger> energy_ledgers(const Scenario& S, std::span<const double> times) {
    std::vector<EnergyLedger> out(times.size());
    if (times.empty()) return out;
    for (double t : times) {
        if (!(t >= 0.0) || t > S.horizon()) {
            throw Error(ErrorCode::out_of_range, "ledger time " + std::to_string(t) + " outside [0, horizon]");
        }
    }
    const auto& spaces = S.spaces();
    const auto& A = S.driver();
    const auto& h = S.noise();
    const double last = *std::max_element(times.begin(), times.end());

    std::vector<double> cuts;
    for (double b : S.breakpoints()) {
        if (b <= last) cuts.push_back(b);
    }
    for (double t : times) {
        if (t > 0.0) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Requested times, visited in increasing order.
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    EnergyLedger running;
    running.term_h0 = squared(h.initial(), spaces);
    HVector v_prev = S.state(0.0);

    std::size_t next = 0;
    auto emit = [&](double t, const HVector& v) {
        while (next < order.size() && times[order[next]] == t) {
            EnergyLedger L = running;
            L.t = t;
            L.lhs = squared(v, spaces);
            close_ledger(L);
            out[order[next]] = L;
            ++next;
        }
    };
    emit(0.0, v_prev);

    double a = 0.0;
    for (double b : cuts) {
        // On (a, b) the drifts, the noise and the driver slope are constant, so v
        // is affine there and the midpoint rule is exact for <v_i*, v> dA.
        const double slope = A.slope_after(a);
        const HVector v_left = S.state_left(b);
        if (slope > 0.0) {
            HVector mid = (v_prev + v_left) * 0.5;
            for (const auto& drift : S.drifts()) {
                running.term_drift += 2.0 * duality_pair(drift(b), mid, spaces) * slope * (b - a);
            }
        }
        const HVector v = S.state(b);
        const double dA = A.jump_at(b);
        if (dA > 0.0) {
            for (const auto& drift : S.drifts()) running.term_drift += 2.0 * duality_pair(drift(b), v, spaces) * dA;
            running.term_correction += squared(S.total_drift(b), spaces) * dA * dA;
        }
        const HVector dh = h.jump_at(b);
        running.term_stoch += 2.0 * h_inner(v_left, dh, spaces);
        running.term_qv += squared(dh, spaces);
        emit(b, v);
        v_prev = v;
        a = b;
    }
    return out;
}

EnergyLedger energy_ledger(const Scenario& S, double t) {
    const double times[] = {t};
    return energy_ledgers(S, times).front();
}

std::vector<EnergyLedger> event_ledgers(const Scenario& S) {
    auto times = S.event_times();
    return energy_ledgers(S, times);
}

TelescopingReport telescoping_check(const Scenario& S, const PartitionHierarchy& P, int level) {
    const auto& spaces = S.spaces();
    const auto& h = S.noise();
    auto taus = P.finite_points(level);
    taus.insert(taus.begin(), 0.0);

    TelescopingReport report;
    report.level = level;
    if (taus.size() < 2) return report;

    const HVector& h0 = h.initial();
    std::vector<HVector> v;
    v.reserve(taus.size());
    for (double t : taus) v.push_back(S.state(t));

    std::array<double, 7> acc{};
    acc[0] = squared(h0, spaces);
    acc[3] = 2.0 * h_inner(h0, h(taus[1]) - h0, spaces);
    acc[5] = -squared(v[1] - h(taus[1]), spaces);

    for (std::size_t j = 1; j < taus.size(); ++j) {
        const std::size_t k = j - 1; // the increment over (tau_k, tau_j]
        const HVector dh = h(taus[j]) - h(taus[k]);
        for (const auto& drift : S.drifts()) {
            HVector dz = stieltjes_between(drift.value(), S.driver(), taus[k], taus[j]);
            acc[1] += 2.0 * h_inner(dz, v[j], spaces);
        }
        acc[4] += squared(dh, spaces);
        if (k >= 1) {
            acc[2] += 2.0 * h_inner(v[k], dh, spaces);
            acc[6] -= squared((v[j] - v[k]) - dh, spaces);
        }

        TelescopingRow row;
        row.t = taus[j];
        row.lhs = squared(v[j], spaces);
        row.terms = acc;
        double total = 0.0;
        double scale = std::abs(row.lhs);
        for (double term : acc) {
            total += term;
            scale += std::abs(term);
        }
        row.defect = row.lhs - total;
        row.relative_defect = scale > 0.0 ? std::abs(row.defect) / scale : 0.0;
        report.max_relative_defect = std::max(report.max_relative_defect, row.relative_defect);
        report.rows.push_back(row);
    }
    return report;
}

double stochastic_term_partition(const Scenario& S, const PartitionHierarchy& P, int level, double t) {
    const auto& spaces = S.spaces();
    const auto& h = S.noise();
    auto taus = partition_with_ends(P, level);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < taus.size(); ++k) {
        const double lo = std::min(taus[k], t);
        const double hi = std::min(taus[k + 1], t);
        if (!(hi > lo)) continue;
        sum += h_inner(S.drift_integral(lo), h(hi) - h(lo), spaces);
    }
    const HVector& h0 = h.initial();
    return 2.0 * sum + squared(h(t), spaces) - squared(h0, spaces) - h.quadratic_variation(t, spaces);
}

CorrectionStudy correction_study(const Scenario& S, const PartitionHierarchy& P, double t, int max_level) {
    if (max_level < 0 || max_level > P.max_level()) {
        throw Error(ErrorCode::out_of_range, "correction study level beyond the partition hierarchy");
    }
    const auto& spaces = S.spaces();
    const auto& h = S.noise();

    CorrectionStudy study;
    study.t = t;
    for (const auto& j : S.driver().jumps()) {
        if (j.time <= t) study.target += squared(S.total_drift(j.time), spaces) * j.size * j.size;
    }
    for (int n = 0; n <= max_level; ++n) {
        auto taus = partition_with_ends(P, n);
        double K = 0.0;
        HVector v_prev = S.state(0.0);
        for (std::size_t k = 0; k + 1 < taus.size() && taus[k + 1] <= t; ++k) {
            HVector v_next = S.state(taus[k + 1]);
            K += squared((v_next - v_prev) - (h(taus[k + 1]) - h(taus[k])), spaces);
            v_prev = std::move(v_next);
        }
        study.sums.push_back(K);
        study.gaps.push_back(std::abs(K - study.target));
    }
    return study;
}

ItoSides hilbert_ito_check(const MartingalePath& h, double t, const SpaceFamily& S) {
    ItoSides sides;
    sides.lhs = squared(h(t), S);
    double stoch = 0.0;
    for (double s : h.event_times()) {
        if (s > t) break;
        stoch += h_inner(h.left_limit(s), h.jump_at(s), S);
    }
    sides.rhs = squared(h.initial(), S) + 2.0 * stoch + h.quadratic_variation(t, S);
    return sides;
}

HomogeneityReport homogeneity_check(const Scenario& S, double n, double t) {
    HomogeneityReport report;
    report.base = energy_ledger(S, t);
    report.scaled = energy_ledger(scaling_reduce(S, n), t);
    const double n2 = n * n;
    const auto& b = report.base;
    const auto& s = report.scaled;
    const std::array<std::pair<double, double>, 6> pairs{{{b.lhs, s.lhs},
                                                          {b.term_h0, s.term_h0},
                                                          {b.term_drift, s.term_drift},
                                                          {b.term_stoch, s.term_stoch},
                                                          {b.term_correction, s.term_correction},
                                                          {b.term_qv, s.term_qv}}};
    for (auto [base, scaled] : pairs) {
        if (base == 0.0 && scaled == 0.0) continue;
        double dev = base == 0.0 ? infinite_time : std::abs(n2 * scaled - base) / std::abs(base);
        report.max_ratio_deviation = std::max(report.max_ratio_deviation, dev);
    }
    return report;
}

} // namespace itolab
