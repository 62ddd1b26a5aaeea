#include "itolab/driver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itolab/hvector.hpp"

namespace itolab {

IncreasingDriver::IncreasingDriver(std::vector<DriverJump> jumps, std::vector<DensitySegment> density)
    : jumps_(std::move(jumps)), density_(std::move(density)) {
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        const auto& j = jumps_[k];
        if (!(j.time > 0.0) || !std::isfinite(j.time)) {
            throw Error(ErrorCode::invalid_argument, "driver jump times must be positive and finite");
        }
        if (!(j.size > 0.0) || !std::isfinite(j.size)) {
            throw Error(ErrorCode::invalid_argument, "driver jump sizes must be positive and finite");
        }
        if (k > 0 && !(j.time > jumps_[k - 1].time)) {
            throw Error(ErrorCode::invalid_argument, "driver jump times must be strictly increasing");
        }
    }
    for (std::size_t k = 0; k < density_.size(); ++k) {
        const auto& s = density_[k];
        if (!(s.start >= 0.0) || !(s.end > s.start) || !std::isfinite(s.end) || !(s.slope >= 0.0) ||
            !std::isfinite(s.slope)) {
            throw Error(ErrorCode::invalid_argument, "density segments need 0 <= start < end < inf, slope >= 0");
        }
        if (k > 0 && s.start < density_[k - 1].end) {
            throw Error(ErrorCode::invalid_argument, "density segments must be sorted and disjoint");
        }
    }
    cumulative_.assign(1, 0.0);
    for (const auto& j : jumps_) cumulative_.push_back(cumulative_.back() + j.size);
    total_mass_ = cumulative_.back();
    for (const auto& s : density_) total_mass_ += s.slope * (s.end - s.start);
}

std::size_t IncreasingDriver::jumps_upto(double t) const {
    auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                               [](double v, const DriverJump& j) { return v < j.time; });
    return static_cast<std::size_t>(it - jumps_.begin());
}

std::size_t IncreasingDriver::jumps_below(double t) const {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const DriverJump& j, double v) { return j.time < v; });
    return static_cast<std::size_t>(it - jumps_.begin());
}

double IncreasingDriver::continuous_part(double t) const {
    double sum = 0.0;
    for (const auto& s : density_) {
        if (t <= s.start) break;
        sum += s.slope * (std::min(t, s.end) - s.start);
    }
    return sum;
}

double IncreasingDriver::operator()(double t) const {
    if (t < 0.0) throw Error(ErrorCode::invalid_argument, "driver evaluated at negative time");
    if (std::isinf(t)) return total_mass_;
    return cumulative_[jumps_upto(t)] + continuous_part(t);
}

double IncreasingDriver::left_limit(double t) const {
    if (t < 0.0) throw Error(ErrorCode::invalid_argument, "driver evaluated at negative time");
    if (std::isinf(t)) return total_mass_;
    return cumulative_[jumps_below(t)] + continuous_part(t);
}

double IncreasingDriver::jump_at(double t) const {
    std::size_t k = jumps_below(t);
    return (k < jumps_.size() && jumps_[k].time == t) ? jumps_[k].size : 0.0;
}

double IncreasingDriver::slope_after(double t) const {
    for (const auto& s : density_) {
        if (t >= s.start && t < s.end) return s.slope;
    }
    return 0.0;
}

std::vector<double> IncreasingDriver::breakpoints() const {
    std::vector<double> pts;
    for (const auto& j : jumps_) pts.push_back(j.time);
    for (const auto& s : density_) {
        if (s.start > 0.0) pts.push_back(s.start);
        pts.push_back(s.end);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

IncreasingDriver IncreasingDriver::scaled(double factor) const {
    auto jumps = jumps_;
    auto density = density_;
    for (auto& j : jumps) j.size *= factor;
    for (auto& s : density) s.slope *= factor;
    return IncreasingDriver(std::move(jumps), std::move(density));
}

double TimeChange::operator()(double r) const {
    if (r <= 0.0) return 0.0;
    const auto& A = driver_;
    double prev = 0.0;
    double a_prev = 0.0;
    for (double b : A.breakpoints()) {
        double a_left = A.left_limit(b);
        if (a_left >= r) {
            // A is continuous and strictly increasing on (prev, b) here.
            double slope = A.slope_after(prev);
            return std::min(b, prev + (r - a_prev) / slope);
        }
        double a_here = A(b);
        if (a_here >= r) return b;
        prev = b;
        a_prev = a_here;
    }
    return infinite_time;
}

double kappa(int n, double t, int variant) {
    if (n < 0) throw Error(ErrorCode::invalid_argument, "kappa level must be >= 0");
    const double scale = std::ldexp(1.0, n);
    if (variant == 1) return std::floor(scale * t) / scale;
    if (variant == 2) return std::ceil(scale * t) / scale;
    throw Error(ErrorCode::invalid_argument, "kappa variant must be 1 or 2");
}

template <class T>
T stieltjes_between(const StepFunction<T>& x, const IncreasingDriver& A, double a, double b) {
    T sum = x.values().front() * 0.0;
    if (!(b > a)) return sum;
    for (const auto& j : A.jumps()) {
        if (j.time > a && j.time <= b) sum += x(j.time) * j.size;
    }
    for (const auto& s : A.density()) {
        double lo = std::max(s.start, a);
        double hi = std::min(s.end, b);
        if (hi > lo && s.slope > 0.0) sum += x.integrate(lo, hi) * s.slope;
    }
    return sum;
}

template <class T>
T stieltjes_integral(const StepFunction<T>& x, const IncreasingDriver& A, double t, Window window) {
    if (t < 0.0) throw Error(ErrorCode::invalid_argument, "integration window end must be >= 0");
    if (window == Window::closed) return stieltjes_between(x, A, 0.0, t);
    T sum = x.values().front() * 0.0;
    for (const auto& j : A.jumps()) {
        if (j.time < t) sum += x(j.time) * j.size;
    }
    for (const auto& s : A.density()) {
        double hi = std::min(s.end, t);
        if (hi > s.start && s.slope > 0.0) sum += x.integrate(s.start, hi) * s.slope;
    }
    return sum;
}

template double stieltjes_integral<double>(const StepFunction<double>&, const IncreasingDriver&, double, Window);
template HVector stieltjes_integral<HVector>(const StepFunction<HVector>&, const IncreasingDriver&, double, Window);
template double stieltjes_between<double>(const StepFunction<double>&, const IncreasingDriver&, double, double);
template HVector stieltjes_between<HVector>(const StepFunction<HVector>&, const IncreasingDriver&, double, double);

SubstitutionSides substitution_check(const StepFunction<double>& x, const IncreasingDriver& A, double t,
                                     Window window) {
    SubstitutionSides out;
    out.lhs = stieltjes_integral(x, A, t, window);
    out.scale = stieltjes_integral(x.map([](double v) { return std::abs(v); }), A, t, window);

    // x(beta(r)) is constant between consecutive levels of this set.
    const double top = window == Window::closed ? A(t) : A.left_limit(t);
    std::vector<double> levels{0.0, top};
    for (const auto& j : A.jumps()) {
        levels.push_back(A.left_limit(j.time));
        levels.push_back(A(j.time));
    }
    for (double b : x.breaks()) levels.push_back(A(b));
    for (const auto& s : A.density()) {
        levels.push_back(A(s.start));
        levels.push_back(A(s.end));
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const TimeChange beta(A);
    double rhs = 0.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        double lo = levels[k];
        double hi = std::min(levels[k + 1], top);
        if (!(hi > lo)) break;
        rhs += x(beta(0.5 * (lo + hi))) * (hi - lo);
    }
    out.rhs = rhs;
    return out;
}

double lipschitz_gap(const TimeChange& beta, double s, double t) {
    const auto& A = beta.driver();
    double bt = beta(t);
    double bs = beta(s);
    double left = std::isinf(bt) ? A.total_mass() : A.left_limit(bt);
    double right = std::isinf(bs) ? A.total_mass() : A(bs);
    return left - right;
}

bool lipschitz_check(const TimeChange& beta, double s, double t, double slack) {
    if (s < 0.0 || t < s) throw Error(ErrorCode::invalid_argument, "lipschitz_check needs 0 <= s <= t");
    return lipschitz_gap(beta, s, t) <= t - s + slack * (1.0 + t);
}

std::vector<double> squared_increment_sums(const StepFunction<double>& x, const IncreasingDriver& A, int levels,
                                           double t) {
    if (levels < 0) throw Error(ErrorCode::invalid_argument, "levels must be >= 0");
    const TimeChange beta(A);
    std::vector<double> sums;
    for (int n = 0; n <= levels; ++n) {
        const double scale = std::ldexp(1.0, n);
        const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(A.total_mass() * scale)));
        double sum = 0.0;
        double prev = 0.0;
        for (std::size_t k = 1; k <= count + 1; ++k) {
            double tau = k <= count ? beta(static_cast<double>(k) / scale) : infinite_time;
            double cur = std::min(tau, t);
            double inc = stieltjes_between(x, A, prev, cur);
            sum += inc * inc;
            prev = cur;
        }
        sums.push_back(sum);
    }
    return sums;
}

double squared_increment_target(const StepFunction<double>& x, const IncreasingDriver& A, double t) {
    double sum = 0.0;
    for (const auto& j : A.jumps()) {
        if (j.time <= t) {
            double v = x(j.time) * j.size;
            sum += v * v;
        }
    }
    return sum;
}

PartitionHierarchy::PartitionHierarchy(const TimeChange& beta, int max_level) : driver_(beta.driver()) {
    if (max_level < 0 || max_level > 24) throw Error(ErrorCode::invalid_argument, "max_level must be in [0, 24]");
    if (driver_.total_mass() > 1.0 + 1e-12) {
        throw Error(ErrorCode::invalid_argument,
                    "driver mass " + std::to_string(driver_.total_mass()) +
                        " exceeds 1; rescale the scenario before building partitions");
    }
    for (int n = 0; n <= max_level; ++n) {
        const std::size_t count = std::size_t{1} << n;
        std::vector<double> taus;
        taus.reserve(count + 2);
        for (std::size_t j = 0; j <= count; ++j) taus.push_back(beta(grid_point(n, j)));
        taus.push_back(infinite_time);
        levels_.push_back(std::move(taus));
    }
}

double PartitionHierarchy::grid_point(int level, std::size_t j) {
    return std::ldexp(static_cast<double>(j), -level);
}

const std::vector<double>& PartitionHierarchy::times(int level) const {
    if (level < 0 || level > max_level()) throw Error(ErrorCode::out_of_range, "partition level out of range");
    return levels_[static_cast<std::size_t>(level)];
}

std::vector<double> PartitionHierarchy::finite_points(int level) const {
    std::vector<double> pts;
    for (double tau : times(level)) {
        if (tau > 0.0 && std::isfinite(tau) && (pts.empty() || tau > pts.back())) pts.push_back(tau);
    }
    return pts;
}

bool PartitionHierarchy::contains(int level, double t) const {
    const auto& taus = times(level);
    return std::find(taus.begin(), taus.end(), t) != taus.end();
}

bool PartitionHierarchy::nested() const {
    for (int n = 0; n < max_level(); ++n) {
        for (double tau : times(n)) {
            if (!contains(n + 1, tau)) return false;
        }
    }
    return true;
}

double PartitionHierarchy::stagnation_mass(int level) const {
    std::vector<double> pts{0.0};
    for (double tau : finite_points(level)) pts.push_back(tau);
    double worst = driver_.total_mass() - driver_(pts.back());
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        worst = std::max(worst, driver_.left_limit(pts[k + 1]) - driver_(pts[k]));
    }
    return worst;
}

} // namespace itolab
