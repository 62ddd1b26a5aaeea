#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "itolab/step_function.hpp"

namespace itolab {

inline constexpr double infinite_time = std::numeric_limits<double>::infinity();

struct DriverJump {
    double time = 0.0;
    double size = 0.0;
};

/// Absolutely continuous piece of the driver: dA = slope dt on (start, end].
struct DensitySegment {
    double start = 0.0;
    double end = 0.0;
    double slope = 0.0;
};

/// The increasing cadlag process A with A(0) = 0: finitely many jumps plus an
/// optional piecewise-constant density.
class IncreasingDriver {
public:
    IncreasingDriver() = default;
    explicit IncreasingDriver(std::vector<DriverJump> jumps, std::vector<DensitySegment> density = {});

    /// A(t); throws for negative t.
    double operator()(double t) const;
    /// A(t-).
    double left_limit(double t) const;
    /// A(t) - A(t-).
    double jump_at(double t) const;

    double total_mass() const noexcept { return total_mass_; }
    bool pure_jump() const noexcept { return density_.empty(); }

    const std::vector<DriverJump>& jumps() const noexcept { return jumps_; }
    const std::vector<DensitySegment>& density() const noexcept { return density_; }

    /// Density slope on the open neighbourhood right of t (0 outside segments).
    double slope_after(double t) const;

    /// Sorted jump times and segment endpoints.
    std::vector<double> breakpoints() const;

    /// Every jump size and slope multiplied by factor.
    IncreasingDriver scaled(double factor) const;

private:
    double continuous_part(double t) const;
    std::size_t jumps_upto(double t) const;
    std::size_t jumps_below(double t) const;

    std::vector<DriverJump> jumps_;
    std::vector<DensitySegment> density_;
    std::vector<double> cumulative_; // cumulative_[k] = sum of the first k jump sizes
    double total_mass_ = 0.0;
};

/// beta(r) = inf{ t >= 0 : A(t) >= r }, the generalised inverse of the driver.
class TimeChange {
public:
    explicit TimeChange(IncreasingDriver driver) : driver_(std::move(driver)) {}

    /// +inf when the level r is never reached.
    double operator()(double r) const;

    const IncreasingDriver& driver() const noexcept { return driver_; }

private:
    IncreasingDriver driver_;
};

/// Dyadic floor (variant 1) or ceiling (variant 2) rounding at level n.
double kappa(int n, double t, int variant);

enum class Window {
    closed, ///< (0, t]
    open,   ///< (0, t)
};

/// Exact Lebesgue-Stieltjes integral of a step integrand over (0, t] or (0, t).
template <class T>
T stieltjes_integral(const StepFunction<T>& x, const IncreasingDriver& A, double t, Window window = Window::closed);

/// Exact integral over (a, b].
template <class T>
T stieltjes_between(const StepFunction<T>& x, const IncreasingDriver& A, double a, double b);

/// Both sides of the time-change substitution
/// int_{(0,t]} x dA = int_{(0,A(t)]} x(beta(r)) dr, or the open-window form with A(t-).
struct SubstitutionSides {
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0; ///< int |x| dA over the window, the natural size of both sides
};
SubstitutionSides substitution_check(const StepFunction<double>& x, const IncreasingDriver& A, double t,
                                     Window window = Window::closed);

/// A(beta(t)-) - A(beta(s)) <= t - s, up to `slack` for rounding.
bool lipschitz_check(const TimeChange& beta, double s, double t, double slack = 1e-12);
/// The left-hand side A(beta(t)-) - A(beta(s)).
double lipschitz_gap(const TimeChange& beta, double s, double t);

/// Per level n = 0..levels, sum_k |X(tau_{k+1} ^ t) - X(tau_k ^ t)|^2 over the dyadic
/// r-grid of [0, total mass], with X(t) = int_{(0,t]} x dA.
std::vector<double> squared_increment_sums(const StepFunction<double>& x, const IncreasingDriver& A, int levels,
                                           double t);
/// sum_{s <= t} |x(s)|^2 |Delta A(s)|^2.
double squared_increment_target(const StepFunction<double>& x, const IncreasingDriver& A, double t);

/// Nested dyadic partitions pulled back through beta.
///
/// Level n holds tau_j = beta(j 2^-n) for j = 0..2^n followed by a +inf sentinel.
class PartitionHierarchy {
public:
    /// Throws when the driver mass exceeds 1 (normalise first with scaling_reduce).
    PartitionHierarchy(const TimeChange& beta, int max_level);

    int max_level() const noexcept { return static_cast<int>(levels_.size()) - 1; }
    const std::vector<double>& times(int level) const;
    static double grid_point(int level, std::size_t j);

    /// Distinct finite positive partition times at a level.
    std::vector<double> finite_points(int level) const;

    /// Whether every level-n time is also a level-(n+1) time.
    bool nested() const;
    /// Whether t is a partition time at the given level.
    bool contains(int level, double t) const;
    /// max over consecutive distinct times of A(tau_{k+1}-) - A(tau_k), the mass
    /// the level fails to resolve.
    double stagnation_mass(int level) const;

    const IncreasingDriver& driver() const noexcept { return driver_; }

private:
    IncreasingDriver driver_;
    std::vector<std::vector<double>> levels_;
};

} // namespace itolab
