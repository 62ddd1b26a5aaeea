#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "itolab/error.hpp"

namespace itolab {

/// Which end of each piece is closed.
enum class Side {
    left_open,  ///< pieces (b_k, b_{k+1}]; the usual convention for integrands
    right_open, ///< pieces [b_k, b_{k+1}); cadlag paths
};

/// Piecewise-constant function on [0, inf) with finitely many pieces.
///
/// values()[0] applies before the first breakpoint, values()[k] after the k-th.
template <class T>
class StepFunction {
public:
    StepFunction() = default;

    explicit StepFunction(T constant, Side side = Side::left_open) : values_{std::move(constant)}, side_(side) {}

    StepFunction(std::vector<double> breaks, std::vector<T> values, Side side)
        : breaks_(std::move(breaks)), values_(std::move(values)), side_(side) {
        if (values_.size() != breaks_.size() + 1) {
            throw Error(ErrorCode::dimension_mismatch, "step function needs one more value than breakpoints");
        }
        for (std::size_t k = 0; k < breaks_.size(); ++k) {
            if (!(breaks_[k] > 0.0) || (k > 0 && !(breaks_[k] > breaks_[k - 1]))) {
                throw Error(ErrorCode::invalid_argument,
                            "step breakpoints must be positive and strictly increasing");
            }
        }
    }

    /// Value at t, honouring the side convention at breakpoints.
    const T& operator()(double t) const { return values_[index(t)]; }

    /// Limit from the left at t.
    const T& left_limit(double t) const { return values_[count_below(t)]; }

    /// Limit from the right at t.
    const T& right_limit(double t) const { return values_[count_upto(t)]; }

    std::span<const double> breaks() const noexcept { return breaks_; }
    std::span<const T> values() const noexcept { return values_; }
    Side side() const noexcept { return side_; }

    /// Lebesgue integral over (a, b), a <= b.
    T integrate(double a, double b) const {
        T sum = values_.front() * 0.0;
        if (!(b > a)) return sum;
        double lo = a;
        for (std::size_t k = count_upto(a); k < values_.size(); ++k) {
            double hi = k < breaks_.size() ? std::min(breaks_[k], b) : b;
            if (hi > lo) sum += values_[k] * (hi - lo);
            lo = hi;
            if (lo >= b) break;
        }
        return sum;
    }

    template <class F>
    auto map(F&& f) const -> StepFunction<decltype(f(std::declval<const T&>()))> {
        using U = decltype(f(std::declval<const T&>()));
        std::vector<U> mapped;
        mapped.reserve(values_.size());
        for (const auto& v : values_) mapped.push_back(f(v));
        return StepFunction<U>(breaks_, std::move(mapped), side_);
    }

private:
    std::size_t count_below(double t) const {
        return static_cast<std::size_t>(std::lower_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
    }
    std::size_t count_upto(double t) const {
        return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
    }
    std::size_t index(double t) const { return side_ == Side::left_open ? count_below(t) : count_upto(t); }

    std::vector<double> breaks_;
    std::vector<T> values_;
    Side side_ = Side::left_open;
};

} // namespace itolab
