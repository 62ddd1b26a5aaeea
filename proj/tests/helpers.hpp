#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "itolab/hvector.hpp"

namespace testing {

inline itolab::HVector random_vector(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    itolab::HVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = u(rng);
    return x;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t d) {
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> w(d);
    for (auto& x : w) x = u(rng);
    return w;
}

// (sum_j w_j |x_j|^p)^{1/p}, or max |x_j| for p = inf; written independently of the library.
inline double weighted_norm(const std::vector<double>& x, const std::vector<double>& w, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * std::pow(std::abs(x[j]), p);
    return std::pow(s, 1.0 / p);
}

inline double conjugate(double p) { return p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0); }

// Dual norm of phi -> sum_j mu_j x_j phi_j on L_p(w): by Hoelder it is the L_q(w) norm
// of mu x / w.
inline double lp_dual(const std::vector<double>& x, const std::vector<double>& mu, const std::vector<double>& w,
                      double p) {
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = mu[j] * x[j] / w[j];
    return weighted_norm(y, w, conjugate(p));
}

// Exhaustive search over w_1 = f * w with f in [-0.5, 1.5]^d for two L_p spaces.
struct Brute {
    double value;
    double resolution;
};
inline Brute brute_force_intersection(const itolab::HVector& w, const std::vector<double>& mu, const std::vector<double>& w0,
                               double p0, const std::vector<double>& w1, double p1, int cells) {
    const std::size_t d = w.size();
    const double lo = -0.5, width = 2.0;
    const double step = width / cells;
    double best = std::numeric_limits<double>::infinity();
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= static_cast<std::size_t>(cells + 1);
    std::vector<double> a(d), b(d);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t j = 0; j < d; ++j) {
            double f = lo + step * static_cast<double>(rest % (cells + 1));
            rest /= cells + 1;
            a[j] = f * w[j];
            b[j] = w[j] - a[j];
        }
        best = std::min(best, std::max(lp_dual(a, mu, w0, p0), lp_dual(b, mu, w1, p1)));
    }
    std::vector<double> delta(d);
    for (std::size_t j = 0; j < d; ++j) delta[j] = step * std::abs(w[j]);
    return {best, std::max(lp_dual(delta, mu, w0, p0), lp_dual(delta, mu, w1, p1))};
}

} // namespace testing
