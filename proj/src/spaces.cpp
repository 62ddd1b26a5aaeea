#include "itolab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itolab/error.hpp"

namespace itolab {

namespace {

void require_positive(const std::vector<double>& weights, const char* what) {
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::invalid_argument, std::string(what) + " must be positive and finite");
        }
    }
}

double weighted_lp(std::span<const double> values, const std::vector<double>& weights, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) sum += weights[j] * std::pow(std::abs(values[j]), p);
    return p == 1.0 ? sum : std::pow(sum, 1.0 / p);
}

void validate(const SpaceDescriptor& s, std::size_t d) {
    if (!(s.exponent >= 1.0) || !std::isfinite(s.exponent)) {
        throw Error(ErrorCode::invalid_argument, "space exponent must lie in [1, inf)");
    }
    if (s.weights.size() != d) {
        throw Error(ErrorCode::dimension_mismatch, "space weights must have length d");
    }
    require_positive(s.weights, "space weights");
    if (s.kind == SpaceKind::w1p) {
        if (!(s.spacing > 0.0)) throw Error(ErrorCode::invalid_argument, "W1p spacing must be positive");
        if (s.edge_weights.size() != d + 1) {
            throw Error(ErrorCode::dimension_mismatch, "W1p edge weights must have length d + 1");
        }
        require_positive(s.edge_weights, "W1p edge weights");
    }
}

// Atom of a norm: weighted L_p norm of either phi itself or of its forward difference.
struct Atom {
    bool difference = false;
    double p = 2.0;
    const std::vector<double>* weights = nullptr;
    double spacing = 1.0;

    std::size_t size() const { return weights->size(); }
    double q() const { return p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0); }

    double dual_norm(std::span<const double> coeff) const { return weighted_lp(coeff, *weights, q()); }

    // Adds the Riesz representative of phi -> sum_a mu_a c_a (L phi)_a to r.
    void add_riesz(std::span<const double> coeff, const std::vector<double>& h_weights, HVector& r) const {
        const auto& mu = *weights;
        if (!difference) {
            for (std::size_t j = 0; j < r.size(); ++j) r[j] += mu[j] * coeff[j] / h_weights[j];
            return;
        }
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] += (mu[j] * coeff[j] - mu[j + 1] * coeff[j + 1]) / (spacing * h_weights[j]);
        }
    }
};

std::vector<Atom> atoms_of(const SpaceFamily& S) {
    std::vector<Atom> atoms;
    for (const auto& s : S.spaces()) {
        atoms.push_back(Atom{false, s.exponent, &s.weights, 1.0});
        if (s.kind == SpaceKind::w1p) atoms.push_back(Atom{true, s.exponent, &s.edge_weights, s.spacing});
    }
    return atoms;
}

// Index of the identity atom that absorbs the remainder of the decomposition.
std::size_t remainder_atom(const std::vector<Atom>& atoms) {
    for (std::size_t a = atoms.size(); a-- > 0;) {
        if (!atoms[a].difference) return a;
    }
    return 0; // unreachable: every space contributes an identity atom
}

double golden_section(const auto& objective, double lo, double hi, int iterations) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    double best = std::min(f1, f2);
    for (int it = 0; it < iterations; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
            best = std::min(best, f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
            best = std::min(best, f2);
        }
    }
    return best;
}

} // namespace

double SpaceDescriptor::conjugate() const noexcept {
    if (exponent == 1.0) return std::numeric_limits<double>::infinity();
    return exponent / (exponent - 1.0);
}

SpaceDescriptor lp_space(double exponent, std::vector<double> weights) {
    SpaceDescriptor s;
    s.kind = SpaceKind::lp;
    s.exponent = exponent;
    s.weights = std::move(weights);
    return s;
}

SpaceDescriptor w1p_space(double exponent, std::vector<double> weights, double spacing,
                          std::vector<double> edge_weights) {
    SpaceDescriptor s;
    s.kind = SpaceKind::w1p;
    s.exponent = exponent;
    s.weights = std::move(weights);
    s.spacing = spacing;
    s.edge_weights = std::move(edge_weights);
    return s;
}

std::vector<double> forward_difference(const HVector& phi, double spacing) {
    const std::size_t d = phi.size();
    std::vector<double> out(d + 1);
    for (std::size_t e = 0; e <= d; ++e) {
        double right = e < d ? phi[e] : 0.0;
        double left = e > 0 ? phi[e - 1] : 0.0;
        out[e] = (right - left) / spacing;
    }
    return out;
}

SpaceFamily::SpaceFamily(std::vector<double> h_weights, std::vector<SpaceDescriptor> spaces)
    : h_weights_(std::move(h_weights)), spaces_(std::move(spaces)) {
    const std::size_t d = h_weights_.size();
    if (d == 0) throw Error(ErrorCode::invalid_argument, "space family needs d >= 1");
    if (spaces_.empty()) throw Error(ErrorCode::invalid_argument, "space family needs m >= 1");
    require_positive(h_weights_, "H weights");
    for (const auto& s : spaces_) validate(s, d);

    // Gram-Schmidt on the coordinate indicators, twice for numerical stability.
    for (std::size_t k = 0; k < d; ++k) {
        HVector e(d);
        e[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis_) e -= b * h_inner(e, b, *this);
        }
        e *= 1.0 / h_norm(e, *this);
        basis_.push_back(std::move(e));
    }

    std::vector<double> running(spaces_.size(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < spaces_.size(); ++i) {
            double n = v_norm(basis_[k], i, *this);
            running[i] += n * n;
            c = std::max(c, running[i]);
        }
        basis_constants_.push_back(c);
    }

    // |phi|_H <= sqrt(sum w) max|phi_j| <= sqrt(sum w) ||phi||_{L_p} / min mu^{1/p},
    // and ||phi||_{V_i} dominates its L_p part.
    double total = 0.0;
    for (double w : h_weights_) total += w;
    embedding_constant_ = std::numeric_limits<double>::infinity();
    for (const auto& s : spaces_) {
        double min_mu = *std::min_element(s.weights.begin(), s.weights.end());
        embedding_constant_ = std::min(embedding_constant_, std::sqrt(total) / std::pow(min_mu, 1.0 / s.exponent));
    }
}

const SpaceDescriptor& SpaceFamily::space(std::size_t i) const {
    if (i >= spaces_.size()) {
        throw Error(ErrorCode::out_of_range, "space index " + std::to_string(i) + " >= m");
    }
    return spaces_[i];
}

double h_inner(const HVector& x, const HVector& y, const SpaceFamily& S) {
    require_dim(x, S.dim(), "h_inner");
    require_dim(y, S.dim(), "h_inner");
    double sum = 0.0;
    const auto& w = S.h_weights();
    for (std::size_t j = 0; j < x.size(); ++j) sum += w[j] * x[j] * y[j];
    return sum;
}

double h_norm(const HVector& x, const SpaceFamily& S) { return std::sqrt(h_inner(x, x, S)); }

double duality_pair(const HVector& w_star, const HVector& phi, const SpaceFamily& S) {
    return h_inner(w_star, phi, S);
}

double v_norm(const HVector& phi, std::size_t i, const SpaceFamily& S) {
    const auto& s = S.space(i);
    require_dim(phi, S.dim(), "v_norm");
    double n = weighted_lp(phi.span(), s.weights, s.exponent);
    if (s.kind == SpaceKind::w1p) {
        auto diff = forward_difference(phi, s.spacing);
        n += weighted_lp(diff, s.edge_weights, s.exponent);
    }
    return n;
}

double v_norm_sum(const HVector& phi, const SpaceFamily& S) {
    double n = 0.0;
    for (std::size_t i = 0; i < S.count(); ++i) n += v_norm(phi, i, S);
    return n;
}

double dual_norm_lp(const HVector& w_star, std::size_t i, const SpaceFamily& S) {
    const auto& s = S.space(i);
    if (s.kind != SpaceKind::lp) {
        throw Error(ErrorCode::unsupported,
                    "no analytic dual norm for W1p spaces; use dual_norm_intersection");
    }
    return dual_norm_lp_part(w_star, i, S);
}

double dual_norm_lp_part(const HVector& w_star, std::size_t i, const SpaceFamily& S) {
    const auto& s = S.space(i);
    require_dim(w_star, S.dim(), "dual_norm_lp");
    // <w*, phi> = sum_j mu_j y_j phi_j with y_j = w_j x_j / mu_j.
    std::vector<double> y(S.dim());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = S.h_weights()[j] * w_star[j] / s.weights[j];
    return weighted_lp(y, s.weights, s.conjugate());
}

double dual_norm_lower_bound(const HVector& w_star, std::size_t i, const SpaceFamily& S) {
    const auto& s = S.space(i);
    require_dim(w_star, S.dim(), "dual_norm_lower_bound");
    const std::size_t d = S.dim();
    std::vector<HVector> tests;
    tests.push_back(w_star);
    for (std::size_t j = 0; j < d; ++j) {
        HVector e(d);
        e[j] = 1.0;
        tests.push_back(std::move(e));
    }
    // Extremal vector of the L_p part.
    HVector ext(d);
    const double q = s.conjugate();
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
        double y = S.h_weights()[j] * w_star[j] / s.weights[j];
        if (std::abs(y) > best) {
            best = std::abs(y);
            arg = j;
        }
        if (!std::isinf(q)) ext[j] = std::copysign(std::pow(std::abs(y), q - 1.0), y);
    }
    if (std::isinf(q)) ext[arg] = std::copysign(1.0, w_star[arg]);
    tests.push_back(std::move(ext));

    double bound = 0.0;
    for (const auto& phi : tests) {
        double n = v_norm(phi, i, S);
        if (n > 0.0) bound = std::max(bound, std::abs(duality_pair(w_star, phi, S)) / n);
    }
    return bound;
}

std::size_t intersection_search_axes(const SpaceFamily& S) {
    auto atoms = atoms_of(S);
    std::size_t rem = remainder_atom(atoms);
    std::size_t axes = 0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (a != rem) axes += atoms[a].size();
    }
    return axes;
}

double dual_norm_intersection(const HVector& w_star, const SpaceFamily& S, const IntersectionSearch& search) {
    require_dim(w_star, S.dim(), "dual_norm_intersection");
    if (search.resolution < 1) throw Error(ErrorCode::invalid_argument, "search resolution must be >= 1");

    const auto atoms = atoms_of(S);
    const std::size_t rem = remainder_atom(atoms);
    const std::size_t d = S.dim();
    const auto& hw = S.h_weights();
    const auto& rem_mu = *atoms[rem].weights;

    std::vector<std::size_t> offsets;
    std::size_t axes = 0;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        offsets.push_back(axes);
        if (a != rem) axes += atoms[a].size();
    }
    const double evaluations = std::pow(search.resolution + 2.0, static_cast<double>(axes));
    if (evaluations > search.budget) {
        throw Error(ErrorCode::budget_exceeded,
                    "intersection dual-norm search needs " + std::to_string(axes) + " axes at resolution " +
                        std::to_string(search.resolution) + "; lower d or the resolution");
    }

    std::vector<double> coeff(axes, 0.0);
    HVector remainder(d);
    std::vector<double> rem_coeff(d);
    auto objective = [&]() {
        remainder = w_star;
        HVector used(d);
        double worst = 0.0;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (a == rem) continue;
            std::span<const double> c(coeff.data() + offsets[a], atoms[a].size());
            atoms[a].add_riesz(c, hw, used);
            worst = std::max(worst, atoms[a].dual_norm(c));
        }
        remainder -= used;
        for (std::size_t j = 0; j < d; ++j) rem_coeff[j] = hw[j] * remainder[j] / rem_mu[j];
        return std::max(worst, atoms[rem].dual_norm(rem_coeff));
    };

    const double upper = objective();
    if (axes == 0 || upper == 0.0) return upper;

    // At the optimum every atom norm is <= upper, which bounds each coefficient.
    std::vector<double> half_width(axes);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (a == rem) continue;
        const double q = atoms[a].q();
        for (std::size_t j = 0; j < atoms[a].size(); ++j) {
            double mu = (*atoms[a].weights)[j];
            half_width[offsets[a] + j] = std::isinf(q) ? upper : upper / std::pow(mu, 1.0 / q);
        }
    }

    auto minimise_from = [&](auto&& self, std::size_t axis) -> double {
        if (axis == axes) return objective();
        auto along = [&](double x) {
            coeff[axis] = x;
            return self(self, axis + 1);
        };
        double best = golden_section(along, -half_width[axis], half_width[axis], search.resolution);
        coeff[axis] = 0.0;
        return best;
    };
    double best = std::min(upper, minimise_from(minimise_from, 0));

    // Putting the whole functional into a single L_p space is a feasible decomposition.
    for (std::size_t i = 0; i < S.count(); ++i) {
        if (S.space(i).kind == SpaceKind::lp) best = std::min(best, dual_norm_lp(w_star, i, S));
    }
    return best;
}

ExhaustiveResult dual_norm_exhaustive(const HVector& w_star, const SpaceFamily& S, int cells, int rounds) {
    require_dim(w_star, S.dim(), "dual_norm_exhaustive");
    if (S.count() != 2 || S.dim() > 3 || S.space(0).kind != SpaceKind::lp || S.space(1).kind != SpaceKind::lp) {
        throw Error(ErrorCode::unsupported, "exhaustive search needs two L_p spaces and dimension at most 3");
    }
    if (cells < 1 || rounds < 0) throw Error(ErrorCode::invalid_argument, "exhaustive search needs cells >= 1");
    const std::size_t d = S.dim();
    // Both dual norms are lattice norms, so an optimal w_1 has w_1[j] = f_j w*[j]
    // with f_j in [0, 1]; search over the fractions f.
    std::vector<double> lo(d, 0.0), width(d, 1.0), best_f(d, 0.0);
    double best = std::numeric_limits<double>::infinity();
    auto objective = [&](const std::vector<double>& f) {
        HVector w1(d), w2(d);
        for (std::size_t j = 0; j < d; ++j) {
            w1[j] = f[j] * w_star[j];
            w2[j] = w_star[j] - w1[j];
        }
        return std::max(dual_norm_lp(w1, 0, S), dual_norm_lp(w2, 1, S));
    };
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= static_cast<std::size_t>(cells) + 1;
    double step = 1.0;
    for (int round = 0; round <= rounds; ++round) {
        step = width[0] / cells;
        std::vector<double> f(d);
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t rest = idx;
            for (std::size_t j = 0; j < d; ++j) {
                f[j] = std::clamp(lo[j] + step * static_cast<double>(rest % (cells + 1)), 0.0, 1.0);
                rest /= static_cast<std::size_t>(cells) + 1;
            }
            double value = objective(f);
            if (value < best) {
                best = value;
                best_f = f;
            }
        }
        // Zoom to the two cells around the best point.
        for (std::size_t j = 0; j < d; ++j) {
            width[j] = 2.0 * step;
            lo[j] = best_f[j] - step;
        }
    }
    // The objective changes by at most max_i ||delta||_{V_i*} within one cell.
    HVector delta(d);
    for (std::size_t j = 0; j < d; ++j) delta[j] = step * std::abs(w_star[j]);
    return {best, std::max(dual_norm_lp(delta, 0, S), dual_norm_lp(delta, 1, S))};
}

HVector project(const HVector& phi, std::size_t k, const SpaceFamily& S) {
    require_dim(phi, S.dim(), "project");
    if (k > S.dim()) throw Error(ErrorCode::out_of_range, "projection rank exceeds d");
    HVector out(S.dim());
    for (std::size_t j = 0; j < k; ++j) out += S.basis()[j] * h_inner(phi, S.basis()[j], S);
    return out;
}

} // namespace itolab
