#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "itolab/hvector.hpp"

namespace itolab {

enum class SpaceKind {
    lp,  ///< weighted discrete L_p on the grid
    w1p, ///< weighted discrete W^1_p: L_p part plus L_p norm of the forward difference
};

/// One constituent space V_i of the intersection V = V_1 ∩ ... ∩ V_m.
///
/// For the W^1_p kind the difference operator is the forward difference
/// (phi_{j} - phi_{j-1}) / spacing on d+1 edges, with zero values outside
/// the grid (homogeneous Dirichlet boundary).
struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::lp;
    double exponent = 2.0;
    std::vector<double> weights;      // node quadrature weights, length d
    double spacing = 1.0;             // W1p only
    std::vector<double> edge_weights; // W1p only, length d + 1

    /// q = p / (p - 1), infinite for p = 1.
    double conjugate() const noexcept;
};

SpaceDescriptor lp_space(double exponent, std::vector<double> weights);
SpaceDescriptor w1p_space(double exponent, std::vector<double> weights, double spacing,
                          std::vector<double> edge_weights);

/// Forward difference with zero boundary, length d + 1.
std::vector<double> forward_difference(const HVector& phi, double spacing);

/// The discrete Gelfand triple V ↪ H ↪ V*.
///
/// Immutable after construction. The orthonormal basis is produced by
/// Gram-Schmidt in the H inner product applied to the coordinate indicator
/// vectors, which lie in every discrete V_i.
class SpaceFamily {
public:
    SpaceFamily(std::vector<double> h_weights, std::vector<SpaceDescriptor> spaces);

    std::size_t dim() const noexcept { return h_weights_.size(); }
    std::size_t count() const noexcept { return spaces_.size(); }

    const std::vector<double>& h_weights() const noexcept { return h_weights_; }
    const SpaceDescriptor& space(std::size_t i) const;
    const std::vector<SpaceDescriptor>& spaces() const noexcept { return spaces_; }

    const std::vector<HVector>& basis() const noexcept { return basis_; }
    /// c_k = max_i sum_{j<=k} |e_j|^2_{V_i}, indexed from k = 1 at position 0.
    const std::vector<double>& basis_constants() const noexcept { return basis_constants_; }
    /// C with |phi|_H <= C ||phi||_V for every phi.
    double embedding_constant() const noexcept { return embedding_constant_; }

private:
    std::vector<double> h_weights_;
    std::vector<SpaceDescriptor> spaces_;
    std::vector<HVector> basis_;
    std::vector<double> basis_constants_;
    double embedding_constant_ = 0.0;
};

double h_inner(const HVector& x, const HVector& y, const SpaceFamily& S);
double h_norm(const HVector& x, const SpaceFamily& S);

/// <w*, phi>; identical to the H inner product of the Riesz representative.
double duality_pair(const HVector& w_star, const HVector& phi, const SpaceFamily& S);

/// ||phi||_{V_i}.
double v_norm(const HVector& phi, std::size_t i, const SpaceFamily& S);
/// ||phi||_V = sum_i ||phi||_{V_i}.
double v_norm_sum(const HVector& phi, const SpaceFamily& S);

/// Analytic conjugate-exponent norm of w* in V_i*; throws ErrorCode::unsupported
/// for W1p spaces, whose dual norm has no closed form.
double dual_norm_lp(const HVector& w_star, std::size_t i, const SpaceFamily& S);

/// L_q norm dual to the L_p part of V_i. Equals the V_i* norm for L_p spaces
/// and dominates it for W1p spaces.
double dual_norm_lp_part(const HVector& w_star, std::size_t i, const SpaceFamily& S);

/// max over a fixed set of test vectors of |<w*, phi>| / ||phi||_{V_i}. Valid for
/// every kind; equals dual_norm_lp for L_p spaces up to rounding.
double dual_norm_lower_bound(const HVector& w_star, std::size_t i, const SpaceFamily& S);

struct IntersectionSearch {
    /// Golden-section iterations per search axis.
    int resolution = 40;
    /// Refuse when (resolution + 2)^axes exceeds this many objective evaluations.
    double budget = 2.0e7;
};

/// inf { max_i ||w_i*||_{V_i*} : w* = sum_i w_i* }.
///
/// Every norm is split into atoms (an L_p norm of the identity or of the
/// difference operator); the dual norm of a sum of atoms is again an inf-max
/// over decompositions, so the whole problem is a convex minimisation over the
/// coefficients of all atoms but one. It is solved by nested golden-section
/// search, which is exact for convex objectives up to the axis resolution.
double dual_norm_intersection(const HVector& w_star, const SpaceFamily& S,
                              const IntersectionSearch& search = {});

/// Number of free search axes used by dual_norm_intersection for this family.
std::size_t intersection_search_axes(const SpaceFamily& S);

struct ExhaustiveResult {
    double value = 0.0;
    /// Upper bound on value minus the true infimum, from the final cell size.
    double resolution = 0.0;
};

/// Grid search over every decomposition w* = w_1 + w_2 of a two-space L_p family
/// (coordinates of w_1 between 0 and those of w*), with `cells` points per
/// coordinate and `rounds` zoom refinements around the best point (the resolution
/// bound is rigorous only without zooming). Intended as an
/// oracle for small dimensions; throws ErrorCode::unsupported otherwise.
ExhaustiveResult dual_norm_exhaustive(const HVector& w_star, const SpaceFamily& S, int cells = 400, int rounds = 0);

/// Orthogonal projection onto span(e_1, ..., e_k).
HVector project(const HVector& phi, std::size_t k, const SpaceFamily& S);

} // namespace itolab
