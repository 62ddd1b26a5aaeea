#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace itolab {

/// Coefficient vector of an element of the discrete Hilbert space H.
///
/// Elements of the dual spaces V_i* are stored the same way, as their Riesz
/// representatives with respect to the H inner product.
class HVector {
public:
    HVector() = default;
    explicit HVector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
    HVector(std::initializer_list<double> values) : data_(values) {}
    explicit HVector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t j) { return data_[j]; }
    double operator[](std::size_t j) const { return data_[j]; }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool all_finite() const noexcept;

    HVector& operator+=(const HVector& other);
    HVector& operator-=(const HVector& other);
    HVector& operator*=(double factor) noexcept;

    friend HVector operator+(HVector lhs, const HVector& rhs) { return lhs += rhs; }
    friend HVector operator-(HVector lhs, const HVector& rhs) { return lhs -= rhs; }
    friend HVector operator*(HVector lhs, double factor) { return lhs *= factor; }
    friend HVector operator*(double factor, HVector rhs) { return rhs *= factor; }

    bool operator==(const HVector&) const = default;

private:
    std::vector<double> data_;
};

/// Throws ErrorCode::dimension_mismatch unless both vectors have length `expected`.
void require_dim(const HVector& x, std::size_t expected, const char* what);

} // namespace itolab
