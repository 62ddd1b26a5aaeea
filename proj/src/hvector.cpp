#include "itolab/hvector.hpp"

#include <cmath>
#include <string>

#include "itolab/error.hpp"

namespace itolab {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::budget_exceeded: return "budget exceeded";
    case ErrorCode::not_an_event: return "not an event time";
    case ErrorCode::numerical_blowup: return "numerical blow-up";
    case ErrorCode::malformed_config: return "malformed config";
    }
    return "unknown";
}

bool HVector::all_finite() const noexcept {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

HVector& HVector::operator+=(const HVector& other) {
    require_dim(other, size(), "HVector +=");
    for (std::size_t j = 0; j < data_.size(); ++j) data_[j] += other.data_[j];
    return *this;
}

HVector& HVector::operator-=(const HVector& other) {
    require_dim(other, size(), "HVector -=");
    for (std::size_t j = 0; j < data_.size(); ++j) data_[j] -= other.data_[j];
    return *this;
}

HVector& HVector::operator*=(double factor) noexcept {
    for (double& x : data_) x *= factor;
    return *this;
}

void require_dim(const HVector& x, std::size_t expected, const char* what) {
    if (x.size() != expected) {
        throw Error(ErrorCode::dimension_mismatch,
                    std::string(what) + ": expected length " + std::to_string(expected) +
                        ", got " + std::to_string(x.size()));
    }
}

} // namespace itolab
