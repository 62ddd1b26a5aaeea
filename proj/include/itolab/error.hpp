#pragma once

#include <stdexcept>
#include <string>

namespace itolab {

enum class ErrorCode {
    dimension_mismatch,
    invalid_argument,
    out_of_range,
    unsupported,
    budget_exceeded,
    not_an_event,
    numerical_blowup,
    malformed_config,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace itolab
