#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speckle {

/// Failure categories. The CLI prints these as machine-parsable tags.
enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    invalid_geometry,
    size_limit,
    cg_breakdown,
    factorization,
    diverged,
    io,
    format,
    external_denoiser,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace speckle
