#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vnlab {

enum class ErrorKind {
    NotNormal,
    NoConvergence,
    DomainError,
    SpectrumHit,
    BadWeights,
    BadPermutation,
    NotMember,
    BadPartition,
    ClampExceeded,
    NotAffiliated,
    BadControl,
    QuadratureDiverged,
    BadCutoff,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& where, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " in " + where + ": " + what),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Failures of an iterative numerical method, as opposed to bad input.
    bool is_numerical() const noexcept {
        return kind_ == ErrorKind::NoConvergence || kind_ == ErrorKind::QuadratureDiverged ||
               kind_ == ErrorKind::ClampExceeded;
    }

private:
    ErrorKind kind_;
};

}  // namespace vnlab
