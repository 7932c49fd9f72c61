#pragma once

#include <stdexcept>
#include <string>

namespace garnier {

enum class ErrorCode {
    parameter,          // precondition on numeric parameters violated
    degenerate,         // degenerate input (e.g. coordinates undefined)
    singular,           // evaluation at a singular point or gauge-singular denominator
    ill_conditioned,    // decomposition could not be computed reliably
    integration,        // ODE step controller failure
    branch,             // loop or path too close to a pole
    unsupported,        // operation intentionally not provided
    inconsistent,       // input fails a consistency constraint
    schema,             // serialization format problem
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace garnier
