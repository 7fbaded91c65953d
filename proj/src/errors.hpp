#pragma once

#include <stdexcept>
#include <string>

namespace boostq {

enum class ErrorCode {
    invalid_argument = 1,
    parse = 2,
    unstable = 3,          // offered load rho >= 1
    no_root = 4,           // gamma equation has no root below theta*
    domain = 5,            // argument outside the operation's domain (e.g. theta >= theta*)
    inadmissible = 6,      // infinite boost or divergent admissibility expectation
    insufficient_data = 7,
    numeric = 8,
    too_large = 9,         // brute-force size guard
    mismatch = 10,         // paired samples from different traces
    convergence = 11,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace boostq
