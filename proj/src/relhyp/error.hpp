#pragma once

#include <stdexcept>
#include <string>

namespace relhyp {

// Numeric values are shared with the C API and the CLI exit codes.
enum class ErrorCode : int {
    kOk = 0,
    kParse = 1,
    kCapExceeded = 2,
    kAssertion = 3,
    kInvalidArgument = 4,
    kIo = 5,
    kInternal = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::kInvalidArgument, what);
}

// Vertex cap for every constructed space; RELHYP_CAP_VERTICES overrides.
std::size_t vertex_cap();

}  // namespace relhyp
