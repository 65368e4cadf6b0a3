#pragma once

#include <stdexcept>
#include <string>

namespace cfv {

// Error categories, numbered to match the CLI exit codes.
enum class ErrorCode {
    validation = 2,  // bad arguments, out-of-range config
    data = 3,        // unreadable/inconsistent files or inputs
    numeric = 4      // non-finite values, failed decompositions
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) {
    throw Error(ErrorCode::validation, msg);
}
[[noreturn]] inline void fail_data(const std::string& msg) {
    throw Error(ErrorCode::data, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
    throw Error(ErrorCode::numeric, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}

}  // namespace cfv
