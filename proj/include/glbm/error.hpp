/*
   Copyright 2026 The glbm Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glbm {

enum class ErrorCode {
    InvalidParameter,
    DimensionMismatch,
    NumericalOverflow,
    SolverFailure,
    InvalidUsage,
    LevelOutOfRange,
    UndefinedAtPoint,
    WindowTooSmall,
    IndexOutOfRange,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// harness can map it onto an exit status or a per-trial failure record.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NumericalOverflow: return "numerical-overflow";
    case ErrorCode::SolverFailure: return "solver-failure";
    case ErrorCode::InvalidUsage: return "invalid-usage";
    case ErrorCode::LevelOutOfRange: return "level-out-of-range";
    case ErrorCode::UndefinedAtPoint: return "undefined-at-z";
    case ErrorCode::WindowTooSmall: return "window-too-small";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ValidationError: return "validation-error";
    case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

} // namespace glbm
