#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ppv {

/// Exception carrying a stable machine-readable code next to the human message.
/// The CLI surfaces the code verbatim in its JSON diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
    throw Error(code, msg);
}

// Internal-consistency check. These fire only on implementation bugs, never on
// bad user input.
inline void require_internal(bool ok, const std::string& what) {
    if (!ok) throw Error("internal", "internal invariant violated: " + what);
}

} // namespace ppv
