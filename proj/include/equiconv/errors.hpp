#pragma once

#include <stdexcept>
#include <string>

namespace equiconv {

// Domain errors map to CLI exit code 2; everything else is internal (exit 1).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, bool domain = true)
        : std::runtime_error(code + ": " + message), code_(std::move(code)), domain_(domain) {}

    const std::string& code() const noexcept { return code_; }
    bool is_domain() const noexcept { return domain_; }

private:
    std::string code_;
    bool domain_;
};

// Internal and IoError codes are not domain errors.
[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message, code != "Internal" && code != "IoError");
}

} // namespace equiconv
