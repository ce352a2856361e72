#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace weakident {

/// Bad user input (files, configs, unknown systems, precondition violations).
/// The CLI maps this to exit code 2. `category` is a stable machine-readable
/// token such as "format", "size", "config", "unknown_system".
class InputError : public std::runtime_error {
public:
    InputError(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

/// Numerical breakdown at run time (overflow, blow-up, singular systems with
/// no fallback). The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace weakident
