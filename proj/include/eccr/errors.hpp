#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eccr {

/// The requested interference layout cannot be placed on the packet.
class InfeasibleScenario : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reports that cannot be combined (different packets, block counts, layouts).
class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedTrace : public std::runtime_error {
public:
    MalformedTrace(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace eccr
