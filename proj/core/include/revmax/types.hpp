#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace revmax {

using NodeId = std::uint32_t;
using ArcId = std::uint32_t;
using AdId = std::uint32_t;

inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

/// Absolute tolerance for budget comparisons; absorbs accumulation error
/// in currency sums.
inline constexpr double kBudgetTolerance = 1e-9;

/// Thrown when an input file cannot be parsed; carries the 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace revmax
