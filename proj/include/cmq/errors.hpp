#pragma once

#include <stdexcept>
#include <string>

namespace cmq {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct SymmetryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative solver exhausts its iteration budget.
// Carries the last estimate so callers can still inspect it.
struct IterationError : std::runtime_error {
    double last_estimate;
    IterationError(const std::string& msg, double estimate)
        : std::runtime_error(msg), last_estimate(estimate) {}
};

struct ExclusionPrincipleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuantizabilityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TruncationLeakageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cmq
