#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fitchoice {

using VertexId = std::uint64_t;
inline constexpr VertexId kNoVertex = ~VertexId{0};

/// Raised when user-supplied parameters violate a documented bound. The
/// message names the violated constraint.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an internal consistency check fails (a bug, not bad input).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class FitnessClass : std::uint8_t { Low = 0, High = 1 };

/// Parameters of the growth model.
///
/// Every new vertex samples `d` existing vertices with probability
/// proportional to `degree + beta` and attaches to the sampled vertex with the
/// largest `fitness * degree`. Fitness is 1 (Low) or `lambda` (High), the
/// latter with probability `p_lambda`.
class ModelParams {
public:
    ModelParams(double beta, int d, double lambda, double p_lambda);

    double beta() const noexcept { return beta_; }
    int d() const noexcept { return d_; }
    double lambda() const noexcept { return lambda_; }
    double p_lambda() const noexcept { return p_lambda_; }

    double fitness_value(FitnessClass c) const noexcept {
        return c == FitnessClass::High ? lambda_ : 1.0;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    double beta_;
    int d_;
    double lambda_;
    double p_lambda_;
};

std::string to_string(FitnessClass c);

}  // namespace fitchoice
