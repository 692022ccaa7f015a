#include "fitchoice/params.hpp"

#include <cmath>

namespace fitchoice {

ModelParams::ModelParams(double beta, int d, double lambda, double p_lambda)
    : beta_(beta), d_(d), lambda_(lambda), p_lambda_(p_lambda) {
    if (!std::isfinite(beta) || !(beta > -1.0)) {
        throw ValidationError("beta must exceed -1 (got " + std::to_string(beta) + ")");
    }
    if (d < 2) {
        throw ValidationError("d must be an integer >= 2 (got " + std::to_string(d) + ")");
    }
    if (!std::isfinite(lambda) || !(lambda >= 1.0)) {
        throw ValidationError("lambda must be >= 1 (got " + std::to_string(lambda) + ")");
    }
    if (!(p_lambda > 0.0 && p_lambda < 1.0)) {
        throw ValidationError("p_lambda must lie in (0, 1) (got " + std::to_string(p_lambda) + ")");
    }
}

std::string to_string(FitnessClass c) {
    return c == FitnessClass::High ? "High" : "Low";
}

}  // namespace fitchoice
