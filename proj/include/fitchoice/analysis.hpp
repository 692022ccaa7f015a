#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fitchoice/observables.hpp"
#include "fitchoice/params.hpp"

namespace fitchoice {

// The drift functions of the max-degree process. With s = (2 + beta) n,
//   f_n(x, y) = (1 - y/s)^d - (1 - (x + y)/s)^d
//   g_n(x, y) = sum_{k=0}^{d-1} (1 - y/s)^k (1 - (x + y)/s)^{d-1-k}
// so that f_n = (x/s) g_n. Both require x, y >= 0 and x + y <= s; a
// violation throws ValidationError.

/// f_n evaluated through log1p/expm1, independently of the g_n sum, so it
/// keeps full relative accuracy when x is small against s.
double eval_f(double x, double y, std::int64_t n, double beta, int d);
double eval_g(double x, double y, std::int64_t n, double beta, int d);

inline double eval_f(double x, double y, std::int64_t n, const ModelParams& p) {
    return eval_f(x, y, n, p.beta(), p.d());
}
inline double eval_g(double x, double y, std::int64_t n, const ModelParams& p) {
    return eval_g(x, y, n, p.beta(), p.d());
}

/// g_n(x, 0) minus its first-order expansion d - d(d-1)/2 * x/s.
double g_expansion_residual(double x, std::int64_t n, double beta, int d);

/// h(x) = 1 - (1 - x/(2+beta))^d - x, in a cancellation-free form.
double xstar_equation(double x, double beta, int d);

/// The unique root of h in (0, 2+beta) when d > 2+beta (bisection to 1e-12
/// absolute), otherwise nullopt.
std::optional<double> solve_xstar(double beta, int d);
inline std::optional<double> solve_xstar(const ModelParams& p) {
    return solve_xstar(p.beta(), p.d());
}

enum class Regime { Sublinear, Critical, Linear };

inline constexpr double kCriticalTolerance = 1e-12;

Regime classify(double beta, int d);
inline Regime classify(const ModelParams& p) { return classify(p.beta(), p.d()); }

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// What the band bounds apply to.
enum class Normalization {
    Exponent,       // slope of ln M against ln n
    LogCorrected,   // M ln n / n
    Linear,         // M / n
};

struct Band {
    Normalization normalization;
    double lower;
    double upper;

    friend bool operator==(const Band&, const Band&) = default;
};

/// Sublinear: lower = upper = d/(2+beta). Critical: (2d/((d-1)lambda), 2d/(d-1)).
/// Linear: (x*/lambda, x*).
Band bands(const ModelParams& p);

struct ExponentFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::int64_t points = 0;

    friend bool operator==(const ExponentFit&, const ExponentFit&) = default;
};

/// Ordinary least squares of ln y on ln x. Needs at least 10 points with
/// positive coordinates.
ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Fit of ln M against ln n over checkpoints with n in [n_min, n_max].
ExponentFit estimate_exponent(std::span<const Checkpoint> checkpoints,
                              std::pair<std::int64_t, std::int64_t> window);

/// Default fit window: the last two decades below n_final.
std::pair<std::int64_t, std::int64_t> default_window(std::int64_t n_final);

struct Verdict {
    std::string name;
    double observed;
    double lower;
    double upper;
    bool pass;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Acceptance slack applied around the asymptotic bands at finite n.
struct BandTolerance {
    double exponent_abs = 0.08;
    double critical_lower_factor = 0.8;
    double critical_upper_factor = 1.5;
    double critical_slope_lower = 0.85;
    double critical_slope_upper = 1.0;
    double linear_abs = 0.05;
};

struct RegimeReport {
    Regime regime;
    std::optional<double> x_star;
    ExponentFit exponent_fit;
    Band band;
    std::vector<Verdict> verdicts;

    friend bool operator==(const RegimeReport&, const RegimeReport&) = default;
};

/// Assembles the report from the ensemble-level fitted exponent and the
/// cross-replica median of the regime's normalized statistic at the final
/// checkpoint.
RegimeReport make_report(const ModelParams& p, const ExponentFit& fit,
                         double final_median_normalized, const BandTolerance& tol = {});

}  // namespace fitchoice
