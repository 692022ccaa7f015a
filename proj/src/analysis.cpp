#include "fitchoice/analysis.hpp"

#include <cmath>
#include <string>

namespace fitchoice {

namespace {

double scale_of(std::int64_t n, double beta) {
    return (2.0 + beta) * static_cast<double>(n);
}

void check_domain(double x, double y, double s) {
    if (!(x >= 0.0) || !(y >= 0.0) || !(x + y <= s)) {
        throw ValidationError("f/g domain requires x, y >= 0 and x + y <= (2+beta)n");
    }
}

}  // namespace

double eval_f(double x, double y, std::int64_t n, double beta, int d) {
    const double s = scale_of(n, beta);
    check_domain(x, y, s);
    const double a = 1.0 - y / s;
    const double rest = s - x - y;
    if (rest <= 0.0) {
        return std::pow(a, d);
    }
    // a^d - b^d = b^d (exp(d ln(a/b)) - 1) with a/b = 1 + x/(s - x - y).
    const double b = rest / s;
    return std::pow(b, d) * std::expm1(d * std::log1p(x / rest));
}

double eval_g(double x, double y, std::int64_t n, double beta, int d) {
    const double s = scale_of(n, beta);
    check_domain(x, y, s);
    const double a = 1.0 - y / s;
    const double b = 1.0 - (x + y) / s;
    double sum = 0.0;
    double a_pow = 1.0;
    for (int k = 0; k < d; ++k) {
        sum += a_pow * std::pow(b, d - 1 - k);
        a_pow *= a;
    }
    return sum;
}

double g_expansion_residual(double x, std::int64_t n, double beta, int d) {
    const double s = scale_of(n, beta);
    const double dd = d;
    return eval_g(x, 0.0, n, beta, d) - (dd - dd * (dd - 1.0) / 2.0 * x / s);
}

double xstar_equation(double x, double beta, int d) {
    return -std::expm1(d * std::log1p(-x / (2.0 + beta))) - x;
}

Regime classify(double beta, int d) {
    const double gap = static_cast<double>(d) - (2.0 + beta);
    if (std::abs(gap) <= kCriticalTolerance) {
        return Regime::Critical;
    }
    return gap < 0.0 ? Regime::Sublinear : Regime::Linear;
}

std::optional<double> solve_xstar(double beta, int d) {
    if (classify(beta, d) != Regime::Linear) {
        return std::nullopt;
    }
    constexpr double kBracket = 1e-15;
    double lo = kBracket;
    double hi = 2.0 + beta - kBracket;
    // h(lo) > 0 > h(hi); h is concave so this is the only sign change.
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (xstar_equation(mid, beta, d) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Sublinear: return "sublinear";
        case Regime::Critical: return "critical";
        case Regime::Linear: return "linear";
    }
    return "unknown";
}

Regime regime_from_string(const std::string& s) {
    if (s == "sublinear") return Regime::Sublinear;
    if (s == "critical") return Regime::Critical;
    if (s == "linear") return Regime::Linear;
    throw ValidationError("unknown regime '" + s + "'");
}

Band bands(const ModelParams& p) {
    const double d = p.d();
    switch (classify(p)) {
        case Regime::Sublinear: {
            const double e = d / (2.0 + p.beta());
            return {Normalization::Exponent, e, e};
        }
        case Regime::Critical: {
            const double upper = 2.0 * d / (d - 1.0);
            return {Normalization::LogCorrected, upper / p.lambda(), upper};
        }
        case Regime::Linear: {
            const double x = *solve_xstar(p);
            return {Normalization::Linear, x / p.lambda(), x};
        }
    }
    throw InvariantViolation("unhandled regime");
}

ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("fit_loglog: x and y differ in length");
    }
    const std::size_t k = x.size();
    if (k < 10) {
        throw ValidationError("exponent fit needs at least 10 points in the window (got " +
                              std::to_string(k) + ")");
    }
    std::vector<double> lx(k), ly(k);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw ValidationError("exponent fit needs positive n and M");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("exponent fit needs at least two distinct n");
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ly[i] - my - slope * (lx[i] - mx);
        ssr += r * r;
    }
    const double var = ssr / static_cast<double>(k - 2);
    return {slope, std::sqrt(var / sxx), static_cast<std::int64_t>(k)};
}

ExponentFit estimate_exponent(std::span<const Checkpoint> checkpoints,
                              std::pair<std::int64_t, std::int64_t> window) {
    std::vector<double> ns, ms;
    for (const auto& cp : checkpoints) {
        if (cp.n >= window.first && cp.n <= window.second) {
            ns.push_back(static_cast<double>(cp.n));
            ms.push_back(static_cast<double>(cp.M));
        }
    }
    return fit_loglog(ns, ms);
}

std::pair<std::int64_t, std::int64_t> default_window(std::int64_t n_final) {
    return {std::max<std::int64_t>(1, n_final / 100), n_final};
}

RegimeReport make_report(const ModelParams& p, const ExponentFit& fit,
                         double final_median_normalized, const BandTolerance& tol) {
    RegimeReport r{classify(p), solve_xstar(p), fit, bands(p), {}};
    auto verdict = [&](std::string name, double observed, double lo, double hi, bool open) {
        const bool pass = open ? (observed > lo && observed < hi)
                               : (observed >= lo && observed <= hi);
        r.verdicts.push_back({std::move(name), observed, lo, hi, pass});
    };
    switch (r.regime) {
        case Regime::Sublinear:
            verdict("exponent", fit.slope, r.band.lower - tol.exponent_abs,
                    r.band.upper + tol.exponent_abs, false);
            break;
        case Regime::Critical:
            verdict("M_ln_n_over_n", final_median_normalized,
                    tol.critical_lower_factor * r.band.lower,
                    tol.critical_upper_factor * r.band.upper, false);
            verdict("exponent", fit.slope, tol.critical_slope_lower, tol.critical_slope_upper,
                    true);
            break;
        case Regime::Linear:
            verdict("M_over_n", final_median_normalized, r.band.lower - tol.linear_abs,
                    r.band.upper + tol.linear_abs, false);
            break;
    }
    return r;
}

}  // namespace fitchoice
