#include "fitchoice/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fitchoice {

namespace {

std::optional<VertexId> hub_of(const ClassLeader& lead) {
    if (lead.max_degree == 0) {
        return std::nullopt;
    }
    return lead.hub;
}

}  // namespace

Checkpoint snapshot(const TreeState& state) {
    const ClassLeader& low = state.leader(FitnessClass::Low);
    const ClassLeader& high = state.leader(FitnessClass::High);
    Checkpoint cp;
    cp.n = state.n_edges();
    cp.M1 = low.max_degree;
    cp.Mlambda = high.max_degree;
    cp.M = std::max(cp.M1, cp.Mlambda);
    cp.X = std::max(static_cast<double>(cp.M1),
                    state.params().lambda() * static_cast<double>(cp.Mlambda));
    cp.Z = static_cast<double>(cp.M) / static_cast<double>(cp.n);
    cp.hub_low = hub_of(low);
    cp.hub_high = hub_of(high);
    cp.L1_at_max = low.count_at_max;
    cp.Llambda_at_max = high.count_at_max;
    return cp;
}

double tail_weight(const TreeState& state, FitnessClass c, double k) {
    return tail_weight(state.degrees(), state.fitness(), state.params().beta(), c, k);
}

double tail_weight(std::span<const std::int64_t> degrees, std::span<const FitnessClass> fitness,
                   double beta, FitnessClass c, double k) {
    double sum = 0.0;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        if (fitness[v] == c && static_cast<double>(degrees[v]) > k) {
            sum += static_cast<double>(degrees[v]) + beta;
        }
    }
    return sum;
}

std::int64_t level_count(const TreeState& state, FitnessClass c, std::int64_t k) {
    const auto degrees = state.degrees();
    const auto fitness = state.fitness();
    std::int64_t count = 0;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        count += (fitness[v] == c && degrees[v] == k) ? 1 : 0;
    }
    return count;
}

bool exclusivity_check(const TreeState& state) {
    return exclusivity_check(state.degrees(), state.fitness(), state.params().beta(),
                             state.params().lambda());
}

bool exclusivity_check(std::span<const std::int64_t> degrees, std::span<const FitnessClass> fitness,
                       double beta, double lambda) {
    std::int64_t max_low = 0, max_high = 0;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        auto& m = fitness[v] == FitnessClass::High ? max_high : max_low;
        m = std::max(m, degrees[v]);
    }
    if (max_low == 0 || max_high == 0) {
        return true;
    }
    const double f1 = tail_weight(degrees, fitness, beta, FitnessClass::Low,
                                  lambda * static_cast<double>(max_high));
    const double flambda = tail_weight(degrees, fitness, beta, FitnessClass::High,
                                       static_cast<double>(max_low) / lambda);
    return f1 == 0.0 || flambda == 0.0;
}

double log_U(std::int64_t n, std::int64_t M, double c) {
    const auto nd = static_cast<double>(n);
    return std::log(nd) - c * nd / static_cast<double>(M);
}

double log_Y(std::int64_t n, double X, double c) {
    const auto nd = static_cast<double>(n);
    return c * nd / X - std::log(nd);
}

void DriftProbe::Moments::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

DriftStats DriftProbe::Moments::stats() const {
    DriftStats s{count, mean, 0.0};
    if (count > 1) {
        const double var = m2 / static_cast<double>(count - 1);
        s.stderr_mean = std::sqrt(var / static_cast<double>(count));
    }
    return s;
}

DriftProbe::DriftProbe(double c, std::int64_t n_min, std::int64_t n_max)
    : c_(c), n_min_(n_min), n_max_(n_max) {
    if (!(c > 0.0)) {
        throw ValidationError("diagnostic constant c must be positive");
    }
}

void DriftProbe::push(const Checkpoint& cp) {
    const double lu = log_U(cp.n, cp.M, c_);
    const double ly = log_Y(cp.n, cp.X, c_);
    if (prev_n_ && *prev_n_ + 1 == cp.n && *prev_n_ >= n_min_ && cp.n <= n_max_) {
        u_.add(std::expm1(lu - prev_log_u_));
        y_.add(std::expm1(ly - prev_log_y_));
    }
    prev_n_ = cp.n;
    prev_log_u_ = lu;
    prev_log_y_ = ly;
}

DiagnosticSeries diagnostics(std::span<const Checkpoint> trajectory, double c,
                             std::optional<std::pair<std::int64_t, std::int64_t>> window) {
    const auto [lo, hi] = window.value_or(
        std::pair{std::int64_t{0}, std::numeric_limits<std::int64_t>::max()});
    DriftProbe probe(c, lo, hi);
    DiagnosticSeries out;
    out.c = c;
    for (const auto& cp : trajectory) {
        probe.push(cp);
        out.n.push_back(cp.n);
        out.log_U.push_back(log_U(cp.n, cp.M, c));
        out.log_Y.push_back(log_Y(cp.n, cp.X, c));
        out.U.push_back(std::exp(out.log_U.back()));
        out.Y.push_back(std::exp(out.log_Y.back()));
    }
    out.U_drift = probe.U_drift();
    out.Y_drift = probe.Y_drift();
    return out;
}

}  // namespace fitchoice
