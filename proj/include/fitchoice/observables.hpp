#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fitchoice/tree_state.hpp"

namespace fitchoice {

/// Observables of one tree at edge count n.
struct Checkpoint {
    std::int64_t n = 0;
    std::int64_t M = 0;        // maximum degree
    std::int64_t M1 = 0;       // maximum degree among fitness-1 vertices (0 if none)
    std::int64_t Mlambda = 0;  // maximum degree among fitness-lambda vertices (0 if none)
    double X = 0.0;            // max(M1, lambda * Mlambda)
    double Z = 0.0;            // M / n
    std::optional<VertexId> hub_low;
    std::optional<VertexId> hub_high;
    std::int64_t L1_at_max = 0;
    std::int64_t Llambda_at_max = 0;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// O(1): reads the leaders the tree maintains during growth.
Checkpoint snapshot(const TreeState& state);

/// Total weight (degree + beta) of class vertices with degree strictly above k.
/// O(N) scan.
double tail_weight(const TreeState& state, FitnessClass c, double k);

/// Number of class vertices with degree exactly k. O(N) scan.
std::int64_t level_count(const TreeState& state, FitnessClass c, std::int64_t k);

double tail_weight(std::span<const std::int64_t> degrees, std::span<const FitnessClass> fitness,
                   double beta, FitnessClass c, double k);

/// True iff no Low vertex is heavier than lambda * M_lambda or no High vertex
/// is heavier than M_1 / lambda. Vacuously true when a class is empty.
bool exclusivity_check(const TreeState& state);
bool exclusivity_check(std::span<const std::int64_t> degrees, std::span<const FitnessClass> fitness,
                       double beta, double lambda);

struct DriftStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

/// The series U_n = n exp(-c n / M) and Y_n = exp(c n / X) / n evaluated at
/// checkpoint times, kept in log form as well since Y_n overflows once
/// n / X is large. Drift statistics average U_{n+1}/U_n - 1 (resp. Y) over
/// consecutive checkpoints exactly one step apart inside the window.
struct DiagnosticSeries {
    double c = 0.0;
    std::vector<std::int64_t> n;
    std::vector<double> log_U;
    std::vector<double> log_Y;
    std::vector<double> U;
    std::vector<double> Y;
    DriftStats U_drift;
    DriftStats Y_drift;
};

/// Streaming form of the drift statistics, for dense schedules that would be
/// too large to hold as a trajectory.
class DriftProbe {
public:
    DriftProbe(double c, std::int64_t n_min, std::int64_t n_max);

    void push(const Checkpoint& cp);
    DriftStats U_drift() const { return u_.stats(); }
    DriftStats Y_drift() const { return y_.stats(); }

private:
    struct Moments {
        std::int64_t count = 0;
        double mean = 0.0;
        double m2 = 0.0;
        void add(double x);
        DriftStats stats() const;
    };

    double c_;
    std::int64_t n_min_;
    std::int64_t n_max_;
    std::optional<std::int64_t> prev_n_;
    double prev_log_u_ = 0.0;
    double prev_log_y_ = 0.0;
    Moments u_;
    Moments y_;
};

double log_U(std::int64_t n, std::int64_t M, double c);
double log_Y(std::int64_t n, double X, double c);

/// Throws ValidationError unless c > 0. Without a window, every checkpoint
/// contributes to the drift statistics.
DiagnosticSeries diagnostics(std::span<const Checkpoint> trajectory, double c,
                             std::optional<std::pair<std::int64_t, std::int64_t>> window = {});

}  // namespace fitchoice
