#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fitchoice/analysis.hpp"
#include "fitchoice/observables.hpp"
#include "fitchoice/schedule.hpp"

namespace fitchoice {

struct EnsembleSpec {
    ModelParams params;
    int replicas = 1;
    std::int64_t target_edges = 2;
    std::uint64_t master_seed = 0;
    CheckpointSchedule schedule;
    int parallelism = 1;

    void validate() const;
};

/// Cross-replica summary of one quantity at one checkpoint. Quantiles use
/// the nearest-rank convention.
struct Summary {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;

    friend bool operator==(const Summary&, const Summary&) = default;
};

enum class Quantity { M, Z, MLogNOverN, MOverNPow, X };
inline constexpr std::array kQuantities{Quantity::M, Quantity::Z, Quantity::MLogNOverN,
                                        Quantity::MOverNPow, Quantity::X};
std::string to_string(Quantity q);

struct CheckpointStats {
    std::int64_t n = 0;
    std::array<Summary, kQuantities.size()> by_quantity;

    const Summary& operator[](Quantity q) const { return by_quantity[static_cast<int>(q)]; }
    friend bool operator==(const CheckpointStats&, const CheckpointStats&) = default;
};

struct ReplicaSummary {
    std::uint64_t seed = 0;
    ExponentFit fit;
    /// First checkpoint from which both hub identities equal their final values.
    std::int64_t hub_stable_since = 0;
    /// Fraction of checkpoints with n > persistence_from where both classes
    /// have a unique vertex at their maximum degree.
    double unique_leader_fraction = 0.0;

    friend bool operator==(const ReplicaSummary&, const ReplicaSummary&) = default;
};

struct AggregateOptions {
    std::optional<std::pair<std::int64_t, std::int64_t>> fit_window;  // default: last two decades
    std::optional<std::int64_t> persistence_from;                      // default: n_final / 10
    BandTolerance tolerance;
};

struct EnsembleResult {
    std::vector<CheckpointStats> stats;
    std::vector<ReplicaSummary> replicas;
    RegimeReport report;
    std::vector<std::vector<Checkpoint>> streams;  // indexed by replica

    friend bool operator==(const EnsembleResult&, const EnsembleResult&) = default;
};

/// A replica failed; the ensemble result is discarded.
class EnsembleError : public std::runtime_error {
public:
    EnsembleError(int replica, const std::string& what);
    int replica() const noexcept { return replica_; }

private:
    int replica_;
};

/// Nearest-rank quantile of sorted data, `percent` in [0, 100].
double nearest_rank(std::span<const double> sorted, int percent);

Summary summarize(std::span<const double> values);

/// The regime's normalized statistic: M ln n / n, M / n, or M / n^{d/(2+beta)}.
double normalized(const ModelParams& p, std::int64_t n, std::int64_t M);

/// Cross-replica statistics and regime report. All streams must share the
/// same checkpoint times; a mismatch throws ValidationError.
EnsembleResult aggregate(const ModelParams& params, std::vector<std::vector<Checkpoint>> streams,
                         std::span<const std::uint64_t> seeds, const AggregateOptions& options = {});

/// One replica's checkpoint stream, as run_ensemble produces it.
std::vector<Checkpoint> run_replica(const EnsembleSpec& spec, int index);

using ReplicaRunner = std::function<std::vector<Checkpoint>(const EnsembleSpec&, int)>;

/// Runs `replicas` independent trees on `parallelism` worker threads.
/// Replica i uses replica_seed(master_seed, i); the result does not depend on
/// the number of workers.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const AggregateOptions& options = {},
                            const ReplicaRunner& runner = run_replica);

/// Worker count from FITCHOICE_THREADS, else hardware concurrency.
int default_parallelism();

}  // namespace fitchoice
