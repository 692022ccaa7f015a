#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fitchoice/ensemble.hpp"
#include "fitchoice/observables.hpp"

namespace fitchoice::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
std::string format_real(double x);

Json checkpoint_to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

/// One JSONL record, keys in the fixed order
/// n, M, M1, Mlambda, X, Z, hub_low, hub_high, L1_at_max, Llambda_at_max.
std::string serialize_checkpoint(const Checkpoint& cp);
Checkpoint parse_checkpoint(std::string_view line);

void write_jsonl(std::ostream& os, std::span<const Checkpoint> trajectory);
std::vector<Checkpoint> read_jsonl(std::istream& is);

/// Rows `n,stat_name,value`, stat names like `M.q50`.
void write_stats_csv(std::ostream& os, std::span<const CheckpointStats> stats);

Json report_to_json(const RegimeReport& report, std::span<const ReplicaSummary> replicas);

enum class Format { Jsonl, Csv };

/// File form of an ensemble or single run plus its output location.
struct RunConfig {
    std::optional<double> beta;
    std::optional<int> d;
    std::optional<double> lambda;
    std::optional<double> p_lambda;
    std::optional<std::int64_t> steps;
    std::optional<int> replicas;
    std::optional<std::uint64_t> seed;
    std::optional<double> schedule_ratio;
    std::optional<std::string> out;
    std::optional<std::set<Format>> formats;
    std::optional<int> parallelism;

    /// Fields set in `other` replace the ones here.
    void override_with(const RunConfig& other);

    ModelParams model_params() const;
    /// Fills defaults and validates every bound before any work starts.
    EnsembleSpec ensemble_spec() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
std::set<Format> parse_formats(std::string_view list);

/// What an ensemble directory records: enough to recompute its report.
struct EnsembleManifest {
    ModelParams params;
    int replicas;
    std::int64_t target_edges;
    std::uint64_t master_seed;
    CheckpointSchedule schedule;
    std::vector<std::int64_t> points;
};

Json manifest_to_json(const EnsembleManifest& m);
EnsembleManifest manifest_from_json(const nlohmann::json& j);

/// Writes config.json, report.json, and per the formats replicas/*.jsonl and
/// stats.csv. Output bytes depend only on the spec, never on parallelism.
void write_ensemble_output(const std::filesystem::path& dir, const EnsembleSpec& spec,
                           const EnsembleResult& result, const std::set<Format>& formats);

struct LoadedEnsemble {
    EnsembleManifest manifest;
    std::vector<std::vector<Checkpoint>> streams;
};

LoadedEnsemble load_ensemble_output(const std::filesystem::path& dir);

/// Recomputes the report JSON of an ensemble directory from its trajectories.
Json analyze_directory(const std::filesystem::path& dir);

}  // namespace fitchoice::io
