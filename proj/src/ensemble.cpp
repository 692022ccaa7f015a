#include "fitchoice/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "fitchoice/rng.hpp"
#include "fitchoice/simulation.hpp"

namespace fitchoice {

void EnsembleSpec::validate() const {
    if (replicas < 1) {
        throw ValidationError("replicas must be >= 1");
    }
    if (target_edges < 2) {
        throw ValidationError("target edge count must be >= 2");
    }
    if (parallelism < 1) {
        throw ValidationError("parallelism must be >= 1");
    }
    schedule.validate();
}

EnsembleError::EnsembleError(int replica, const std::string& what)
    : std::runtime_error("replica " + std::to_string(replica) + " failed: " + what),
      replica_(replica) {}

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::M: return "M";
        case Quantity::Z: return "Z";
        case Quantity::MLogNOverN: return "M_ln_n_over_n";
        case Quantity::MOverNPow: return "M_over_n_pow";
        case Quantity::X: return "X";
    }
    return "unknown";
}

double nearest_rank(std::span<const double> sorted, int percent) {
    const auto count = static_cast<std::int64_t>(sorted.size());
    std::int64_t rank = (percent * count + 99) / 100;
    rank = std::clamp<std::int64_t>(rank, 1, count);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

Summary summarize(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return {sum / static_cast<double>(sorted.size()),
            sorted.front(),
            sorted.back(),
            nearest_rank(sorted, 5),
            nearest_rank(sorted, 50),
            nearest_rank(sorted, 95)};
}

double normalized(const ModelParams& p, std::int64_t n, std::int64_t M) {
    const auto nd = static_cast<double>(n);
    const auto md = static_cast<double>(M);
    switch (classify(p)) {
        case Regime::Sublinear: return md / std::pow(nd, p.d() / (2.0 + p.beta()));
        case Regime::Critical: return md * std::log(nd) / nd;
        case Regime::Linear: return md / nd;
    }
    return md;
}

namespace {

double quantity_value(const ModelParams& p, const Checkpoint& cp, Quantity q) {
    const auto nd = static_cast<double>(cp.n);
    const auto md = static_cast<double>(cp.M);
    switch (q) {
        case Quantity::M: return md;
        case Quantity::Z: return cp.Z;
        case Quantity::MLogNOverN: return md * std::log(nd) / nd;
        case Quantity::MOverNPow: return md / std::pow(nd, p.d() / (2.0 + p.beta()));
        case Quantity::X: return cp.X;
    }
    return 0.0;
}

ReplicaSummary summarize_replica(std::span<const Checkpoint> stream, std::uint64_t seed,
                                 std::pair<std::int64_t, std::int64_t> window,
                                 std::int64_t persistence_from) {
    ReplicaSummary r;
    r.seed = seed;
    try {
        r.fit = estimate_exponent(stream, window);
    } catch (const ValidationError&) {
        // Too few checkpoints in the window for a fit.
        r.fit = {std::nan(""), std::nan(""), 0};
    }

    const Checkpoint& last = stream.back();
    r.hub_stable_since = last.n;
    for (auto it = stream.rbegin(); it != stream.rend(); ++it) {
        if (it->hub_low != last.hub_low || it->hub_high != last.hub_high) {
            break;
        }
        r.hub_stable_since = it->n;
    }

    std::int64_t considered = 0, unique = 0;
    for (const auto& cp : stream) {
        if (cp.n > persistence_from) {
            ++considered;
            unique += (cp.L1_at_max == 1 && cp.Llambda_at_max == 1) ? 1 : 0;
        }
    }
    r.unique_leader_fraction =
        considered == 0 ? 0.0 : static_cast<double>(unique) / static_cast<double>(considered);
    return r;
}

}  // namespace

EnsembleResult aggregate(const ModelParams& params, std::vector<std::vector<Checkpoint>> streams,
                         std::span<const std::uint64_t> seeds, const AggregateOptions& options) {
    if (streams.empty() || streams.front().empty()) {
        throw ValidationError("aggregate needs at least one non-empty stream");
    }
    if (seeds.size() != streams.size()) {
        throw ValidationError("aggregate needs one seed per stream");
    }
    const auto& first = streams.front();
    for (std::size_t r = 1; r < streams.size(); ++r) {
        const bool same = std::equal(first.begin(), first.end(), streams[r].begin(),
                                     streams[r].end(),
                                     [](const auto& a, const auto& b) { return a.n == b.n; });
        if (!same) {
            throw ValidationError("checkpoint schedule mismatch in replica " + std::to_string(r));
        }
    }

    EnsembleResult out;
    const std::size_t replicas = streams.size();
    std::vector<double> values(replicas);
    for (std::size_t k = 0; k < first.size(); ++k) {
        CheckpointStats row;
        row.n = first[k].n;
        for (const Quantity q : kQuantities) {
            for (std::size_t r = 0; r < replicas; ++r) {
                values[r] = quantity_value(params, streams[r][k], q);
            }
            row.by_quantity[static_cast<int>(q)] = summarize(values);
        }
        out.stats.push_back(row);
    }

    const std::int64_t n_final = first.back().n;
    const auto window = options.fit_window.value_or(default_window(n_final));
    const auto persistence_from = options.persistence_from.value_or(n_final / 10);

    std::vector<double> slopes;
    std::vector<double> finals;
    for (std::size_t r = 0; r < replicas; ++r) {
        out.replicas.push_back(summarize_replica(streams[r], seeds[r], window, persistence_from));
        slopes.push_back(out.replicas.back().fit.slope);
        finals.push_back(normalized(params, n_final, streams[r].back().M));
    }
    std::sort(finals.begin(), finals.end());

    // Streams share a schedule, so either every replica has a fit or none does.
    ExponentFit fit = out.replicas.front().fit;
    if (replicas > 1 && fit.points > 0) {
        std::sort(slopes.begin(), slopes.end());
        fit.slope = nearest_rank(slopes, 50);
        double mean = 0.0;
        for (double s : slopes) {
            mean += s;
        }
        mean /= static_cast<double>(replicas);
        double ss = 0.0;
        for (double s : slopes) {
            ss += (s - mean) * (s - mean);
        }
        fit.stderr_slope = std::sqrt(ss / static_cast<double>(replicas - 1)) /
                           std::sqrt(static_cast<double>(replicas));
    }
    out.report = make_report(params, fit, nearest_rank(finals, 50), options.tolerance);
    out.streams = std::move(streams);
    return out;
}

std::vector<Checkpoint> run_replica(const EnsembleSpec& spec, int index) {
    TreeState state(spec.params, replica_seed(spec.master_seed, static_cast<std::uint64_t>(index)));
    std::vector<Checkpoint> stream;
    run(state, spec.target_edges, spec.schedule,
        [&stream](const Checkpoint& cp) { stream.push_back(cp); });
    return stream;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, const AggregateOptions& options,
                            const ReplicaRunner& runner) {
    spec.validate();
    const int replicas = spec.replicas;
    std::vector<std::vector<Checkpoint>> streams(static_cast<std::size_t>(replicas));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(replicas));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (int i = next++; i < replicas && !failed; i = next++) {
            try {
                streams[static_cast<std::size_t>(i)] = runner(spec, i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
                failed = true;
            }
        }
    };

    const int workers = std::min(spec.parallelism, replicas);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (int i = 0; i < replicas; ++i) {
        if (auto& e = errors[static_cast<std::size_t>(i)]) {
            try {
                std::rethrow_exception(e);
            } catch (const std::exception& ex) {
                throw EnsembleError(i, ex.what());
            } catch (...) {
                throw EnsembleError(i, "unknown error");
            }
        }
    }

    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < replicas; ++i) {
        seeds.push_back(replica_seed(spec.master_seed, static_cast<std::uint64_t>(i)));
    }
    return aggregate(spec.params, std::move(streams), seeds, options);
}

int default_parallelism() {
    if (const char* env = std::getenv("FITCHOICE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace fitchoice
