#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fitchoice/params.hpp"
#include "fitchoice/rng.hpp"

namespace fitchoice {

/// Dynamic categorical distribution over vertices with weight `degree + beta`.
///
/// Backed by a Fenwick tree of real partial sums. Sampling is a single binary
/// descent driven by one uniform variate; increments and appends are
/// O(log N). The integer degrees are kept alongside so the partial sums can be
/// rebuilt exactly, which happens every `kRebuildInterval` updates to bound
/// floating-point drift.
class SamplerIndex {
public:
    static constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

    SamplerIndex() = default;
    SamplerIndex(std::span<const std::int64_t> degrees, double beta);

    std::size_t size() const noexcept { return degrees_.size(); }
    bool empty() const noexcept { return degrees_.empty(); }
    double beta() const noexcept { return beta_; }

    std::int64_t degree(VertexId v) const { return degrees_[v]; }
    std::span<const std::int64_t> degrees() const noexcept { return degrees_; }
    double weight(VertexId v) const { return static_cast<double>(degrees_[v]) + beta_; }

    /// Cached running total of all weights.
    double total() const noexcept { return total_; }
    /// `sum(degree) + beta * size()`, evaluated from the integer degrees.
    double closed_form_total() const noexcept;
    std::int64_t degree_sum() const noexcept { return degree_sum_; }

    /// Sum of the first `count` weights as stored in the tree.
    double prefix(std::size_t count) const;

    VertexId sample(Engine& rng) const;
    /// Descent for an explicit target in [0, total()).
    VertexId find(double target) const;

    void increment(VertexId v);
    VertexId append();

    /// Recompute the partial sums from the integer degrees and check the
    /// cached total against the closed form. Throws InvariantViolation if
    /// they disagree beyond 1e-9 relative.
    void rebuild();

    std::uint64_t update_count() const noexcept { return updates_; }
    std::uint64_t rebuild_count() const noexcept { return rebuilds_; }

private:
    void note_update();

    std::vector<std::int64_t> degrees_;
    std::vector<double> tree_;  // 1-based Fenwick array, tree_[0] unused
    double beta_ = 0.0;
    double total_ = 0.0;
    std::int64_t degree_sum_ = 0;
    std::size_t top_bit_ = 0;  // highest power of two <= size()
    std::uint64_t updates_ = 0;
    std::uint64_t rebuilds_ = 0;
};

inline SamplerIndex build_index(std::span<const std::int64_t> degrees, double beta) {
    return SamplerIndex(degrees, beta);
}

}  // namespace fitchoice
