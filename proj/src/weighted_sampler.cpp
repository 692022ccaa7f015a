#include "fitchoice/weighted_sampler.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace fitchoice {

namespace {

constexpr std::size_t lowbit(std::size_t i) noexcept { return i & (~i + 1); }

}  // namespace

SamplerIndex::SamplerIndex(std::span<const std::int64_t> degrees, double beta)
    : degrees_(degrees.begin(), degrees.end()), beta_(beta) {
    if (!(beta > -1.0)) {
        throw ValidationError("beta must exceed -1");
    }
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (degrees_[i] < 1 || !(weight(i) > 0.0)) {
            throw ValidationError("vertex " + std::to_string(i) + " has nonpositive weight");
        }
        degree_sum_ += degrees_[i];
    }
    total_ = closed_form_total();
    rebuild();
    rebuilds_ = 0;
}

double SamplerIndex::closed_form_total() const noexcept {
    return static_cast<double>(degree_sum_) + beta_ * static_cast<double>(degrees_.size());
}

double SamplerIndex::prefix(std::size_t count) const {
    double sum = 0.0;
    for (std::size_t i = count; i > 0; i -= lowbit(i)) {
        sum += tree_[i];
    }
    return sum;
}

VertexId SamplerIndex::find(double target) const {
    const std::size_t n = degrees_.size();
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next <= n && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    // Drift between the cached total and the tree can push the target past
    // the last leaf.
    return pos < n ? pos : n - 1;
}

VertexId SamplerIndex::sample(Engine& rng) const {
    return find(uniform01(rng) * total_);
}

void SamplerIndex::increment(VertexId v) {
    ++degrees_[v];
    ++degree_sum_;
    for (std::size_t i = v + 1; i < tree_.size(); i += lowbit(i)) {
        tree_[i] += 1.0;
    }
    total_ += 1.0;
    note_update();
}

VertexId SamplerIndex::append() {
    const VertexId v = degrees_.size();
    degrees_.push_back(1);
    ++degree_sum_;
    const std::size_t i = v + 1;
    double node = 1.0 + beta_;
    for (std::size_t j = 1; j < lowbit(i); j <<= 1) {
        node += tree_[i - j];
    }
    tree_.push_back(node);
    if (std::has_single_bit(i)) {
        top_bit_ = i;
    }
    total_ += 1.0 + beta_;
    note_update();
    return v;
}

void SamplerIndex::note_update() {
    if (++updates_ % kRebuildInterval == 0) {
        rebuild();
    }
}

void SamplerIndex::rebuild() {
    const std::size_t n = degrees_.size();
    tree_.assign(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        tree_[i] += weight(i - 1);
        const std::size_t parent = i + lowbit(i);
        if (parent <= n) {
            tree_[parent] += tree_[i];
        }
    }
    top_bit_ = n == 0 ? 0 : std::bit_floor(n);

    const double fresh = prefix(n);
    const double closed = closed_form_total();
    const double scale = std::max(std::abs(closed), 1.0);
    if (std::abs(total_ - closed) > 1e-9 * scale) {
        throw InvariantViolation("sampler total drifted from closed form: cached " +
                                 std::to_string(total_) + " vs " + std::to_string(closed));
    }
    if (std::abs(fresh - closed) > 1e-9 * scale) {
        throw InvariantViolation("sampler partial sums disagree with closed-form total");
    }
    total_ = fresh;
    ++rebuilds_;
}

}  // namespace fitchoice
