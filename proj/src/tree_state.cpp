#include "fitchoice/tree_state.hpp"

#include <array>
#include <cassert>
#include <tuple>

namespace fitchoice {

VertexId select_target(std::span<const VertexId> sample,
                       std::span<const std::int64_t> degrees,
                       std::span<const FitnessClass> fitness,
                       double low_value, double high_value, Engine& rng) {
    auto score = [&](VertexId v) {
        const double f = fitness[v] == FitnessClass::High ? high_value : low_value;
        return f * static_cast<double>(degrees[v]);
    };

    double best = score(sample[0]);
    for (std::size_t i = 1; i < sample.size(); ++i) {
        best = std::max(best, score(sample[i]));
    }

    auto is_first_maximizer = [&](std::size_t i) {
        if (score(sample[i]) != best) {
            return false;
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (sample[j] == sample[i]) {
                return false;
            }
        }
        return true;
    };

    std::size_t distinct = 0;
    VertexId first = kNoVertex;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (is_first_maximizer(i)) {
            if (distinct++ == 0) {
                first = sample[i];
            }
        }
    }
    if (distinct == 1) {
        return first;
    }

    auto pick = uniform_index(rng, distinct);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (is_first_maximizer(i) && pick-- == 0) {
            return sample[i];
        }
    }
    return first;  // unreachable
}

TreeState::TreeState(const ModelParams& params, std::uint64_t seed,
                     std::optional<RootFitness> root_fitness)
    : params_(params), rng_(seed), scratch_(static_cast<std::size_t>(params.d())) {
    const std::array<std::int64_t, 2> initial{1, 1};
    sampler_ = SamplerIndex(initial, params_.beta());

    FitnessClass f0, f1;
    if (root_fitness) {
        std::tie(f0, f1) = *root_fitness;
    } else {
        f0 = draw_fitness();
        f1 = draw_fitness();
    }
    fitness_ = {f0, f1};
    parent_ = {kNoVertex, 0};
    note_new_vertex(0, f0);
    note_new_vertex(1, f1);
}

FitnessClass TreeState::draw_fitness() {
    return uniform01(rng_) < params_.p_lambda() ? FitnessClass::High : FitnessClass::Low;
}

void TreeState::note_new_vertex(VertexId v, FitnessClass c) {
    ClassLeader& lead = leaders_[static_cast<int>(c)];
    if (lead.max_degree < 1) {
        lead = {1, v, 1};
    } else if (lead.max_degree == 1) {
        ++lead.count_at_max;
        lead.hub = std::min(lead.hub, v);
    }
}

void TreeState::note_increment(VertexId v) {
    // Called after the degree of v went from k to k + 1.
    ClassLeader& lead = leaders_[static_cast<int>(fitness_[v])];
    const std::int64_t k1 = sampler_.degree(v);
    if (k1 > lead.max_degree) {
        lead = {k1, v, 1};
    } else if (k1 == lead.max_degree) {
        ++lead.count_at_max;
        lead.hub = std::min(lead.hub, v);
    }
}

StepOutcome TreeState::advance() {
    for (auto& s : scratch_) {
        s = sampler_.sample(rng_);
    }
    const VertexId target = select_target(scratch_, sampler_.degrees(), fitness_, 1.0,
                                          params_.lambda(), rng_);
    const FitnessClass fresh = draw_fitness();

    sampler_.increment(target);
    note_increment(target);
    const VertexId v = sampler_.append();
    fitness_.push_back(fresh);
    parent_.push_back(target);
    note_new_vertex(v, fresh);
    ++n_edges_;

    assert(sampler_.degree_sum() == 2 * n_edges_);
    assert(vertex_count() == static_cast<std::size_t>(n_edges_) + 1);
    return {v, fresh, target};
}

StepRecord TreeState::evolve_step() {
    const StepOutcome out = advance();
    return {out.new_vertex, out.new_fitness, scratch_, out.target};
}

}  // namespace fitchoice
