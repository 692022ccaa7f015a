#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fitchoice/params.hpp"
#include "fitchoice/rng.hpp"
#include "fitchoice/weighted_sampler.hpp"

namespace fitchoice {

using RootFitness = std::pair<FitnessClass, FitnessClass>;

/// Running maximum degree within one fitness class.
struct ClassLeader {
    std::int64_t max_degree = 0;   // 0 while the class is empty
    VertexId hub = kNoVertex;      // lowest-index vertex attaining max_degree
    std::int64_t count_at_max = 0; // number of class vertices with degree == max_degree
};

struct StepOutcome {
    VertexId new_vertex;
    FitnessClass new_fitness;
    VertexId target;
};

struct StepRecord {
    VertexId new_vertex;
    FitnessClass new_fitness;
    std::vector<VertexId> sample;
    VertexId target;
};

/// Picks the member of `sample` maximizing fitness * degree. Ties between
/// distinct vertices are broken uniformly (one variate consumed only when a
/// tie exists); repeated draws of the same vertex count once.
VertexId select_target(std::span<const VertexId> sample,
                       std::span<const std::int64_t> degrees,
                       std::span<const FitnessClass> fitness,
                       double low_value, double high_value, Engine& rng);

/// The evolving tree. Starts from two vertices joined by one edge and grows
/// by one vertex and one edge per step.
class TreeState {
public:
    TreeState(const ModelParams& params, std::uint64_t seed,
              std::optional<RootFitness> root_fitness = std::nullopt);

    const ModelParams& params() const noexcept { return params_; }
    std::int64_t n_edges() const noexcept { return n_edges_; }
    std::size_t vertex_count() const noexcept { return fitness_.size(); }

    std::int64_t degree(VertexId v) const { return sampler_.degree(v); }
    std::span<const std::int64_t> degrees() const noexcept { return sampler_.degrees(); }
    FitnessClass fitness(VertexId v) const { return fitness_[v]; }
    std::span<const FitnessClass> fitness() const noexcept { return fitness_; }
    VertexId parent(VertexId v) const { return parent_[v]; }
    std::span<const VertexId> parents() const noexcept { return parent_; }
    const SamplerIndex& sampler() const noexcept { return sampler_; }

    const ClassLeader& leader(FitnessClass c) const noexcept {
        return leaders_[static_cast<int>(c)];
    }

    /// One growth step without materializing the sample.
    StepOutcome advance();
    /// One growth step, returning the full record including the sample.
    StepRecord evolve_step();

private:
    FitnessClass draw_fitness();
    void note_new_vertex(VertexId v, FitnessClass c);
    void note_increment(VertexId v);

    ModelParams params_;
    Engine rng_;
    std::int64_t n_edges_ = 1;
    SamplerIndex sampler_;
    std::vector<FitnessClass> fitness_;
    std::vector<VertexId> parent_;
    ClassLeader leaders_[2];
    std::vector<VertexId> scratch_;
};

inline TreeState init_state(const ModelParams& params, std::uint64_t seed,
                            std::optional<RootFitness> root_fitness = std::nullopt) {
    return TreeState(params, seed, root_fitness);
}

inline StepRecord evolve_step(TreeState& state) { return state.evolve_step(); }

}  // namespace fitchoice
