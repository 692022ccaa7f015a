#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "fitchoice/observables.hpp"
#include "fitchoice/schedule.hpp"
#include "fitchoice/tree_state.hpp"

namespace fitchoice {

using CheckpointSink = std::function<void(const Checkpoint&)>;

/// A checkpoint consumer failed. The tree is left consistent at edge count n.
class SinkError : public std::runtime_error {
public:
    SinkError(std::int64_t n, const std::string& what);
    std::int64_t n() const noexcept { return n_; }

private:
    std::int64_t n_;
};

/// Grows `state` to `target_edges`, emitting a snapshot at every scheduled
/// edge count. Requires target_edges > state.n_edges().
void run(TreeState& state, std::int64_t target_edges, const CheckpointSchedule& schedule,
         const CheckpointSink& sink);

}  // namespace fitchoice
