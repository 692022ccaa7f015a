#include "fitchoice/simulation.hpp"

#include <string>

namespace fitchoice {

SinkError::SinkError(std::int64_t n, const std::string& what)
    : std::runtime_error("checkpoint sink failed at n=" + std::to_string(n) + ": " + what), n_(n) {}

void run(TreeState& state, std::int64_t target_edges, const CheckpointSchedule& schedule,
         const CheckpointSink& sink) {
    if (target_edges <= state.n_edges()) {
        throw ValidationError("target edge count must exceed the current edge count (" +
                              std::to_string(state.n_edges()) + ")");
    }
    const auto points = schedule.points(state.n_edges(), target_edges);
    for (const std::int64_t p : points) {
        while (state.n_edges() < p) {
            state.advance();
        }
        try {
            sink(snapshot(state));
        } catch (const std::exception& e) {
            throw SinkError(p, e.what());
        }
    }
}

}  // namespace fitchoice
