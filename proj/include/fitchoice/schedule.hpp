#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fitchoice {

/// Edge counts at which a trajectory is observed.
///
/// The base set is {round(ratio^k) : k >= 0}. Explicit extra points and an
/// optional dense range (every n in [from, to]) can be added. The end of a
/// run is always observed.
struct CheckpointSchedule {
    double ratio = 1.2;
    std::vector<std::int64_t> extra;
    std::optional<std::pair<std::int64_t, std::int64_t>> dense;

    /// Validates ratio > 1; throws ValidationError otherwise.
    void validate() const;

    /// Sorted distinct points in (after, until], always including `until`.
    std::vector<std::int64_t> points(std::int64_t after, std::int64_t until) const;

    friend bool operator==(const CheckpointSchedule&, const CheckpointSchedule&) = default;
};

}  // namespace fitchoice
