#include "fitchoice/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "fitchoice/params.hpp"

namespace fitchoice {

void CheckpointSchedule::validate() const {
    if (!(ratio > 1.0) || !std::isfinite(ratio)) {
        throw ValidationError("schedule ratio must exceed 1");
    }
    if (dense && dense->first > dense->second) {
        throw ValidationError("dense schedule range is empty");
    }
}

std::vector<std::int64_t> CheckpointSchedule::points(std::int64_t after, std::int64_t until) const {
    validate();
    std::vector<std::int64_t> out;
    for (int k = 0;; ++k) {
        const double x = std::pow(ratio, k);
        if (x > static_cast<double>(until) + 0.5) {
            break;
        }
        const auto p = static_cast<std::int64_t>(std::llround(x));
        if (p > after && p <= until) {
            out.push_back(p);
        }
    }
    for (auto p : extra) {
        if (p > after && p <= until) {
            out.push_back(p);
        }
    }
    if (dense) {
        for (auto p = std::max(dense->first, after + 1); p <= std::min(dense->second, until); ++p) {
            out.push_back(p);
        }
    }
    if (until > after) {
        out.push_back(until);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace fitchoice
