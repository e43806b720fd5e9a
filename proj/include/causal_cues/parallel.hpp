#pragma once

#include <cstddef>
#include <functional>

namespace causal_cues {

/// Worker count: CAUSAL_CUES_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, count). Each index is executed exactly once;
/// callers write results into pre-sized slots so output never depends on
/// scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace causal_cues
