#pragma once

#include <cstddef>
#include <functional>

namespace diractime {

/// Environment variable holding the worker count for grid loops (default 1).
inline constexpr const char* kWorkersEnv = "DIRACTIME_WORKERS";

int worker_count();

/// Calls body(begin, end) over contiguous chunks of [0, count). Chunks write
/// disjoint outputs; reductions stay with the caller so results do not depend
/// on the worker count. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace diractime
