#pragma once

#include <cstddef>

#include <functional>

namespace infw {

/// Worker count for per-vertex loops: INFW_THREADS if set and positive,
/// otherwise 1.
int thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Bodies must write only
/// to slot i; reductions are done by the caller in fixed order afterwards, so
/// results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace infw
