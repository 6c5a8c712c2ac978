#pragma once

#include <cstddef>
#include <functional>

namespace echoplace {

// Worker count: min(hardware, ECHOPLACE_THREADS if set). Always >= 1.
int thread_count();

// Runs fn(begin, end) over [0, n) split into contiguous ranges. The partition
// depends only on n and chunk; results must not depend on which thread ran a
// range. Runs inline when a single worker is available.
void parallel_for(size_t n, size_t chunk, const std::function<void(size_t, size_t)>& fn);

}  // namespace echoplace
