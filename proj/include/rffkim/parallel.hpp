#pragma once

#include <cstddef>
#include <functional>

namespace rffkim {

/// Worker count: RFFKIM_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Tasks must write only to their own output
/// slot; any reduction happens afterwards in index order, so results do not
/// depend on the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rffkim
