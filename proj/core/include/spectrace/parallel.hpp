#pragma once

#include <functional>

namespace spectrace {

/// Process-wide default worker count (set once from the CLI --threads flag;
/// defaults to the hardware concurrency). Always >= 1.
int default_threads();
void set_default_threads(int n);

/// Runs body(i) for i in [0, n) across `threads` workers (0 = default).
/// Iterations are distributed in contiguous blocks; the body must only write
/// to per-index slots. Determinism contract: callers accumulate results by a
/// serial index-ordered reduction afterward, so values are bit-stable across
/// thread counts. Exceptions thrown by the body are captured and rethrown
/// (first by index order) on the calling thread.
void parallel_for(int n, const std::function<void(int)>& body, int threads = 0);

} // namespace spectrace
