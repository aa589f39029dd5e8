#pragma once

#include <cstdint>
#include <functional>

namespace jssr {

// Number of worker threads used by parallel_for. 0 restores the default
// (hardware concurrency). Every parallel loop writes each output element
// exactly once, so results do not depend on this setting.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [begin, end) on the configured number of threads.
// Falls back to a plain loop when the range is small or one thread is set.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn);

// Chunked variant: fn(chunk_begin, chunk_end). Used where per-index closures
// would be too fine-grained.
void parallel_for_chunked(std::int64_t begin, std::int64_t end,
                          const std::function<void(std::int64_t, std::int64_t)>& fn);

} // namespace jssr
