#pragma once

#include <cstdint>
#include <functional>

namespace revmax {

/// Worker count: REVMAX_THREADS if set, otherwise hardware concurrency.
std::size_t thread_count();

/// Runs fn(chunk_index, begin, end) over [0, total) split into fixed-size
/// chunks. Chunks may execute on any thread; callers that need determinism
/// write into per-chunk slots and combine them in chunk order afterwards.
void parallel_for_chunks(std::uint64_t total, std::uint64_t chunk_size,
                         const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

} // namespace revmax
