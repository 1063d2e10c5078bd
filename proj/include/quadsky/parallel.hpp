#pragma once

#include <cstddef>
#include <functional>

namespace quadsky::parallel {

/// Machine parallelism, at least 1.
int default_threads();

/// Invokes fn(begin, end) over contiguous chunks of [0, n), possibly from
/// several threads. Chunking is deterministic; callers must write only to
/// per-index slots.
void for_range(std::size_t n, int threads,
               const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace quadsky::parallel
