#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace symprop {

/// Worker cap from the SYMPROP_THREADS environment variable; unset or 0 means
/// std::thread::hardware_concurrency().
unsigned configured_threads();

/// Runs fn(i) for every i in [0, count) on up to `threads` workers (0 = use
/// configured_threads()). Work items must write to disjoint outputs. The first
/// exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// SplitMix64 finalizer; used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t value);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace symprop
