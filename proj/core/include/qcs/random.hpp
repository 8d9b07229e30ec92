#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace qcs {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for trial `index` of stream `stream` under a run seed. Any trial can
/// be replayed in isolation from (seed, stream, index), independent of how
/// trials were scheduled across threads.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// merged outcome does not depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace qcs
