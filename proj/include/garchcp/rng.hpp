#pragma once

#include <cstdint>
#include <random>

namespace garchcp {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for replication `index` of a run seeded with `base`.
///
/// Mixes the two words through SplitMix64 so that neighbouring indices give
/// unrelated streams. Seeds depend only on (base, index), never on which
/// worker thread runs the replication.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace garchcp
