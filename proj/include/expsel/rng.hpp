#pragma once

#include <cstdint>
#include <random>

namespace expsel {

using Engine = std::mt19937_64;

/// SplitMix64 output function (Steele, Lea & Flood).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` under `master`:
/// splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
/// Stable across releases; replication i of an experiment uses stream i.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

}  // namespace expsel
