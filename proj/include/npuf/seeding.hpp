#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

namespace npuf {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for a named stream of a master seed. Stable across platforms and
// independent of evaluation order, so parallel runs reproduce serial ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to per-index slots; scheduling order is not deterministic.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace npuf
