#pragma once

#include <cstdint>

namespace iotscan {

/// splitmix64 finalizer over (seed, index): independent stream seeds per trial, device or batch.
constexpr std::uint64_t
derive_seed (std::uint64_t seed, std::uint64_t index)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace iotscan
