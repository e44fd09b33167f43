#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "gpgad/types.hpp"

namespace gpgad {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed from a root seed and a stream name.
/// Stable across runs and platforms (splitmix64 over an FNV-1a hash of the name).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

Vec standard_normal(Rng& rng, Eigen::Index n);

}  // namespace gpgad
