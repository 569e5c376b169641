#pragma once

#include "lngca/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lngca {

using Rng = std::mt19937_64;

/// Child seed for a named stream. Streams keyed by distinct paths are
/// independent of each other and of the order in which they are created.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// rows x cols matrix of independent N(0, 1) draws, filled column by column.
Matrix standard_normal(Index rows, Index cols, Rng& rng);

}  // namespace lngca
