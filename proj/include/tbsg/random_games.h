#pragma once

#include <cstddef>
#include <cstdint>

#include "tbsg/game.h"

namespace tbsg {

enum class Density { kSparse, kDense };

/// Two actions per state, owners drawn uniformly, costs uniform in [-10, 10].
/// Sparse distributions put normalized positive uniform weights on a random
/// support of 1 to 4 distinct states; dense ones cover every state.
/// The same arguments always yield the same game.
Game random_game(std::size_t n, double gamma, std::uint64_t seed, Density density = Density::kSparse);

}  // namespace tbsg
