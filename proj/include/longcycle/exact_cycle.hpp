#pragma once

#include <cstdint>

#include "longcycle/digraph.hpp"

namespace longcycle {

/// Exact longest directed cycle length; 0 when the digraph is acyclic.
/// Subset dynamic program anchored at each subset's minimum vertex, so each
/// cycle is counted once from its smallest vertex. Throws
/// std::invalid_argument when d.n exceeds max_n (hard cap 20).
std::uint32_t longest_cycle_exact(const Digraph& d, std::uint32_t max_n = 18);

} // namespace longcycle
