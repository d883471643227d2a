#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "longcycle/digraph.hpp"
#include "longcycle/peel.hpp"
#include "longcycle/tree_pack.hpp"

namespace longcycle {

/// A vertex ended up with fewer than 5 usable choices on one side. With
/// survivor-mode packings this cannot happen; seeing it means the packing
/// used the wrong eligibility mode.
struct InsufficientNeighbors : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 5-in/5-out contracted digraph. Vertices 0..n_base-1 mirror the survivor
/// list v1 in order; vertices n_base..n-1 stand for packed paths. Every
/// vertex nominates 5 in-choices and 5 out-choices, all of them base
/// vertices, so the path vertices form an independent set. Slot roles are
/// positional: slots 0-2 light (matching), slot 3 boost (cycle repair),
/// slot 4 reserve (reassembly); a sequential no-replacement draw makes every
/// (set, role) combination equally likely.
///
/// Choice semantics against the two-color graph: an in-choice w of x means
/// the blue edge (v1[w], first vertex of x); an out-choice w of x means the
/// red edge (last vertex of x, v1[w]).
struct ContractedDigraph {
    std::uint32_t n = 0;
    std::uint32_t n_base = 0;
    std::vector<std::uint32_t> in_choice;  // n*5, slot-major
    std::vector<std::uint32_t> out_choice; // n*5
    std::vector<Vertex> v1;                // global ids of base vertices
    std::vector<std::vector<Vertex>> super_paths; // global sequences, n-n_base

    std::uint32_t in_at(std::uint32_t v, unsigned slot) const {
        return in_choice[std::size_t{v} * 5 + slot];
    }
    std::uint32_t out_at(std::uint32_t v, unsigned slot) const {
        return out_choice[std::size_t{v} * 5 + slot];
    }
};

/// Contracts the survivor packings onto v1. packings must be survivor-mode
/// results, one per tree component; every path (including single-vertex
/// ones) becomes one new vertex whose in-choices come from the path start's
/// blue in-neighbors in v1 and whose out-choices come from the path end's
/// red out-neighbors in v1. Deterministic under seed.
ContractedDigraph contract(const PeelResult& pr,
                           const std::vector<PackingResult>& packings,
                           const ColoredDigraph& cd, std::uint64_t seed);

/// Synthetic instance with identity provenance: base vertices 0..n_base-1
/// and n_super single-vertex paths, choices uniform over base vertices
/// excluding self. For phase-level tests without an underlying colored graph.
ContractedDigraph synthetic_dstar(std::uint32_t n_base, std::uint32_t n_super,
                                  std::uint64_t seed);

/// Re-randomizes the slot roles per vertex per side, keeping the chosen sets.
void resplit_roles(ContractedDigraph& d, std::uint64_t seed);

} // namespace longcycle
