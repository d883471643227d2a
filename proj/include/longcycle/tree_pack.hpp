#pragma once

#include <cstdint>
#include <vector>

#include "longcycle/digraph.hpp"
#include "longcycle/peel.hpp"

namespace longcycle {

/// Endpoint eligibility source. UPPER admits any-color neighbors anywhere in
/// the working set outside the tree (used for the deterministic cycle-length
/// upper bound); LOWER admits only blue in- / red out-neighbors in the survivor
/// set v1 (what the contraction consumes). LOWER eligibility implies UPPER, so
/// phi_UPPER <= phi_LOWER.
enum class EligibilityMode { Upper, Lower };

struct OrientedTree {
    std::vector<Vertex> vertices;  // sorted global ids
    std::vector<Edge> edges;       // directed tree edges, global ids
    std::vector<std::uint8_t> start_ok, end_ok; // indexed by position in vertices
};

struct PackingResult {
    std::uint32_t phi = 0;
    std::vector<std::vector<Vertex>> paths; // vertex sequences, global ids
    EligibilityMode mode = EligibilityMode::Upper;
};

/// Per-vertex flags for the tree's vertices (same order). start_ok: at least
/// one admissible in-neighbor outside; end_ok: admissible out-neighbor.
void eligibility(OrientedTree& t, const ColoredDigraph& cd,
                 const std::vector<Vertex>& k1, const std::vector<Vertex>& v1,
                 EligibilityMode mode);

/// Builds the oriented tree for a tree-flagged component, including flags.
OrientedTree oriented_tree_from_component(const GammaComponent& comp,
                                          const ColoredDigraph& cd,
                                          const std::vector<Vertex>& k1,
                                          const std::vector<Vertex>& v1,
                                          EligibilityMode mode);

/// Minimum uncovered vertex count over vertex-disjoint packings of properly
/// oriented paths whose start has start_ok and end has end_ok; a length-0 path
/// needs both flags. Linear-time tree dynamic program with witness.
PackingResult phi_dp(const OrientedTree& t);

/// Exhaustive oracle, capped at 12 vertices.
std::uint32_t phi_brute(const OrientedTree& t);

/// Re-checks PackingResult structure against the tree; throws on violation.
void validate_packing(const OrientedTree& t, const PackingResult& r);

} // namespace longcycle
