#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longcycle/digraph.hpp"

namespace longcycle {

struct PeelStep {
    char rule;  // 'a': pivot already inside, neighbors pulled in
                // 'b': pivot deficient outside, pivot + neighbors pulled in
    char side;  // 'b': blue in-neighbors, 'r': red out-neighbors
    Vertex pivot;
    std::vector<Vertex> added; // vertices newly added by this step, ascending
};

struct PeelResult {
    std::vector<Vertex> k1;  // sorted working vertex set
    std::vector<Vertex> s_l; // sorted fixpoint set
    std::vector<Vertex> v1;  // k1 \ s_l
    std::vector<Vertex> v2;  // members of s_l with >=1 blue-in and >=1 red-out in v1
    std::vector<PeelStep> trace;
};

/// Runs the two-case removal process on k1 to its fixpoint. The fixpoint is
/// order-independent; order_seed only permutes the worklist for testing that.
/// k1 must be sorted, duplicate-free, and strongly connected in the union.
PeelResult peel(const ColoredDigraph& cd, const std::vector<Vertex>& k1,
                std::uint64_t order_seed = 0);

struct GammaComponent {
    std::vector<Vertex> vertices;     // sorted
    std::size_t underlying_edges = 0; // unordered adjacent pairs inside
    std::size_t directed_edges = 0;   // union digraph edges inside
    bool is_tree = false; // both edge counts equal |vertices| - 1
    std::uint32_t pivot_steps = 0; // trace steps whose pivot lies here
};

/// Connected components of the undirected graph underlying the union
/// sub-digraph induced by s_l. A vertex pair linked in both directions counts
/// once in underlying_edges but twice in directed_edges, so is_tree excludes
/// it by requiring both counts to equal |vertices| - 1.
std::vector<GammaComponent> gamma_components(const PeelResult& pr,
                                             const ColoredDigraph& cd);

struct DensityReport {
    // (vertex count, directed edge count) per component
    std::vector<std::pair<std::uint32_t, std::uint64_t>> components;
    bool all_sparse = true; // every component has edges < 3*vertices/2
};

DensityReport density_diagnostic(const std::vector<GammaComponent>& comps);

/// One JSON object per step: {"case":"b","side":"blue_in","pivot":13,"added":[0,1]}
std::string trace_to_jsonl(const PeelResult& pr);

} // namespace longcycle
