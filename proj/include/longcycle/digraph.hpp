#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "longcycle/rng.hpp"

namespace longcycle {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Compressed adjacency; adj slices are sorted ascending.
struct Csr {
    std::vector<std::uint64_t> off; // n+1 entries
    std::vector<Vertex> adj;

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adj.data() + off[v], adj.data() + off[v + 1]};
    }
    std::uint64_t degree(Vertex v) const { return off[v + 1] - off[v]; }
    bool has(Vertex v, Vertex w) const;
};

Csr build_out_csr(Vertex n, const std::vector<Edge>& edges);
Csr build_in_csr(Vertex n, const std::vector<Edge>& edges);

struct Digraph {
    Vertex n = 0;
    std::vector<Edge> edges; // sorted lexicographically, no duplicates
    Csr out, in;

    static Digraph from_edges(Vertex n, std::vector<Edge> edges);
    bool has_edge(Vertex v, Vertex w) const { return out.has(v, w); }
};

struct ModelParams {
    Vertex n = 0;
    double c = 0.0;

    double p() const { return c / static_cast<double>(n); }
    /// Per-color probability q with (1-q)^2 = 1-p, so the union of the two
    /// color layers is exactly an edge-probability-p digraph.
    double q() const;
    void validate() const; // throws std::invalid_argument
};

/// Two independent edge layers over the same vertex set. Blue edges are read
/// through their heads (in-neighbors), red edges through their tails
/// (out-neighbors); the union view drops colors and duplicate pairs.
struct ColoredDigraph {
    Vertex n = 0;
    std::vector<Edge> red, blue; // each sorted, no duplicates, no self-loops
    Csr red_out, red_in, blue_out, blue_in;

    static ColoredDigraph from_edges(Vertex n, std::vector<Edge> red,
                                     std::vector<Edge> blue);
    Digraph union_view() const;
};

/// Samples both layers with geometric gap-skipping over the n(n-1) ordered
/// pairs, so the cost is proportional to the number of edges drawn.
ColoredDigraph sample_colored(const ModelParams& params, std::uint64_t seed);

/// Strongly connected components (iterative Tarjan). Returns component id per
/// vertex; ids are dense, assigned in order of component completion.
struct SccResult {
    std::vector<Vertex> comp;        // vertex -> component id
    std::vector<std::uint32_t> size; // component id -> size
    Vertex count = 0;
};
SccResult strong_components(const Digraph& d);

/// Largest strong component; ties broken by smallest minimum vertex id.
/// Returned vertex list is sorted ascending.
std::vector<Vertex> giant_component(const Digraph& d);

enum class ColorSide { BlueIn, RedOut };

/// Neighbors of v on the given side restricted to `within` (sorted vertex
/// list). Result keeps adjacency (ascending) order.
std::vector<Vertex> color_neighbors(const ColoredDigraph& cd, Vertex v,
                                    ColorSide side,
                                    std::span<const Vertex> within);

/// Text form: "n m_red m_blue" header, then one "R v w" line per red edge and
/// one "B v w" per blue edge, both in sorted order. Deterministic byte-for-byte.
std::string serialize(const ColoredDigraph& cd);
ColoredDigraph parse_colored(std::istream& is);

} // namespace longcycle
