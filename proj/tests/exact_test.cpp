#include "doctest.h"

#include <algorithm>
#include <vector>

#include "longcycle/exact_cycle.hpp"
#include "longcycle/rng.hpp"

using namespace longcycle;

namespace {

// Independent oracle: depth-first enumeration of all simple cycles, each
// anchored at its smallest vertex.
std::uint32_t brute_longest_cycle(const Digraph& d) {
    std::uint32_t best = 0;
    std::vector<Vertex> path;
    std::vector<bool> used(d.n, false);

    auto dfs = [&](auto&& self, Vertex anchor, Vertex v) -> void {
        for (Vertex w : d.out.neighbors(v)) {
            if (w == anchor) {
                best = std::max<std::uint32_t>(
                    best, static_cast<std::uint32_t>(path.size()));
            } else if (w > anchor && !used[w]) {
                used[w] = true;
                path.push_back(w);
                self(self, anchor, w);
                path.pop_back();
                used[w] = false;
            }
        }
    };
    for (Vertex a = 0; a < d.n; ++a) {
        path.assign(1, a);
        used.assign(d.n, false);
        used[a] = true;
        dfs(dfs, a, a);
    }
    return best;
}

} // namespace

TEST_CASE("small closed forms: triangle, dag, complete") {
    Digraph tri = Digraph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(longest_cycle_exact(tri) == 3);

    Digraph dag = Digraph::from_edges(5, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}});
    CHECK(longest_cycle_exact(dag) == 0);

    std::vector<Edge> k4;
    for (Vertex v = 0; v < 4; ++v)
        for (Vertex w = 0; w < 4; ++w)
            if (v != w) k4.emplace_back(v, w);
    CHECK(longest_cycle_exact(Digraph::from_edges(4, k4)) == 4);

    Digraph two = Digraph::from_edges(2, {{0, 1}, {1, 0}});
    CHECK(longest_cycle_exact(two) == 2);

    Digraph empty = Digraph::from_edges(4, {});
    CHECK(longest_cycle_exact(empty) == 0);
}

TEST_CASE("matches exhaustive enumeration on random 8-vertex digraphs") {
    SplitMix64 rng(8888);
    for (int iter = 0; iter < 200; ++iter) {
        double p = 0.05 + 0.4 * rng.next_double();
        std::vector<Edge> edges;
        for (Vertex v = 0; v < 8; ++v)
            for (Vertex w = 0; w < 8; ++w)
                if (v != w && rng.next_double() < p) edges.emplace_back(v, w);
        Digraph d = Digraph::from_edges(8, edges);
        CHECK(longest_cycle_exact(d) == brute_longest_cycle(d));
    }
}

TEST_CASE("size caps are enforced") {
    Digraph big = Digraph::from_edges(19, {{0, 1}});
    CHECK_THROWS_AS(longest_cycle_exact(big), std::invalid_argument);
    CHECK(longest_cycle_exact(big, 20) == 0);
    CHECK_THROWS_AS(longest_cycle_exact(big, 21), std::invalid_argument);

    // full 18-cycle at the default cap
    std::vector<Edge> ring;
    for (Vertex v = 0; v < 18; ++v) ring.emplace_back(v, (v + 1) % 18);
    CHECK(longest_cycle_exact(Digraph::from_edges(18, ring)) == 18);
}
