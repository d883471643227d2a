#include "longcycle/tree_pack.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

namespace longcycle {

namespace {

constexpr std::int64_t kInf = std::int64_t{1} << 40;

std::uint32_t local_of(const std::vector<Vertex>& vs, Vertex g) {
    auto it = std::lower_bound(vs.begin(), vs.end(), g);
    if (it == vs.end() || *it != g)
        throw std::invalid_argument("edge endpoint not a tree vertex");
    return static_cast<std::uint32_t>(it - vs.begin());
}

struct TreeView {
    std::uint32_t n = 0;
    std::vector<std::uint32_t> parent;            // root 0: parent[0] = 0
    std::vector<std::uint8_t> edge_up;            // 1: v -> parent, 0: parent -> v
    std::vector<std::vector<std::uint32_t>> kids; // ascending local ids
    std::vector<std::uint32_t> order;             // BFS order from root
};

TreeView build_view(const OrientedTree& t) {
    const std::uint32_t n = static_cast<std::uint32_t>(t.vertices.size());
    if (n == 0) throw std::invalid_argument("empty tree");
    if (t.edges.size() != n - 1)
        throw std::invalid_argument("tree must have |V|-1 edges");
    if (t.start_ok.size() != n || t.end_ok.size() != n)
        throw std::invalid_argument("flag arrays must match vertex count");

    // underlying adjacency with direction: (neighbor, up?) per endpoint
    std::vector<std::vector<std::pair<std::uint32_t, std::uint8_t>>> adj(n);
    for (const auto& [gv, gw] : t.edges) {
        std::uint32_t v = local_of(t.vertices, gv);
        std::uint32_t w = local_of(t.vertices, gw);
        adj[v].push_back({w, 1}); // edge leaves v
        adj[w].push_back({v, 0}); // edge enters w
    }

    TreeView view;
    view.n = n;
    view.parent.assign(n, 0);
    view.edge_up.assign(n, 0);
    view.kids.assign(n, {});
    std::vector<std::uint8_t> seen(n, 0);
    view.order.push_back(0);
    seen[0] = 1;
    for (std::size_t head = 0; head < view.order.size(); ++head) {
        std::uint32_t v = view.order[head];
        std::sort(adj[v].begin(), adj[v].end());
        for (auto [w, leaves] : adj[v]) {
            if (seen[w]) continue;
            seen[w] = 1;
            view.parent[w] = v;
            view.edge_up[w] = leaves ? 0 : 1; // edge (w->v) means child points up
            view.kids[v].push_back(w);
            view.order.push_back(w);
        }
    }
    if (view.order.size() != n)
        throw std::invalid_argument("tree edges do not connect all vertices");
    return view;
}

enum State : std::uint8_t { kClosed = 0, kOpenOut = 1, kOpenIn = 2 };

} // namespace

PackingResult phi_dp(const OrientedTree& t) {
    TreeView view = build_view(t);
    const std::uint32_t n = view.n;

    std::vector<std::int64_t> closed(n), open_out(n), open_in(n);
    // choices: -2 uncovered, -1 endpoint at the vertex itself, >=0 child id
    std::vector<std::int32_t> ch_cl_in(n), ch_cl_out(n), ch_oo(n), ch_oi(n);

    for (auto it = view.order.rbegin(); it != view.order.rend(); ++it) {
        std::uint32_t v = *it;
        std::int64_t base = 0;
        for (std::uint32_t c : view.kids[v]) base += closed[c];

        // best way to provide the path's in-side at v: start here (needs
        // start_ok) or extend a fragment from an in-child (edge c -> v)
        std::int64_t best_in = t.start_ok[v] ? 0 : kInf;
        std::int32_t pick_in = t.start_ok[v] ? -1 : -2;
        for (std::uint32_t c : view.kids[v]) {
            if (!view.edge_up[c]) continue;
            std::int64_t g = open_out[c] - closed[c];
            if (g < best_in) { best_in = g; pick_in = static_cast<std::int32_t>(c); }
        }
        std::int64_t best_out = t.end_ok[v] ? 0 : kInf;
        std::int32_t pick_out = t.end_ok[v] ? -1 : -2;
        for (std::uint32_t c : view.kids[v]) {
            if (view.edge_up[c]) continue;
            std::int64_t g = open_in[c] - closed[c];
            if (g < best_out) { best_out = g; pick_out = static_cast<std::int32_t>(c); }
        }

        std::int64_t covered =
            (best_in >= kInf || best_out >= kInf) ? kInf : base + best_in + best_out;
        std::int64_t uncovered = base + 1;
        if (covered <= uncovered) { // tie prefers covering v
            closed[v] = covered;
            ch_cl_in[v] = pick_in;
            ch_cl_out[v] = pick_out;
        } else {
            closed[v] = uncovered;
            ch_cl_in[v] = ch_cl_out[v] = -2;
        }

        bool up = v != 0 && view.edge_up[v] == 1;   // edge v -> parent exists
        bool down = v != 0 && view.edge_up[v] == 0; // edge parent -> v exists
        open_out[v] = (up && best_in < kInf) ? base + best_in : kInf;
        ch_oo[v] = pick_in;
        open_in[v] = (down && best_out < kInf) ? base + best_out : kInf;
        ch_oi[v] = pick_out;
    }

    PackingResult res;
    res.phi = static_cast<std::uint32_t>(closed[0]);

    // backtrace: assign successor links along each path
    constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    std::vector<std::uint32_t> succ(n, kNone);
    std::vector<std::uint8_t> uncov(n, 0), has_pred(n, 0);
    std::vector<std::pair<std::uint32_t, State>> stack{{0, kClosed}};
    while (!stack.empty()) {
        auto [v, st] = stack.back();
        stack.pop_back();
        std::int32_t in_pick = -2, out_pick = -2;
        if (st == kClosed) {
            if (ch_cl_in[v] == -2 && ch_cl_out[v] == -2) uncov[v] = 1;
            else { in_pick = ch_cl_in[v]; out_pick = ch_cl_out[v]; }
        } else if (st == kOpenOut) {
            in_pick = ch_oo[v];
        } else {
            out_pick = ch_oi[v];
        }
        for (std::uint32_t c : view.kids[v]) {
            if (static_cast<std::int32_t>(c) == in_pick) {
                succ[c] = v;
                has_pred[v] = 1;
                stack.push_back({c, kOpenOut});
            } else if (static_cast<std::int32_t>(c) == out_pick) {
                succ[v] = c;
                has_pred[c] = 1;
                stack.push_back({c, kOpenIn});
            } else {
                stack.push_back({c, kClosed});
            }
        }
    }

    for (std::uint32_t v = 0; v < n; ++v) {
        if (uncov[v] || has_pred[v]) continue;
        std::vector<Vertex> path{t.vertices[v]};
        for (std::uint32_t w = succ[v]; w != kNone; w = succ[w])
            path.push_back(t.vertices[w]);
        res.paths.push_back(std::move(path));
    }
    return res;
}

std::uint32_t phi_brute(const OrientedTree& t) {
    const std::uint32_t n = static_cast<std::uint32_t>(t.vertices.size());
    if (n > 12) throw std::invalid_argument("brute oracle capped at 12 vertices");
    build_view(t); // structural validation only

    std::vector<std::uint32_t> out_adj(n, 0);
    for (const auto& [gv, gw] : t.edges)
        out_adj[local_of(t.vertices, gv)] |= 1u << local_of(t.vertices, gw);

    // enumerate properly oriented paths with eligible endpoints, bucketed by
    // their lowest vertex
    std::vector<std::vector<std::uint32_t>> bucket(n);
    auto record = [&](std::uint32_t mask) {
        bucket[std::countr_zero(mask)].push_back(mask);
    };
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!t.start_ok[s]) continue;
        if (t.end_ok[s]) record(1u << s);
        // DFS forward from s; tree structure keeps paths simple
        std::vector<std::pair<std::uint32_t, std::uint32_t>> dfs{{s, 1u << s}};
        while (!dfs.empty()) {
            auto [v, mask] = dfs.back();
            dfs.pop_back();
            for (std::uint32_t rest = out_adj[v] & ~mask; rest; rest &= rest - 1) {
                std::uint32_t w = std::countr_zero(rest);
                std::uint32_t m2 = mask | (1u << w);
                if (t.end_ok[w]) record(m2);
                dfs.push_back({w, m2});
            }
        }
    }

    std::vector<std::uint32_t> best(std::size_t{1} << n, 0);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::uint32_t low = std::countr_zero(mask);
        std::uint32_t b = best[mask & (mask - 1)]; // leave `low` uncovered
        for (std::uint32_t pm : bucket[low])
            if ((pm & mask) == pm)
                b = std::max(b, std::popcount(pm) + best[mask ^ pm]);
        best[mask] = b;
    }
    return n - best[(std::size_t{1} << n) - 1];
}

void eligibility(OrientedTree& t, const ColoredDigraph& cd,
                 const std::vector<Vertex>& k1, const std::vector<Vertex>& v1,
                 EligibilityMode mode) {
    const std::size_t n = t.vertices.size();
    t.start_ok.assign(n, 0);
    t.end_ok.assign(n, 0);
    auto in_set = [](const std::vector<Vertex>& s, Vertex v) {
        return std::binary_search(s.begin(), s.end(), v);
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vertex v = t.vertices[i];
        if (mode == EligibilityMode::Upper) {
            auto admissible = [&](Vertex w) {
                return in_set(k1, w) && !in_set(t.vertices, w);
            };
            for (Vertex w : cd.blue_in.neighbors(v))
                if (admissible(w)) { t.start_ok[i] = 1; break; }
            if (!t.start_ok[i])
                for (Vertex w : cd.red_in.neighbors(v))
                    if (admissible(w)) { t.start_ok[i] = 1; break; }
            for (Vertex w : cd.red_out.neighbors(v))
                if (admissible(w)) { t.end_ok[i] = 1; break; }
            if (!t.end_ok[i])
                for (Vertex w : cd.blue_out.neighbors(v))
                    if (admissible(w)) { t.end_ok[i] = 1; break; }
        } else {
            for (Vertex w : cd.blue_in.neighbors(v))
                if (in_set(v1, w)) { t.start_ok[i] = 1; break; }
            for (Vertex w : cd.red_out.neighbors(v))
                if (in_set(v1, w)) { t.end_ok[i] = 1; break; }
        }
    }
}

OrientedTree oriented_tree_from_component(const GammaComponent& comp,
                                          const ColoredDigraph& cd,
                                          const std::vector<Vertex>& k1,
                                          const std::vector<Vertex>& v1,
                                          EligibilityMode mode) {
    if (!comp.is_tree)
        throw std::invalid_argument("component is not tree-shaped");
    OrientedTree t;
    t.vertices = comp.vertices;
    std::vector<Vertex> merged;
    for (Vertex v : t.vertices) {
        auto ro = cd.red_out.neighbors(v);
        auto bo = cd.blue_out.neighbors(v);
        merged.clear();
        std::set_union(ro.begin(), ro.end(), bo.begin(), bo.end(),
                       std::back_inserter(merged));
        for (Vertex w : merged)
            if (std::binary_search(t.vertices.begin(), t.vertices.end(), w))
                t.edges.emplace_back(v, w);
    }
    eligibility(t, cd, k1, v1, mode);
    return t;
}

void validate_packing(const OrientedTree& t, const PackingResult& r) {
    std::vector<std::uint8_t> covered(t.vertices.size(), 0);
    auto fail = [](const char* msg) { throw std::runtime_error(msg); };
    std::vector<Edge> edges(t.edges);
    std::sort(edges.begin(), edges.end());
    for (const auto& path : r.paths) {
        if (path.empty()) fail("empty path");
        for (std::size_t i = 0; i < path.size(); ++i) {
            std::uint32_t loc = local_of(t.vertices, path[i]);
            if (covered[loc]) fail("paths overlap");
            covered[loc] = 1;
            if (i + 1 < path.size() &&
                !std::binary_search(edges.begin(), edges.end(),
                                    Edge{path[i], path[i + 1]}))
                fail("path step is not a forward tree edge");
        }
        if (!t.start_ok[local_of(t.vertices, path.front())])
            fail("path start not eligible");
        if (!t.end_ok[local_of(t.vertices, path.back())])
            fail("path end not eligible");
    }
    std::size_t total = 0;
    for (auto c : covered) total += c;
    if (r.phi != t.vertices.size() - total)
        fail("phi does not match uncovered count");
}

} // namespace longcycle
