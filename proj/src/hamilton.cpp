#include "longcycle/hamilton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#ifdef LC_BOOST_TRACE
#include <cstdio>
#endif
#include <set>
#include <string>
#include <unordered_map>
#include <utility>

namespace longcycle {

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// ---------------------------------------------------------------- phase 1

std::vector<std::vector<u32>> light_adjacency(const ContractedDigraph& d) {
    std::vector<std::vector<u32>> adj(d.n);
    for (u32 v = 0; v < d.n; ++v)
        for (unsigned s = 0; s < 3; ++s) adj[v].push_back(d.out_at(v, s));
    for (u32 w = 0; w < d.n; ++w)
        for (unsigned s = 0; s < 3; ++s) adj[d.in_at(w, s)].push_back(w);
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

// Hopcroft-Karp on the tail/head copies; returns tail -> head on success.
std::optional<std::vector<u32>> perfect_matching(
    const std::vector<std::vector<u32>>& adj) {
    const u32 n = static_cast<u32>(adj.size());
    const u32 kInf = kNoSucc;
    std::vector<u32> mt(n, kInf), mh(n, kInf), dist(n);
    std::vector<u32> queue;
    queue.reserve(n);

    auto bfs = [&] {
        queue.clear();
        for (u32 t = 0; t < n; ++t) {
            dist[t] = mt[t] == kInf ? 0 : kInf;
            if (dist[t] == 0) queue.push_back(t);
        }
        bool reachable = false;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            u32 t = queue[head];
            for (u32 h : adj[t]) {
                u32 t2 = mh[h];
                if (t2 == kInf) {
                    reachable = true;
                } else if (dist[t2] == kInf) {
                    dist[t2] = dist[t] + 1;
                    queue.push_back(t2);
                }
            }
        }
        return reachable;
    };
    auto dfs = [&](auto&& self, u32 t) -> bool {
        for (u32 h : adj[t]) {
            u32 t2 = mh[h];
            if (t2 == kInf || (dist[t2] == dist[t] + 1 && self(self, t2))) {
                mt[t] = h;
                mh[h] = t;
                return true;
            }
        }
        dist[t] = kInf;
        return false;
    };

    u32 matched = 0;
    while (bfs()) {
        for (u32 t = 0; t < n; ++t)
            if (mt[t] == kInf && dfs(dfs, t)) ++matched;
    }
    if (matched != n) return std::nullopt;
    return mt;
}

// ---------------------------------------------------------------- phase 2

// Forward arc of an original cycle, endpoints inclusive.
struct Arc {
    u32 cid, from, to;
};

// Cycle split off the path by a rotation; arcs wrap around.
struct Piece {
    std::vector<Arc> arcs;
    u32 size = 0;
};

struct OutNode {
    std::vector<Arc> segs;      // current path as arcs
    std::vector<Piece> pieces;  // split-off cycles along this branch
    std::vector<u32> absorbed;  // original cycle ids consumed by the path
    u32 end = 0;
    u32 path_len = 0; // vertices
    std::int32_t parent = -1;
    u32 rot_v = 0, rot_w = 0, rot_x = 0; // rotation producing this node
};

struct InNode {
    u32 start = 0;
    std::int32_t parent = -1;
    u32 rot_w = 0, rot_x = 0; // add (rot_w, parent start), delete (rot_w, rot_x)
};

struct Reverse4 {
    std::vector<std::vector<u32>> by_in4;  // v -> {w : in_4(w) == v}
    std::vector<std::vector<u32>> by_out4; // u -> {w : out_4(w) == u}
};

Reverse4 reverse_boost_slots(const ContractedDigraph& d) {
    Reverse4 r;
    r.by_in4.resize(d.n);
    r.by_out4.resize(d.n);
    for (u32 w = 0; w < d.n; ++w) {
        r.by_in4[d.in_at(w, 3)].push_back(w);
        r.by_out4[d.out_at(w, 3)].push_back(w);
    }
    return r;
}

// One boost iteration: remove the small cycle broken at (v0 -> u0).
struct BoostIteration {
    const ContractedDigraph& d;
    const PhaseParams& pm;
    EdgeLedger& led;
    const Reverse4& rev;
    const std::vector<u32>& succ0;
    const std::vector<std::vector<u32>>& cycles0;
    std::vector<u32> cyc_of, pos_of;
    u32 cid_c = 0, v0 = 0, u0 = 0;

    std::vector<OutNode> pool;
    std::vector<InNode> in_pool;

    BoostIteration(const ContractedDigraph& d_, const PhaseParams& pm_,
                   EdgeLedger& led_, const Reverse4& rev_,
                   const PermutationDigraph& pi, u32 break_vertex)
        : d(d_), pm(pm_), led(led_), rev(rev_), succ0(pi.succ),
          cycles0(pi.cycles) {
        cyc_of.resize(d.n);
        pos_of.resize(d.n);
        for (u32 c = 0; c < cycles0.size(); ++c)
            for (u32 i = 0; i < cycles0[c].size(); ++i) {
                cyc_of[cycles0[c][i]] = c;
                pos_of[cycles0[c][i]] = i;
            }
        v0 = break_vertex;
        u0 = succ0[v0];
        cid_c = cyc_of[v0];
    }

    u32 clen(u32 cid) const { return static_cast<u32>(cycles0[cid].size()); }
    u32 arc_len(const Arc& a) const {
        u32 L = clen(a.cid);
        return (a.to + L - a.from) % L + 1;
    }
    u32 arc_at(const Arc& a, u32 off) const {
        return cycles0[a.cid][(a.from + off) % clen(a.cid)];
    }
    u32 arc_last(const Arc& a) const { return cycles0[a.cid][a.to]; }

    struct Loc {
        int kind = -1;    // 0 path, 1 piece, 2 intact original cycle
        u32 path_pos = 0; // kind 0
        u32 pred = 0;     // vertex whose out-edge (pred, w) is removed
        u32 piece = 0;    // kind 1
    };

    bool arc_contains(const Arc& a, u32 w, u32& off) const {
        if (a.cid != cyc_of[w]) return false;
        u32 L = clen(a.cid);
        off = (pos_of[w] + L - a.from) % L;
        return off < arc_len(a);
    }

    Loc locate(const OutNode& nd, u32 w) const {
        Loc loc;
        u32 prefix = 0, off = 0;
        for (std::size_t i = 0; i < nd.segs.size(); ++i) {
            const Arc& a = nd.segs[i];
            if (arc_contains(a, w, off)) {
                loc.kind = 0;
                loc.path_pos = prefix + off;
                if (off > 0)
                    loc.pred = arc_at(a, off - 1);
                else if (i > 0)
                    loc.pred = arc_last(nd.segs[i - 1]);
                return loc;
            }
            prefix += arc_len(a);
        }
        for (u32 p = 0; p < nd.pieces.size(); ++p) {
            const Piece& pc = nd.pieces[p];
            for (std::size_t i = 0; i < pc.arcs.size(); ++i)
                if (arc_contains(pc.arcs[i], w, off)) {
                    loc.kind = 1;
                    loc.piece = p;
                    loc.pred = off > 0 ? arc_at(pc.arcs[i], off - 1)
                                       : arc_last(pc.arcs[(i + pc.arcs.size() - 1) %
                                                          pc.arcs.size()]);
                    return loc;
                }
        }
        u32 cid = cyc_of[w];
        // not on this branch's structures, so the original cycle is intact
        loc.kind = 2;
        loc.pred = cycles0[cid][(pos_of[w] + clen(cid) - 1) % clen(cid)];
        return loc;
    }

    // path truncated to its first `keep` vertices; remainder becomes a piece
    static void split_path(const std::vector<Arc>& segs, u32 keep,
                           const BoostIteration& it, std::vector<Arc>& head,
                           Piece& tail) {
        u32 prefix = 0;
        for (const Arc& a : segs) {
            u32 len = it.arc_len(a);
            if (prefix + len <= keep) {
                head.push_back(a);
            } else if (prefix >= keep) {
                tail.arcs.push_back(a);
            } else {
                u32 off = keep - prefix; // first off vertices stay
                u32 L = it.clen(a.cid);
                head.push_back({a.cid, a.from, (a.from + off - 1) % L});
                tail.arcs.push_back({a.cid, (a.from + off) % L, a.to});
            }
            prefix += len;
        }
        tail.size = prefix - keep;
    }

    // piece opened at w (ends at pred of w), appended to the path arcs
    void splice_piece(std::vector<Arc>& segs, const Piece& pc, u32 w) const {
        std::size_t j = 0;
        u32 off = 0;
        while (!arc_contains(pc.arcs[j], w, off)) ++j;
        const Arc& aj = pc.arcs[j];
        u32 L = clen(aj.cid);
        segs.push_back({aj.cid, (aj.from + off) % L, aj.to});
        for (std::size_t k = 1; k < pc.arcs.size(); ++k)
            segs.push_back(pc.arcs[(j + k) % pc.arcs.size()]);
        if (off > 0)
            segs.push_back({aj.cid, aj.from, (aj.from + off - 1) % L});
    }

    enum class Outcome { Rejected, Child, Closed, CapStop };

    // Conditioning-set rejection is what the asymptotic argument leans on;
    // at practical sizes it strangles the trees (W reaches a constant
    // fraction of the graph), so the relaxed mode records W without
    // rejecting on it and lets replay validation carry correctness.
    bool w_blocked(u32 a, u32 b) const {
        return pm.strict_edges && (led.in_w[a] || led.in_w[b]);
    }

    // examine D4 edge (end of pool[id], w); appends the child on acceptance
    Outcome examine_out(u32 id, u32 w, std::optional<PermutationDigraph>& done) {
        if (led.w_size + 2 > pm.w_cap) return Outcome::CapStop;
        u32 v = pool[id].end;
        Loc loc = locate(pool[id], w);
        Outcome res = Outcome::Rejected;
        if (loc.kind == 0 && loc.path_pos == 0) {
            // w is the path start: closing edge
            if (pool[id].path_len - 1 >= pm.n0) {
                done = replay(id, -1, u0);
                if (done) res = Outcome::Closed;
            }
        } else if (!w_blocked(w, loc.pred)) {
            const OutNode& par = pool[id];
            if (loc.kind == 0) {
                u32 new_cycle = par.path_len - loc.path_pos;
                u32 new_path_edges = loc.path_pos - 1;
                if (new_cycle >= pm.n0 && new_path_edges >= pm.n0) {
                    OutNode ch;
                    Piece tail;
                    split_path(par.segs, loc.path_pos, *this, ch.segs, tail);
                    ch.pieces = par.pieces;
                    ch.pieces.push_back(std::move(tail));
                    ch.absorbed = par.absorbed;
                    ch.end = loc.pred;
                    ch.path_len = loc.path_pos;
                    ch.parent = static_cast<std::int32_t>(id);
                    ch.rot_v = v;
                    ch.rot_w = w;
                    ch.rot_x = loc.pred;
                    pool.push_back(std::move(ch));
                    res = Outcome::Child;
                }
            } else {
                u32 grown = loc.kind == 1 ? pool[id].pieces[loc.piece].size
                                          : clen(cyc_of[w]);
                if (par.path_len + grown - 1 >= pm.n0) {
                    OutNode ch;
                    ch.segs = par.segs;
                    ch.pieces = par.pieces;
                    ch.absorbed = par.absorbed;
                    if (loc.kind == 1) {
                        splice_piece(ch.segs, ch.pieces[loc.piece], w);
                        ch.pieces.erase(ch.pieces.begin() + loc.piece);
                    } else {
                        u32 cid = cyc_of[w], L = clen(cid);
                        ch.segs.push_back(
                            {cid, pos_of[w], (pos_of[w] + L - 1) % L});
                        ch.absorbed.push_back(cid);
                    }
                    ch.end = loc.pred;
                    ch.path_len = par.path_len + grown;
                    ch.parent = static_cast<std::int32_t>(id);
                    ch.rot_v = v;
                    ch.rot_w = w;
                    ch.rot_x = loc.pred;
                    pool.push_back(std::move(ch));
                    res = Outcome::Child;
                }
            }
        }
        led.add_w(v);
        led.add_w(w);
        return res;
    }

    // replays rotations onto a fresh successor map and validates the result:
    // a bijection whose sub-n0 cycles are untouched originals other than C
    std::optional<PermutationDigraph> replay(u32 leaf, std::int32_t in_node,
                                             u32 close_start) {
        std::vector<u32> succ = succ0;
        succ[v0] = kNoSucc;
        std::vector<u32> chain;
        for (std::int32_t id = static_cast<std::int32_t>(leaf);
             pool[id].parent >= 0; id = pool[id].parent)
            chain.push_back(static_cast<u32>(id));
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const OutNode& nd = pool[*it];
            if (succ[nd.rot_x] != nd.rot_w) return std::nullopt;
            succ[nd.rot_v] = nd.rot_w;
            succ[nd.rot_x] = kNoSucc;
        }
        if (in_node >= 0) {
            chain.clear();
            for (std::int32_t id = in_node; in_pool[id].parent >= 0;
                 id = in_pool[id].parent)
                chain.push_back(static_cast<u32>(id));
            u32 cur = u0;
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                const InNode& nd = in_pool[*it];
                if (succ[nd.rot_w] != nd.rot_x) return std::nullopt;
                succ[nd.rot_w] = cur;
                cur = nd.rot_x;
            }
            if (cur != close_start) return std::nullopt;
        }
        u32 end = pool[leaf].end;
        if (succ[end] != kNoSucc) return std::nullopt;
        succ[end] = close_start;

        std::vector<u32> indeg(d.n, 0);
        for (u32 v = 0; v < d.n; ++v) {
            if (succ[v] >= d.n) return std::nullopt;
            if (++indeg[succ[v]] > 1) return std::nullopt;
        }
        PermutationDigraph out = PermutationDigraph::from_succ(std::move(succ));
        for (const auto& cyc : out.cycles) {
            if (cyc.size() >= pm.n0) continue;
            u32 id = cyc_of[cyc.front()];
            if (id == cid_c || cycles0[id].size() != cyc.size())
                return std::nullopt;
            for (u32 v : cyc)
                if (out.succ[v] != succ0[v]) return std::nullopt;
        }
        return out;
    }

    std::optional<PermutationDigraph> run() {
        OutNode root;
        u32 L = clen(cid_c);
        root.segs = {{cid_c, pos_of[u0], pos_of[v0]}};
        root.absorbed = {cid_c};
        root.end = v0;
        root.path_len = L;
        pool.push_back(std::move(root));

        std::optional<PermutationDigraph> done;
        std::vector<u32> level{0}, next;
        bool cap = false;
        for (u32 depth = 0; depth < pm.t2 && !cap; ++depth) {
            next.clear();
            for (int pass = 0; pass < 2 && next.size() < pm.nu && !cap; ++pass)
                for (u32 id : level) {
                    if (next.size() >= pm.nu || cap) break;
                    u32 v = pool[id].end;
                    std::size_t lo = pool.size();
                    if (pass == 0) {
                        Outcome oc = examine_out(id, d.out_at(v, 3), done);
                        if (oc == Outcome::Closed) return done;
                        if (oc == Outcome::CapStop)
                            cap = true;
                        else
                            led.out4_used[v] = 1;
                    } else {
                        for (u32 w : rev.by_in4[v]) {
                            if (next.size() + (pool.size() - lo) >= pm.nu) break;
                            Outcome oc = examine_out(id, w, done);
                            if (oc == Outcome::Closed) return done;
                            if (oc == Outcome::CapStop) {
                                cap = true;
                                break;
                            }
                            led.in4_used[w] = 1;
                        }
                    }
                    for (std::size_t k = lo; k < pool.size(); ++k)
                        next.push_back(static_cast<u32>(k));
                }
            if (next.empty()) break;
            level = next;
            if (level.size() >= pm.nu) break;
        }
#ifdef LC_BOOST_TRACE
        std::fprintf(stderr, "  out: pool=%zu leaves=%zu cap=%d\n", pool.size(),
                     level.size(), (int)cap);
#endif
        if (level.size() == 1 && level[0] == 0 && pool.size() == 1)
            return std::nullopt; // root never produced a child

        // shared in-tree: rotations at the path start are identical across
        // leaves because they only delete edges untouched by any rotation
        in_pool.push_back({u0, -1, 0, 0});
        std::vector<u32> in_level{0}, in_next;
        std::vector<u32> candidates; // in_pool ids with start in the base set
        std::set<u32> seen{u0};
        if (u0 < d.n_base) candidates.push_back(0);
        for (u32 depth = 0; depth < pm.t2 && !cap; ++depth) {
            if (candidates.size() >= pm.nu) break;
            in_next.clear();
            for (int pass = 0; pass < 2 && !cap; ++pass)
                for (u32 id : in_level) {
                    if (cap || candidates.size() >= pm.nu) break;
                    u32 u = in_pool[id].start;
                    auto try_edge = [&](u32 w) {
                        if (led.w_size + 2 > pm.w_cap) {
                            cap = true;
                            return false;
                        }
                        u32 x = succ0[w];
                        bool ok = !w_blocked(w, x);
                        led.add_w(w);
                        led.add_w(u);
                        if (ok && !seen.count(x)) {
                            seen.insert(x);
                            in_pool.push_back(
                                {x, static_cast<std::int32_t>(id), w, x});
                            u32 nid = static_cast<u32>(in_pool.size() - 1);
                            in_next.push_back(nid);
                            if (x < d.n_base) candidates.push_back(nid);
                        }
                        return true;
                    };
                    if (pass == 0) {
                        if (try_edge(d.in_at(u, 3))) led.in4_used[u] = 1;
                    } else {
                        for (u32 w : rev.by_out4[u]) {
                            if (cap || candidates.size() >= pm.nu) break;
                            if (try_edge(w)) led.out4_used[w] = 1;
                        }
                    }
                }
            if (in_next.empty()) break;
            in_level = in_next;
        }
#ifdef LC_BOOST_TRACE
        std::fprintf(stderr, "  in: pool=%zu cand=%zu cap=%d W=%llu\n",
                     in_pool.size(), candidates.size(), (int)cap,
                     (unsigned long long)led.w_size);
#endif
        if (candidates.empty()) return std::nullopt;

        // closure scan: leaf end v_i joined to a candidate start u by an
        // unconditioned boost slot, validated by replay
        std::unordered_map<u32, u32> start_node;
        std::unordered_map<u32, std::vector<u32>> by_start_in4;
        for (u32 nid : candidates) {
            u32 u = in_pool[nid].start;
            start_node.emplace(u, nid);
            by_start_in4[d.in_at(u, 3)].push_back(nid);
        }
        u32 budget = pm.closure_budget;
        u32 attempts = 0;
        for (u32 leaf : level) {
            if (!budget) break;
            u32 vi = pool[leaf].end;
            if (pm.closure_lookup != ClosureLookup::InFourOnly &&
                !(pm.strict_edges && led.in_w[vi])) {
                u32 u = d.out_at(vi, 3);
                auto it = start_node.find(u);
                if (it != start_node.end()) {
                    led.out4_used[vi] = 1;
                    led.add_w(vi);
                    led.add_w(u);
                    ++attempts;
                    auto res =
                        replay(leaf, static_cast<std::int32_t>(it->second), u);
                    if (res) return res;
                    if (!--budget) break;
                }
            }
            if (pm.closure_lookup != ClosureLookup::OutFourOnly) {
                auto it = by_start_in4.find(vi);
                if (it == by_start_in4.end()) continue;
                for (u32 nid : it->second) {
                    u32 u = in_pool[nid].start;
                    if (pm.strict_edges && led.in_w[u]) continue;
                    led.in4_used[u] = 1;
                    led.add_w(u);
                    led.add_w(vi);
                    ++attempts;
                    auto res = replay(leaf, static_cast<std::int32_t>(nid), u);
                    if (res) return res;
                    if (!--budget) break;
                }
            }
        }
#ifdef LC_BOOST_TRACE
        std::fprintf(stderr, "  closure: attempts=%u budget_left=%u\n",
                     attempts, budget);
#else
        (void)attempts;
#endif
        return std::nullopt;
    }
};

// ---------------------------------------------------------------- phase 3

// Reference to the choice-list slot that carries an edge (v, u): either
// out slot k of v or in slot k of u. side -1 means no open slot carries it.
struct Slot {
    std::int8_t side;
    std::uint8_t k;
    bool ok() const { return side >= 0; }
};

// Reassembly spends choice-list edges the successor map does not already
// use. Strict mode stays on the reserve slots the earlier phases never
// touch; relaxed mode may spend any still-unconsumed slot, since the final
// validation checks every successor edge against the choice lists anyway.
struct Availability {
    const ContractedDigraph& d;
    const PhaseParams& pm;
    EdgeLedger& led;
    std::vector<std::uint8_t> out_used, in_used;            // vertex-major n*5
    std::vector<std::vector<std::pair<u32, u32>>> rev_in;   // v -> (u, k)

    Availability(const ContractedDigraph& d_, const PhaseParams& pm_,
                 EdgeLedger& led_)
        : d(d_), pm(pm_), led(led_), out_used(d_.n * 5, 0),
          in_used(d_.n * 5, 0), rev_in(d_.n) {
        for (u32 u = 0; u < d.n; ++u) {
            out_used[u * 5 + 3] = led.out4_used[u];
            in_used[u * 5 + 3] = led.in4_used[u];
            for (u32 k = 0; k < 5; ++k)
                rev_in[d.in_at(u, k)].push_back({u, k});
        }
    }

    bool slot_open(int side, u32 vtx, u32 k) const {
        if (pm.strict_edges && k != 4) return false;
        return !(side == 0 ? out_used : in_used)[vtx * 5 + k];
    }
    Slot probe(u32 v, u32 u) const {
        for (u32 k = 5; k-- > 0;) {  // reserve first, light slots last
            if (d.out_at(v, k) == u && slot_open(0, v, k))
                return {0, static_cast<std::uint8_t>(k)};
            if (d.in_at(u, k) == v && slot_open(1, u, k))
                return {1, static_cast<std::uint8_t>(k)};
        }
        return {-1, 0};
    }
    void consume(u32 v, u32 u, Slot s) {
        if (!s.ok()) return;
        if (s.side == 0) {
            out_used[v * 5 + s.k] = 1;
            if (s.k == 3) led.out4_used[v] = 1;
        } else {
            in_used[u * 5 + s.k] = 1;
            if (s.k == 3) led.in4_used[u] = 1;
        }
    }
    // candidate heads u for an added edge (v, u), deterministic order
    void candidates(u32 v, std::vector<u32>& out) const {
        out.clear();
        for (u32 k = 5; k-- > 0;)
            if (slot_open(0, v, k)) out.push_back(d.out_at(v, k));
        for (auto [u, k] : rev_in[v])
            if (slot_open(1, u, k)) out.push_back(u);
    }
};

bool merge_cycles_once(PermutationDigraph& cur, Availability& av,
                       PhaseStats* stats) {
    std::vector<u32> pred(cur.succ.size());
    for (u32 v = 0; v < cur.succ.size(); ++v) pred[cur.succ[v]] = v;
    std::vector<u32> cyc_of(cur.succ.size());
    for (u32 c = 0; c < cur.cycles.size(); ++c)
        for (u32 v : cur.cycles[c]) cyc_of[v] = c;

    std::vector<u32> order(cur.cycles.size());
    for (u32 c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](u32 a, u32 b) {
        return std::make_pair(cur.cycles[a].size(), cur.cycles[a][0]) <
               std::make_pair(cur.cycles[b].size(), cur.cycles[b][0]);
    });

    std::vector<u32> heads;
    for (u32 ci : order)
        for (u32 v : cur.cycles[ci]) {
            av.candidates(v, heads);
            for (u32 u : heads) {
                if (cyc_of[u] == ci) continue;
                u32 w = pred[u], x = cur.succ[v];
                Slot s1 = av.probe(v, u);
                Slot s2 = av.probe(w, x);
                if (!s1.ok() || !s2.ok()) continue;
                av.consume(v, u, s1);
                av.consume(w, x, s2);
                std::vector<u32> succ = cur.succ;
                succ[v] = u;
                succ[w] = x;
                cur = PermutationDigraph::from_succ(std::move(succ));
                if (stats) ++stats->reassembly_merges;
                return true;
            }
        }
    return false;
}

// Section reassembly: break each cycle at sampled base vertices, then
// search for a cyclic rejoin pattern over available slots.
std::optional<PermutationDigraph> section_reassembly(
    const PermutationDigraph& cur, const ContractedDigraph& d,
    const PhaseParams& pm, Availability& av, SplitMix64& rng) {
    const u32 n = static_cast<u32>(cur.succ.size());
    double a = static_cast<double>(n) / std::log(static_cast<double>(n));

    std::vector<u32> ends;    // v_j per section, grouped by cycle
    std::vector<u32> starts;  // start vertex of the section ending at v_j
    std::vector<u32> phi_prev; // section index ending just before this start
    for (const auto& cyc : cur.cycles) {
        std::vector<u32> base_pos;
        for (u32 i = 0; i < cyc.size(); ++i)
            if (cyc[i] < d.n_base) base_pos.push_back(i);
        if (base_pos.empty()) return std::nullopt;
        u32 c_i = static_cast<u32>(base_pos.size());
        u32 m_i = section_break_count(c_i, a);
        for (u32 i = 0; i < m_i; ++i) {
            u32 j = i + static_cast<u32>(rng.next_below(base_pos.size() - i));
            std::swap(base_pos[i], base_pos[j]);
        }
        base_pos.resize(m_i);
        std::sort(base_pos.begin(), base_pos.end());
        u32 first = static_cast<u32>(ends.size());
        for (u32 k = 0; k < m_i; ++k) {
            ends.push_back(cyc[base_pos[k]]);
            u32 prev = base_pos[(k + m_i - 1) % m_i];
            starts.push_back(cur.succ[cyc[prev]]);
            phi_prev.push_back(first + (k + m_i - 1) % m_i);
        }
    }
    const u32 m = static_cast<u32>(ends.size());
    if (m < 2) return std::nullopt;

    std::vector<std::vector<u32>> join(m); // i -> sections reachable from v_i
    for (u32 i = 0; i < m; ++i)
        for (u32 j = 0; j < m; ++j)
            if (i != j && av.probe(ends[i], starts[j]).ok())
                join[i].push_back(j);

    std::vector<u32> order{0};
    std::vector<std::uint8_t> used(m, 0);
    used[0] = 1;
    std::vector<u32> rho(m);
    auto phi_rho_cyclic = [&] {
        for (u32 k = 0; k + 1 < m; ++k) rho[order[k]] = order[k + 1];
        rho[order[m - 1]] = order[0];
        u32 at = 0, steps = 0;
        do {
            at = rho[phi_prev[at]]; // lambda = phi o rho, section indices
            ++steps;
        } while (at != 0 && steps <= m);
        return steps == m;
    };
    auto dfs = [&](auto&& self) -> bool {
        if (order.size() == m) {
            for (u32 j : join[order.back()])
                if (j == 0 && phi_rho_cyclic()) return true;
            return false;
        }
        for (u32 j : join[order.back()]) {
            if (used[j]) continue;
            used[j] = 1;
            order.push_back(j);
            if (self(self)) return true;
            order.pop_back();
            used[j] = 0;
        }
        return false;
    };
    if (!dfs(dfs)) return std::nullopt;

    std::vector<u32> succ = cur.succ;
    for (u32 k = 0; k < m; ++k) {
        u32 i = order[k], j = order[(k + 1) % m];
        av.consume(ends[i], starts[j], av.probe(ends[i], starts[j]));
        succ[ends[i]] = starts[j];
    }
    PermutationDigraph out = PermutationDigraph::from_succ(std::move(succ));
    if (out.cycles.size() != 1) return std::nullopt;
    return out;
}

} // namespace

// ------------------------------------------------------------ basic types

PermutationDigraph PermutationDigraph::from_succ(std::vector<u32> s) {
    const u32 n = static_cast<u32>(s.size());
    std::vector<u32> indeg(n, 0);
    for (u32 v = 0; v < n; ++v) {
        if (s[v] >= n)
            throw std::invalid_argument("successor out of range");
        if (++indeg[s[v]] > 1)
            throw std::invalid_argument("successor map is not a bijection");
    }
    PermutationDigraph pd;
    pd.succ = std::move(s);
    std::vector<std::uint8_t> done(n, 0);
    for (u32 v = 0; v < n; ++v) {
        if (done[v]) continue;
        std::vector<u32> cyc;
        for (u32 w = v; !done[w]; w = pd.succ[w]) {
            done[w] = 1;
            cyc.push_back(w);
        }
        pd.cycles.push_back(std::move(cyc));
    }
    return pd;
}

std::size_t PermutationDigraph::min_cycle() const {
    std::size_t m = succ.size();
    for (const auto& c : cycles) m = std::min(m, c.size());
    return m;
}

Npd Npd::from_break(const PermutationDigraph& pi, u32 v0) {
    if (v0 >= pi.succ.size())
        throw std::invalid_argument("break vertex out of range");
    Npd npd;
    npd.succ = pi.succ;
    npd.start = npd.succ[v0];
    npd.end = v0;
    npd.succ[v0] = kNoSucc;
    return npd;
}

void Npd::validate() const {
    const u32 n = static_cast<u32>(succ.size());
    if (start >= n || end >= n || succ[end] != kNoSucc)
        throw std::invalid_argument("path endpoints inconsistent");
    std::vector<u32> indeg(n, 0);
    for (u32 v = 0; v < n; ++v) {
        if (v == end) continue;
        if (succ[v] >= n) throw std::invalid_argument("successor out of range");
        ++indeg[succ[v]];
    }
    if (indeg[start] != 0)
        throw std::invalid_argument("path start has a predecessor");
    for (u32 v = 0; v < n; ++v)
        if (v != start && indeg[v] != 1)
            throw std::invalid_argument("cover is not vertex-disjoint");
    u32 at = start, steps = 0;
    while (succ[at] != kNoSucc && steps++ <= n) at = succ[at];
    if (at != end) throw std::invalid_argument("path does not reach its end");
}

void PhaseParams::validate(u32 n) const {
    if (n0 < 2 || nu < 1 || t2 < 1 || w_cap < 2)
        throw std::invalid_argument("phase parameters out of range");
    if (strict_edges &&
        static_cast<double>(w_cap) >
            std::ceil(std::pow(static_cast<double>(n), 0.75)))
        throw std::invalid_argument("conditioning cap too large for strict mode");
}

PhaseParams PhaseParams::desk(u32 n) {
    if (n < 2) throw std::invalid_argument("need at least 2 vertices");
    double ln = std::log(static_cast<double>(n));
    u32 rounded = std::max<u32>(1, static_cast<u32>(std::ceil(ln)));
    PhaseParams p;
    p.n0 = std::max<u32>(2, (n + rounded - 1) / rounded);
    p.nu = std::max<u32>(1, static_cast<u32>(std::ceil(std::sqrt(n * ln))));
    p.t2 = static_cast<u32>(std::ceil(std::log(static_cast<double>(p.nu)) /
                                      std::log(1.9))) +
           10;
    p.w_cap = std::max<u64>(
        static_cast<u64>(std::ceil(std::pow(static_cast<double>(n), 0.75))),
        u64{40} * p.nu);
    return p;
}

PhaseParams PhaseParams::asymptotic(u32 n) {
    if (n < 3) throw std::invalid_argument("need at least 3 vertices");
    double ln = std::log(static_cast<double>(n));
    PhaseParams p;
    p.n0 = std::max<u32>(2, static_cast<u32>(std::ceil(200.0 * n / ln)));
    p.nu = std::max<u32>(1, static_cast<u32>(std::ceil(std::sqrt(n * ln))));
    p.t2 = static_cast<u32>(std::ceil(std::log(static_cast<double>(p.nu)) /
                                          std::log(1.9) +
                                      1000.0 * std::log(ln)));
    p.w_cap = static_cast<u64>(std::pow(static_cast<double>(n), 0.75));
    p.strict_edges = true;
    return p;
}

void EdgeLedger::init(u32 n) {
    out4_used.assign(n, 0);
    in4_used.assign(n, 0);
    in_w.assign(n, 0);
    w_size = w_peak = 0;
}

void EdgeLedger::add_w(u32 v) {
    if (in_w[v]) return;
    in_w[v] = 1;
    if (++w_size > w_peak) w_peak = w_size;
}

void EdgeLedger::clear_w() {
    std::fill(in_w.begin(), in_w.end(), 0);
    w_size = 0;
}

// ---------------------------------------------------------------- phases

std::optional<PermutationDigraph> phase1_matching(ContractedDigraph& d,
                                                  const PhaseParams& params,
                                                  u64 seed, PhaseStats* stats) {
    Timer tm;
    std::optional<PermutationDigraph> result;
    for (u32 attempt = 0; attempt <= params.resplit_budget; ++attempt) {
        if (attempt > 0) {
            resplit_roles(d, derive_seed(seed, attempt));
            if (stats) ++stats->resplits;
        }
        auto mt = perfect_matching(light_adjacency(d));
        if (mt) {
            result = PermutationDigraph::from_succ(std::move(*mt));
            break;
        }
    }
    if (stats) {
        stats->phase1_ok = result.has_value();
        stats->ms_phase1 = tm.ms();
    }
    return result;
}

std::optional<PermutationDigraph> phase2_boost(const PermutationDigraph& pi,
                                               const ContractedDigraph& d,
                                               const PhaseParams& params,
                                               EdgeLedger& ledger,
                                               PhaseStats* stats) {
    Timer tm;
    auto finish = [&](std::optional<PermutationDigraph> r) {
        if (stats) {
            stats->phase2_ok = r.has_value();
            stats->ms_phase2 = tm.ms();
            stats->w_peak = ledger.w_peak;
        }
        return r;
    };
    PermutationDigraph cur = pi;
    if (cur.cycles.size() <= 1) return finish(std::move(cur));

    Reverse4 rev = reverse_boost_slots(d);
    std::set<std::pair<u32, u32>> failed; // (min vertex, length) signatures
    for (;;) {
        std::vector<u32> smalls;
        for (u32 c = 0; c < cur.cycles.size(); ++c)
            if (cur.cycles[c].size() < params.n0) smalls.push_back(c);
        if (smalls.empty()) return finish(std::move(cur));
        if (cur.cycles.size() == 1) return finish(std::move(cur));
        std::sort(smalls.begin(), smalls.end(), [&](u32 a, u32 b) {
            return std::make_pair(cur.cycles[a].size(), cur.cycles[a][0]) <
                   std::make_pair(cur.cycles[b].size(), cur.cycles[b][0]);
        });
        std::int64_t pick = -1;
        for (u32 c : smalls)
            if (!failed.count({cur.cycles[c][0],
                               static_cast<u32>(cur.cycles[c].size())})) {
                pick = c;
                break;
            }
        if (pick < 0) return finish(std::nullopt);

        const auto& cyc = cur.cycles[static_cast<u32>(pick)];
        u32 tries = cyc.size() >= 4 ? 2 : 1;
        bool removed = false;
        for (u32 t = 0; t < tries && !removed; ++t) {
            if (!params.strict_edges) ledger.clear_w();
            u32 break_vertex = cyc[t == 0 ? 0 : cyc.size() / 2];
#ifdef LC_BOOST_TRACE
            std::fprintf(stderr, "iter: cycle min=%u len=%zu try=%u\n", cyc[0],
                         cyc.size(), t);
#endif
            BoostIteration it(d, params, ledger, rev, cur, break_vertex);
            if (auto next = it.run()) {
                cur = std::move(*next);
                removed = true;
                failed.clear();
                if (stats) ++stats->boost_iterations;
            }
        }
        if (!removed)
            failed.insert({cyc[0], static_cast<u32>(cyc.size())});
    }
}

std::optional<PermutationDigraph> phase3_reassemble(const PermutationDigraph& pi,
                                                    const ContractedDigraph& d,
                                                    const PhaseParams& params,
                                                    u64 seed, EdgeLedger& ledger,
                                                    PhaseStats* stats) {
    Timer tm;
    auto finish = [&](std::optional<PermutationDigraph> r) {
        if (stats) {
            stats->phase3_ok = r.has_value();
            stats->ms_phase3 = tm.ms();
        }
        return r;
    };
    PermutationDigraph cur = pi;
    if (cur.cycles.size() <= 1) return finish(std::move(cur));

    Availability av(d, params, ledger);
    SplitMix64 rng(derive_seed(seed, 0x33));
    auto merge_all = [&] {
        while (cur.cycles.size() >= 2)
            if (!merge_cycles_once(cur, av, stats)) break;
        return cur.cycles.size() == 1;
    };
    auto sections_all = [&] {
        for (u32 att = 0; att < params.reassembly_budget; ++att) {
            if (cur.cycles.size() == 1) return true;
            if (auto res = section_reassembly(cur, d, params, av, rng)) {
                cur = std::move(*res);
                return true;
            }
        }
        return cur.cycles.size() == 1;
    };
    bool ok = params.strict_edges ? (sections_all() || merge_all())
                                        : (merge_all() || sections_all());
    if (!ok) return finish(std::nullopt);
    return finish(std::move(cur));
}

std::optional<std::vector<u32>> hamilton_cycle_dstar(ContractedDigraph& d,
                                                     const PhaseParams& params,
                                                     u64 seed,
                                                     PhaseStats* stats) {
    params.validate(d.n);
    if (d.n < 2) return std::nullopt;
    auto p1 = phase1_matching(d, params, seed, stats);
    if (!p1) return std::nullopt;
    EdgeLedger ledger;
    ledger.init(d.n);
    auto p2 = phase2_boost(*p1, d, params, ledger, stats);
    if (!p2) return std::nullopt;
    auto p3 = phase3_reassemble(*p2, d, params, seed, ledger, stats);
    if (!p3) return std::nullopt;
    std::vector<u32> cycle;
    cycle.reserve(d.n);
    u32 at = 0;
    do {
        cycle.push_back(at);
        at = p3->succ[at];
    } while (at != 0);
    if (cycle.size() != d.n) return std::nullopt;
    return cycle;
}

std::vector<Vertex> uncontract_and_verify(const std::vector<u32>& cycle,
                                          const ContractedDigraph& d,
                                          const ColoredDigraph& cd) {
    if (cycle.size() != d.n || d.n < 2)
        throw VerificationFailed("cycle must visit every contracted vertex");
    std::vector<std::uint8_t> seen(d.n, 0);
    for (u32 v : cycle) {
        if (v >= d.n || seen[v])
            throw VerificationFailed("contracted cycle is not a permutation");
        seen[v] = 1;
    }
    std::vector<Vertex> out;
    for (u32 v : cycle) {
        if (v < d.n_base) {
            out.push_back(d.v1[v]);
        } else {
            const auto& path = d.super_paths[v - d.n_base];
            out.insert(out.end(), path.begin(), path.end());
        }
    }
    Digraph uni = cd.union_view();
    std::vector<std::uint8_t> used(cd.n, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        Vertex a = out[i], b = out[(i + 1) % out.size()];
        if (a >= cd.n || used[a])
            throw VerificationFailed("expanded cycle repeats vertex " +
                                     std::to_string(a));
        used[a] = 1;
        if (!uni.has_edge(a, b))
            throw VerificationFailed("missing edge " + std::to_string(a) +
                                     " -> " + std::to_string(b));
    }
    return out;
}

HamiltonOutcome find_long_cycle(const ColoredDigraph& cd, const PeelResult& pr,
                                const std::vector<GammaComponent>& comps,
                                const PhaseParams& params, u64 seed) {
    HamiltonOutcome out;
    std::vector<PackingResult> packings;
    std::uint64_t covered = 0;
    for (const GammaComponent& comp : comps) {
        if (!comp.is_tree) continue;
        OrientedTree t = oriented_tree_from_component(comp, cd, pr.k1, pr.v1,
                                                      EligibilityMode::Lower);
        PackingResult r = phi_dp(t);
        r.mode = EligibilityMode::Lower;
        out.sum_phi_lower += r.phi;
        covered += comp.vertices.size() - r.phi;
        packings.push_back(std::move(r));
    }
    out.v_star_size = static_cast<u32>(pr.v1.size() + covered);
    if (out.v_star_size < 2 || pr.v1.empty()) return out;

    for (u32 attempt = 0; attempt <= params.restart_budget; ++attempt) {
        ContractedDigraph dstar =
            contract(pr, packings, cd, derive_seed(seed, 0x1000 + attempt));
        PhaseStats st{};
        auto cyc = hamilton_cycle_dstar(dstar, params,
                                        derive_seed(seed, 0x2000 + attempt), &st);
        out.stats = st;
        out.restarts = attempt;
        if (cyc) {
            out.cycle = uncontract_and_verify(*cyc, dstar, cd);
            if (out.cycle.size() != out.v_star_size)
                throw VerificationFailed(
                    "cycle length disagrees with the packing arithmetic");
            out.success = true;
            return out;
        }
    }
    return out;
}

} // namespace longcycle
