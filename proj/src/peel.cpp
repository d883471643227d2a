#include "longcycle/peel.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "longcycle/rng.hpp"

namespace longcycle {

namespace {

// count of csr-neighbors of v that are flagged in `mask`
std::uint32_t masked_count(const Csr& csr, Vertex v,
                           const std::vector<std::uint8_t>& mask) {
    std::uint32_t k = 0;
    for (Vertex w : csr.neighbors(v)) k += mask[w];
    return k;
}

} // namespace

PeelResult peel(const ColoredDigraph& cd, const std::vector<Vertex>& k1,
                std::uint64_t order_seed) {
    if (!std::is_sorted(k1.begin(), k1.end()) ||
        std::adjacent_find(k1.begin(), k1.end()) != k1.end())
        throw std::invalid_argument("k1 must be sorted and duplicate-free");
    if (!k1.empty() && k1.back() >= cd.n)
        throw std::invalid_argument("k1 vertex out of range");

    const Vertex n = cd.n;
    std::vector<std::uint8_t> in_k1(n, 0), in_s(n, 0), outside(n, 0);
    for (Vertex v : k1) { in_k1[v] = 1; outside[v] = 1; }

    // bcount[v]: blue in-neighbors of v in k1 \ S; rcount[v]: red out-neighbors
    std::vector<std::uint32_t> bcount(n, 0), rcount(n, 0);
    for (Vertex v : k1) {
        bcount[v] = masked_count(cd.blue_in, v, outside);
        rcount[v] = masked_count(cd.red_out, v, outside);
    }

    std::vector<Vertex> work(k1);
    if (order_seed != 0) {
        SplitMix64 rng(order_seed);
        rng.shuffle(work);
    }

    PeelResult res;
    res.k1 = k1;

    auto collect_outside = [&](const Csr& csr, Vertex v) {
        std::vector<Vertex> out;
        for (Vertex w : csr.neighbors(v))
            if (outside[w]) out.push_back(w);
        return out;
    };

    // moving u into S decrements the outside-counts it participated in
    auto absorb = [&](Vertex u) {
        in_s[u] = 1;
        outside[u] = 0;
        for (Vertex w : cd.blue_out.neighbors(u))
            if (in_k1[w]) { --bcount[w]; work.push_back(w); }
        for (Vertex w : cd.red_in.neighbors(u))
            if (in_k1[w]) { --rcount[w]; work.push_back(w); }
    };

    while (!work.empty()) {
        Vertex v = work.back();
        work.pop_back();
        char rule, side;
        if (in_s[v]) {
            if (bcount[v] >= 1 && bcount[v] <= 4) { rule = 'a'; side = 'b'; }
            else if (rcount[v] >= 1 && rcount[v] <= 4) { rule = 'a'; side = 'r'; }
            else continue;
        } else {
            if (bcount[v] <= 4) { rule = 'b'; side = 'b'; }
            else if (rcount[v] <= 4) { rule = 'b'; side = 'r'; }
            else continue;
        }
        PeelStep step;
        step.rule = rule;
        step.side = side;
        step.pivot = v;
        std::vector<Vertex> pulled =
            collect_outside(side == 'b' ? cd.blue_in : cd.red_out, v);
        if (rule == 'b') pulled.push_back(v);
        std::sort(pulled.begin(), pulled.end());
        step.added = pulled;
        for (Vertex u : pulled) absorb(u);
        work.push_back(v); // the other side may fire next
        res.trace.push_back(std::move(step));
    }

    for (Vertex v : k1)
        (in_s[v] ? res.s_l : res.v1).push_back(v);
    for (Vertex v : res.s_l)
        if (masked_count(cd.blue_in, v, outside) >= 1 &&
            masked_count(cd.red_out, v, outside) >= 1)
            res.v2.push_back(v);
    return res;
}

std::vector<GammaComponent> gamma_components(const PeelResult& pr,
                                             const ColoredDigraph& cd) {
    const std::vector<Vertex>& s = pr.s_l;
    const Vertex n = cd.n;
    std::vector<std::uint8_t> in_s(n, 0);
    for (Vertex v : s) in_s[v] = 1;

    // union-find over membership indices
    std::vector<Vertex> local(n, 0);
    for (std::size_t i = 0; i < s.size(); ++i) local[s[i]] = static_cast<Vertex>(i);
    std::vector<Vertex> dsu(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) dsu[i] = static_cast<Vertex>(i);
    auto find = [&](Vertex x) {
        while (dsu[x] != x) { dsu[x] = dsu[dsu[x]]; x = dsu[x]; }
        return x;
    };

    // per-vertex union out-neighbors inside S (red and blue merged)
    std::vector<std::uint64_t> directed(s.size(), 0);
    std::vector<std::uint64_t> undirected_deg(s.size(), 0);
    std::vector<Vertex> merged;
    for (std::size_t i = 0; i < s.size(); ++i) {
        Vertex v = s[i];
        auto ro = cd.red_out.neighbors(v);
        auto bo = cd.blue_out.neighbors(v);
        merged.clear();
        std::set_union(ro.begin(), ro.end(), bo.begin(), bo.end(),
                       std::back_inserter(merged));
        for (Vertex w : merged)
            if (in_s[w]) {
                ++directed[i];
                Vertex a = find(static_cast<Vertex>(i)), b = find(local[w]);
                if (a != b) dsu[a] = b;
            }
        // undirected degree: union in- and out-neighbors inside S
        auto ri = cd.red_in.neighbors(v);
        auto bi = cd.blue_in.neighbors(v);
        std::vector<Vertex> ins;
        std::set_union(ri.begin(), ri.end(), bi.begin(), bi.end(),
                       std::back_inserter(ins));
        std::vector<Vertex> all;
        std::set_union(merged.begin(), merged.end(), ins.begin(), ins.end(),
                       std::back_inserter(all));
        for (Vertex w : all)
            if (in_s[w]) ++undirected_deg[i];
    }

    std::vector<Vertex> root_of(s.size());
    std::vector<GammaComponent> comps;
    std::vector<Vertex> comp_id(s.size(), 0xFFFFFFFFu);
    for (std::size_t i = 0; i < s.size(); ++i) {
        Vertex r = find(static_cast<Vertex>(i));
        root_of[i] = r;
        if (comp_id[r] == 0xFFFFFFFFu) {
            comp_id[r] = static_cast<Vertex>(comps.size());
            comps.emplace_back();
        }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        GammaComponent& k = comps[comp_id[root_of[i]]];
        k.vertices.push_back(s[i]); // s sorted, so per-component stays sorted
        k.directed_edges += directed[i];
        k.underlying_edges += undirected_deg[i]; // halved below
    }
    for (auto& k : comps) {
        k.underlying_edges /= 2;
        k.is_tree = k.underlying_edges == k.vertices.size() - 1 &&
                    k.directed_edges == k.vertices.size() - 1;
    }
    for (const PeelStep& step : pr.trace) {
        // every pivot ends up in s_l
        Vertex i = local[step.pivot];
        comps[comp_id[root_of[i]]].pivot_steps++;
    }
    return comps;
}

DensityReport density_diagnostic(const std::vector<GammaComponent>& comps) {
    DensityReport rep;
    for (const auto& k : comps) {
        auto nv = static_cast<std::uint32_t>(k.vertices.size());
        rep.components.emplace_back(nv, k.directed_edges);
        if (2 * k.directed_edges >= 3ULL * nv) rep.all_sparse = false;
    }
    return rep;
}

std::string trace_to_jsonl(const PeelResult& pr) {
    std::ostringstream os;
    for (const PeelStep& s : pr.trace) {
        nlohmann::json j;
        j["case"] = std::string(1, s.rule);
        j["side"] = s.side == 'b' ? "blue_in" : "red_out";
        j["pivot"] = s.pivot;
        j["added"] = s.added;
        os << j.dump() << '\n';
    }
    return os.str();
}

} // namespace longcycle
