#include "longcycle/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace longcycle {

bool Csr::has(Vertex v, Vertex w) const {
    auto nb = neighbors(v);
    return std::binary_search(nb.begin(), nb.end(), w);
}

namespace {

Csr build_csr(Vertex n, const std::vector<Edge>& edges, bool by_head) {
    Csr c;
    c.off.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& [v, w] : edges) c.off[(by_head ? w : v) + 1]++;
    for (std::size_t i = 1; i < c.off.size(); ++i) c.off[i] += c.off[i - 1];
    c.adj.resize(edges.size());
    std::vector<std::uint64_t> cursor(c.off.begin(), c.off.end() - 1);
    for (const auto& [v, w] : edges) {
        Vertex key = by_head ? w : v;
        c.adj[cursor[key]++] = by_head ? v : w;
    }
    for (Vertex v = 0; v < n; ++v)
        std::sort(c.adj.begin() + static_cast<std::ptrdiff_t>(c.off[v]),
                  c.adj.begin() + static_cast<std::ptrdiff_t>(c.off[v + 1]));
    return c;
}

void normalize_edges(Vertex n, std::vector<Edge>& edges) {
    for (const auto& [v, w] : edges) {
        if (v >= n || w >= n) throw std::invalid_argument("edge endpoint out of range");
        if (v == w) throw std::invalid_argument("self-loop");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

} // namespace

Csr build_out_csr(Vertex n, const std::vector<Edge>& edges) {
    return build_csr(n, edges, false);
}

Csr build_in_csr(Vertex n, const std::vector<Edge>& edges) {
    return build_csr(n, edges, true);
}

Digraph Digraph::from_edges(Vertex n, std::vector<Edge> edges) {
    normalize_edges(n, edges);
    Digraph d;
    d.n = n;
    d.edges = std::move(edges);
    d.out = build_out_csr(n, d.edges);
    d.in = build_in_csr(n, d.edges);
    return d;
}

double ModelParams::q() const {
    // 1 - sqrt(1-p) computed as p / (1 + sqrt(1-p)) to avoid cancellation.
    double pp = p();
    return pp / (1.0 + std::sqrt(1.0 - pp));
}

void ModelParams::validate() const {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (!(p() < 1.0)) throw std::invalid_argument("c/n must be below 1");
}

ColoredDigraph ColoredDigraph::from_edges(Vertex n, std::vector<Edge> red,
                                          std::vector<Edge> blue) {
    normalize_edges(n, red);
    normalize_edges(n, blue);
    ColoredDigraph cd;
    cd.n = n;
    cd.red = std::move(red);
    cd.blue = std::move(blue);
    cd.red_out = build_out_csr(n, cd.red);
    cd.red_in = build_in_csr(n, cd.red);
    cd.blue_out = build_out_csr(n, cd.blue);
    cd.blue_in = build_in_csr(n, cd.blue);
    return cd;
}

Digraph ColoredDigraph::union_view() const {
    std::vector<Edge> merged;
    merged.reserve(red.size() + blue.size());
    std::merge(red.begin(), red.end(), blue.begin(), blue.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return Digraph::from_edges(n, std::move(merged));
}

namespace {

/// Bernoulli(q) subset of the n(n-1) ordered non-loop pairs via geometric
/// gaps. Pair index idx maps to v = idx/(n-1) and w = r + (r >= v) where
/// r = idx%(n-1), which enumerates pairs in lexicographic order, so the
/// resulting edge list is already sorted and duplicate-free.
std::vector<Edge> sample_edges(Vertex n, double q, SplitMix64& rng) {
    std::vector<Edge> edges;
    if (q <= 0.0) return edges;
    const std::uint64_t total =
        static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(n) - 1);
    const double log1mq = std::log1p(-q);
    std::uint64_t idx = 0;
    while (true) {
        double u = rng.next_double_pos();
        double gap = std::floor(std::log(u) / log1mq);
        if (gap >= static_cast<double>(total)) break; // avoids u64 overflow on cast
        idx += static_cast<std::uint64_t>(gap);
        if (idx >= total) break;
        Vertex v = static_cast<Vertex>(idx / (n - 1));
        Vertex r = static_cast<Vertex>(idx % (n - 1));
        Vertex w = r + (r >= v ? 1 : 0);
        edges.emplace_back(v, w);
        ++idx;
    }
    return edges;
}

} // namespace

ColoredDigraph sample_colored(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    double q = params.q();
    SplitMix64 red_rng(derive_seed(seed, 0x52)); // 'R'
    SplitMix64 blue_rng(derive_seed(seed, 0x42)); // 'B'
    auto red = sample_edges(params.n, q, red_rng);
    auto blue = sample_edges(params.n, q, blue_rng);
    return ColoredDigraph::from_edges(params.n, std::move(red), std::move(blue));
}

SccResult strong_components(const Digraph& d) {
    const Vertex n = d.n;
    constexpr Vertex kUnset = 0xFFFFFFFFu;
    SccResult res;
    res.comp.assign(n, kUnset);

    std::vector<Vertex> index(n, kUnset), low(n, 0);
    std::vector<Vertex> stack;         // Tarjan stack
    std::vector<std::uint8_t> on_stack(n, 0);
    // Explicit DFS frame: vertex + position within its out-list.
    struct Frame {
        Vertex v;
        std::uint64_t next_edge;
    };
    std::vector<Frame> frames;
    Vertex next_index = 0;

    for (Vertex root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        frames.push_back({root, d.out.off[root]});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next_edge < d.out.off[f.v + 1]) {
                Vertex w = d.out.adj[f.next_edge++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, d.out.off[w]});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                Vertex v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                if (low[v] == index[v]) {
                    std::uint32_t sz = 0;
                    while (true) {
                        Vertex w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        res.comp[w] = res.count;
                        ++sz;
                        if (w == v) break;
                    }
                    res.size.push_back(sz);
                    ++res.count;
                }
            }
        }
    }
    return res;
}

std::vector<Vertex> giant_component(const Digraph& d) {
    SccResult scc = strong_components(d);
    if (scc.count == 0) return {};
    // min vertex id per component; vertices scanned ascending so first hit wins
    std::vector<Vertex> min_vertex(scc.count, 0xFFFFFFFFu);
    for (Vertex v = 0; v < d.n; ++v)
        if (min_vertex[scc.comp[v]] == 0xFFFFFFFFu) min_vertex[scc.comp[v]] = v;
    Vertex best = 0;
    for (Vertex cidx = 1; cidx < scc.count; ++cidx) {
        if (scc.size[cidx] > scc.size[best] ||
            (scc.size[cidx] == scc.size[best] &&
             min_vertex[cidx] < min_vertex[best]))
            best = cidx;
    }
    std::vector<Vertex> out;
    out.reserve(scc.size[best]);
    for (Vertex v = 0; v < d.n; ++v)
        if (scc.comp[v] == best) out.push_back(v);
    return out;
}

std::vector<Vertex> color_neighbors(const ColoredDigraph& cd, Vertex v,
                                    ColorSide side,
                                    std::span<const Vertex> within) {
    const Csr& csr = (side == ColorSide::BlueIn) ? cd.blue_in : cd.red_out;
    auto nb = csr.neighbors(v);
    std::vector<Vertex> out;
    // adjacency lists are tiny next to within; probe instead of merging
    for (Vertex w : nb)
        if (std::binary_search(within.begin(), within.end(), w))
            out.push_back(w);
    return out;
}

std::string serialize(const ColoredDigraph& cd) {
    std::ostringstream os;
    os << cd.n << ' ' << cd.red.size() << ' ' << cd.blue.size() << '\n';
    for (const auto& [v, w] : cd.red) os << "R " << v << ' ' << w << '\n';
    for (const auto& [v, w] : cd.blue) os << "B " << v << ' ' << w << '\n';
    return os.str();
}

ColoredDigraph parse_colored(std::istream& is) {
    Vertex n;
    std::size_t m_red, m_blue;
    if (!(is >> n >> m_red >> m_blue))
        throw std::runtime_error("bad header");
    std::vector<Edge> red, blue;
    red.reserve(m_red);
    blue.reserve(m_blue);
    for (std::size_t i = 0; i < m_red + m_blue; ++i) {
        char tag;
        Vertex v, w;
        if (!(is >> tag >> v >> w)) throw std::runtime_error("truncated edge list");
        if (tag == 'R') red.emplace_back(v, w);
        else if (tag == 'B') blue.emplace_back(v, w);
        else throw std::runtime_error("bad edge tag");
    }
    if (red.size() != m_red || blue.size() != m_blue)
        throw std::runtime_error("edge counts disagree with header");
    return ColoredDigraph::from_edges(n, std::move(red), std::move(blue));
}

} // namespace longcycle
