#include "longcycle/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace longcycle {

namespace {

// log f_1(lambda) = lambda + log(1 - e^{-lambda}); stable for all lambda > 0
double log_f1(double lambda) {
    return lambda + std::log1p(-std::exp(-lambda));
}

// Bisection to ~1e-13 bracket width, then Newton polish.
template <typename F, typename DF>
double solve_increasing(F f, DF df, double lo, double hi) {
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        double d = df(x);
        if (d == 0.0) break;
        double step = f(x) / d;
        double nx = x - step;
        if (nx <= lo || nx >= hi) break;
        x = nx;
    }
    return x;
}

} // namespace

double solve_x(double c) {
    if (!(c > 1.0)) throw std::domain_error("solve_x requires c > 1");
    const double target = c * std::exp(-c);
    // x e^{-x} is strictly increasing on (0,1); target lies in (0, 1/e)
    auto f = [&](double x) { return x * std::exp(-x) - target; };
    auto df = [](double x) { return (1.0 - x) * std::exp(-x); };
    return solve_increasing(f, df, 0.0, 1.0);
}

double k1_fraction(double c) {
    double x = solve_x(c);
    double r = 1.0 - x / c;
    return r * r;
}

double corollary_bound(double c) {
    return 1.0 - 2.0 * std::exp(-c) - (c * c + 2.0 * c) * std::exp(-2.0 * c);
}

double phi_density_prediction(double c) {
    return c * c * std::exp(-2.0 * c);
}

double f_k(int k, double lambda) {
    if (k < 0 || lambda < 0.0) throw std::domain_error("f_k requires k >= 0, lambda >= 0");
    if (k == 0) return std::exp(lambda);
    // tail series sum_{i>=k} lambda^i / i!
    double term = 1.0;
    for (int i = 1; i <= k; ++i) term *= lambda / i;
    double sum = 0.0;
    int i = k;
    while (term > 0.0) {
        sum += term;
        ++i;
        term *= lambda / i;
        if (term < sum * 1e-18) { sum += term; break; }
    }
    return sum;
}

double solve_lambda(double ratio) {
    if (!(ratio > 1.0)) throw std::domain_error("solve_lambda requires ratio > 1");
    // h(l) = l / (1 - e^{-l}) is 1 at 0+ and increasing, h(l) > l
    auto h = [](double l) { return l / -std::expm1(-l); };
    auto f = [&](double l) { return h(l) - ratio; };
    auto df = [](double l) {
        double em = std::exp(-l);
        double den = -std::expm1(-l);
        return (den - l * em) / (den * den);
    };
    return solve_increasing(f, df, 1e-12, ratio + 1.0);
}

TruncatedPoisson::TruncatedPoisson(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("rate must be positive");
    const double log_norm = log_f1(lambda);
    double cum = 0.0;
    std::uint32_t t = 1;
    while (true) {
        double p = std::exp(static_cast<double>(t) * std::log(lambda) -
                            std::lgamma(static_cast<double>(t) + 1.0) - log_norm);
        cum += p;
        cdf_.push_back(cum);
        if (1.0 - cum < 1e-15 || t > 50 + static_cast<std::uint32_t>(10.0 * lambda))
            break;
        ++t;
    }
    cdf_.back() = 1.0; // absorb the negligible tail so sampling never overruns
}

double TruncatedPoisson::pmf(std::uint32_t t) const {
    if (t == 0) return 0.0;
    return std::exp(static_cast<double>(t) * std::log(lambda_) -
                    std::lgamma(static_cast<double>(t) + 1.0) - log_f1(lambda_));
}

double TruncatedPoisson::mean() const { return lambda_ / -std::expm1(-lambda_); }

std::uint32_t TruncatedPoisson::sample(SplitMix64& rng) const {
    double u = rng.next_double();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(it - cdf_.begin()) + 1;
}

namespace {

std::vector<std::uint32_t> conditioned_sequence(Vertex n, std::uint64_t m,
                                                const TruncatedPoisson& tp,
                                                SplitMix64& rng,
                                                std::uint32_t budget,
                                                std::uint32_t& rounds,
                                                bool& repaired) {
    std::vector<std::uint32_t> seq(n);
    std::uint64_t sum = 0;
    for (rounds = 1; rounds <= budget; ++rounds) {
        sum = 0;
        for (auto& d : seq) {
            d = tp.sample(rng);
            sum += d;
        }
        if (sum == m) return seq;
    }
    // Repair: re-draw single entries, keeping draws that move the sum toward
    // m. Biases roughly |sum - m| entries out of n, noted via the flag.
    repaired = true;
    std::uint64_t guard = 1000ULL * n;
    while (sum != m && guard-- > 0) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(n));
        std::uint32_t fresh = tp.sample(rng);
        std::uint64_t cand = sum - seq[j] + fresh;
        auto dist = [&](std::uint64_t s) { return s > m ? s - m : m - s; };
        if (dist(cand) < dist(sum)) {
            sum = cand;
            seq[j] = fresh;
        }
    }
    if (sum != m) throw std::runtime_error("degree-sequence repair stalled");
    return seq;
}

} // namespace

DegreeSequences sample_degree_sequences(Vertex n, std::uint64_t m,
                                        std::uint64_t seed,
                                        std::uint32_t rejection_budget) {
    if (n == 0 || m <= n)
        throw std::domain_error("need m/n > 1 so every vertex gets degree >= 1");
    double lambda = solve_lambda(static_cast<double>(m) / static_cast<double>(n));
    TruncatedPoisson tp(lambda);
    SplitMix64 in_rng(derive_seed(seed, 0x49));  // 'I'
    SplitMix64 out_rng(derive_seed(seed, 0x4F)); // 'O'
    DegreeSequences ds;
    ds.in_deg = conditioned_sequence(n, m, tp, in_rng, rejection_budget,
                                     ds.rounds_in, ds.repaired);
    ds.out_deg = conditioned_sequence(n, m, tp, out_rng, rejection_budget,
                                      ds.rounds_out, ds.repaired);
    return ds;
}

PseudoDigraph build_pseudo_digraph(const std::vector<std::uint32_t>& in_deg,
                                   const std::vector<std::uint32_t>& out_deg,
                                   std::uint64_t seed) {
    if (in_deg.size() != out_deg.size())
        throw std::invalid_argument("sequence lengths differ");
    std::uint64_t m_in = 0, m_out = 0;
    for (auto d : in_deg) m_in += d;
    for (auto d : out_deg) m_out += d;
    if (m_in != m_out) throw std::invalid_argument("stub counts differ");

    Vertex n = static_cast<Vertex>(in_deg.size());
    std::vector<Vertex> in_stubs;
    in_stubs.reserve(m_in);
    for (Vertex v = 0; v < n; ++v)
        for (std::uint32_t i = 0; i < in_deg[v]; ++i) in_stubs.push_back(v);

    SplitMix64 rng(derive_seed(seed, 0x50)); // 'P'
    rng.shuffle(in_stubs);

    PseudoDigraph pd;
    pd.n = n;
    pd.edges.reserve(m_in);
    std::size_t pos = 0;
    for (Vertex v = 0; v < n; ++v)
        for (std::uint32_t i = 0; i < out_deg[v]; ++i)
            pd.edges.emplace_back(v, in_stubs[pos++]);
    std::sort(pd.edges.begin(), pd.edges.end());

    pd.simple = true;
    for (std::size_t i = 0; i < pd.edges.size(); ++i) {
        if (pd.edges[i].first == pd.edges[i].second ||
            (i > 0 && pd.edges[i] == pd.edges[i - 1])) {
            pd.simple = false;
            break;
        }
    }
    return pd;
}

Digraph build_simple_digraph(const std::vector<std::uint32_t>& in_deg,
                             const std::vector<std::uint32_t>& out_deg,
                             std::uint64_t seed, std::uint32_t budget) {
    for (std::uint32_t attempt = 0; attempt < budget; ++attempt) {
        PseudoDigraph pd =
            build_pseudo_digraph(in_deg, out_deg, derive_seed(seed, attempt));
        if (pd.simple)
            return Digraph::from_edges(pd.n, std::move(pd.edges));
    }
    throw std::runtime_error("no simple pairing within budget");
}

RootedTreeShape star_shape(std::uint32_t a, std::uint32_t b) {
    RootedTreeShape s;
    s.parent.assign(1 + a + b, 0);
    s.toward_root.assign(1 + a + b, 0);
    for (std::uint32_t i = 1; i <= a; ++i) s.toward_root[i] = 1;
    return s;
}

namespace {

struct ShapeView {
    std::vector<std::vector<Vertex>> children;
    const RootedTreeShape* shape;
};

ShapeView make_view(const RootedTreeShape& shape) {
    ShapeView view;
    view.shape = &shape;
    view.children.resize(shape.size());
    for (Vertex v = 1; v < shape.size(); ++v) {
        if (shape.parent[v] >= v) throw std::invalid_argument("parent must precede child");
        view.children[shape.parent[v]].push_back(v);
    }
    return view;
}

// code(v) = '(' + concatenation of tagged child codes, sorted + ')'; the tag
// records the edge direction relative to the parent.
std::string code_of(const ShapeView& view, Vertex v, std::uint64_t& aut) {
    std::vector<std::string> kid_codes;
    for (Vertex c : view.children[v]) {
        char tag = view.shape->toward_root[c] ? 'U' : 'D';
        kid_codes.push_back(tag + code_of(view, c, aut));
    }
    std::sort(kid_codes.begin(), kid_codes.end());
    std::string out = "(";
    std::uint64_t run = 1;
    for (std::size_t i = 0; i < kid_codes.size(); ++i) {
        if (i > 0) {
            if (kid_codes[i] == kid_codes[i - 1]) {
                ++run;
                aut *= run; // running factorial of the multiplicity
            } else {
                run = 1;
            }
        }
        out += kid_codes[i];
    }
    out += ')';
    return out;
}

} // namespace

std::string rooted_canonical_code(const RootedTreeShape& shape) {
    if (shape.size() == 0) throw std::invalid_argument("empty shape");
    ShapeView view = make_view(shape);
    std::uint64_t aut = 1;
    return code_of(view, 0, aut);
}

std::uint64_t rooted_tree_aut(const RootedTreeShape& shape) {
    if (shape.size() == 0) throw std::invalid_argument("empty shape");
    ShapeView view = make_view(shape);
    std::uint64_t aut = 1;
    code_of(view, 0, aut);
    return aut;
}

double rho_tree(const RootedTreeShape& shape, double big_n, double big_m,
                double lambda) {
    const double k = static_cast<double>(shape.size());
    const double aut = static_cast<double>(rooted_tree_aut(shape));
    // ln rho = -ln Aut + (k-1) ln(N/M) + (2k-2) ln lambda + 2k lambda
    //          - 2k ln f_1(lambda)
    double ln_rho = -std::log(aut) + (k - 1.0) * std::log(big_n / big_m) +
                    (2.0 * k - 2.0) * std::log(lambda) + 2.0 * k * lambda -
                    2.0 * k * log_f1(lambda);
    return std::exp(ln_rho);
}

double star_exact_prediction(std::uint32_t a, std::uint32_t b, double lambda) {
    TruncatedPoisson tp(lambda);
    return tp.pmf(a) * tp.pmf(b);
}

double neighborhood_census(const Digraph& d, std::uint32_t depth,
                           const RootedTreeShape& shape) {
    if (depth > 2) throw std::invalid_argument("census supports depth <= 2");
    const std::string target = rooted_canonical_code(shape);
    std::size_t hits = 0;

    std::vector<Vertex> window, layer, next;
    for (Vertex v = 0; v < d.n; ++v) {
        window.assign(1, v);
        layer.assign(1, v);
        for (std::uint32_t step = 0; step < depth; ++step) {
            next.clear();
            for (Vertex u : layer) {
                for (Vertex w : d.out.neighbors(u))
                    if (!std::binary_search(window.begin(), window.end(), w))
                        next.push_back(w);
                for (Vertex w : d.in.neighbors(u))
                    if (!std::binary_search(window.begin(), window.end(), w))
                        next.push_back(w);
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            layer = next;
            window.insert(window.end(), next.begin(), next.end());
            std::sort(window.begin(), window.end());
        }
        if (window.size() != shape.size()) continue;

        // induced directed edges inside the window
        std::vector<Edge> induced;
        for (Vertex u : window)
            for (Vertex w : d.out.neighbors(u))
                if (std::binary_search(window.begin(), window.end(), w))
                    induced.emplace_back(u, w);
        if (induced.size() != window.size() - 1) continue;
        // antiparallel pair -> underlying edge count below directed count
        std::size_t underlying = 0;
        for (const auto& [u, w] : induced)
            if (u < w || !std::binary_search(induced.begin(), induced.end(),
                                             Edge{w, u}))
                ++underlying;
        if (underlying != window.size() - 1) continue;

        // window induces a tree; orient it from the BFS root and compare codes
        RootedTreeShape got;
        got.parent.assign(window.size(), 0);
        got.toward_root.assign(window.size(), 0);
        std::map<Vertex, Vertex> idx; // graph vertex -> shape index
        idx[v] = 0;
        std::vector<Vertex> order{v};
        for (std::size_t head = 0; head < order.size(); ++head) {
            Vertex u = order[head];
            for (const auto& [a, b] : induced) {
                Vertex other;
                bool outgoing;
                if (a == u) { other = b; outgoing = true; }
                else if (b == u) { other = a; outgoing = false; }
                else continue;
                if (idx.count(other)) continue;
                Vertex id = static_cast<Vertex>(order.size());
                idx[other] = id;
                got.parent[id] = idx[u];
                got.toward_root[id] = outgoing ? 0 : 1;
                order.push_back(other);
            }
        }
        if (order.size() == window.size() && rooted_canonical_code(got) == target)
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(d.n);
}

} // namespace longcycle
