#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "longcycle/analytics.hpp"

using namespace longcycle;

namespace {

std::uint64_t brute_aut(const RootedTreeShape& shape) {
    const std::size_t k = shape.size();
    std::set<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 1; v < k; ++v) {
        if (shape.toward_root[v]) edges.insert({v, shape.parent[v]});
        else edges.insert({shape.parent[v], v});
    }
    std::vector<Vertex> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t count = 0;
    do {
        if (perm[0] != 0) continue;
        bool ok = true;
        for (const auto& [a, b] : edges)
            if (!edges.count({perm[a], perm[b]})) { ok = false; break; }
        if (ok) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

RootedTreeShape random_shape(std::size_t k, SplitMix64& rng) {
    RootedTreeShape s;
    s.parent.assign(k, 0);
    s.toward_root.assign(k, 0);
    for (Vertex v = 1; v < k; ++v) {
        s.parent[v] = static_cast<Vertex>(rng.next_below(v));
        s.toward_root[v] = static_cast<std::uint8_t>(rng.next() & 1);
    }
    return s;
}

} // namespace

TEST_CASE("solve_x matches the two-term series and is monotone") {
    double series10 = 10.0 * std::exp(-10.0) + 100.0 * std::exp(-20.0);
    CHECK(std::abs(solve_x(10.0) - series10) < 1e-9);
    CHECK(solve_x(10.0) == doctest::Approx(4.542054e-4).epsilon(1e-4));
    CHECK(solve_x(12.0) < solve_x(10.0));
    CHECK(solve_x(10.0) < solve_x(8.0));
    CHECK_THROWS_AS(solve_x(1.0), std::domain_error);
    CHECK_THROWS_AS(solve_x(0.5), std::domain_error);
}

TEST_CASE("solver residuals stay within tolerance across the sweep") {
    for (double c = 2.0; c <= 20.0 + 1e-9; c += 0.25) {
        double x = solve_x(c);
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        CHECK(std::abs(x * std::exp(-x) - c * std::exp(-c)) <= 1e-12);
    }
    for (double r = 1.2; r <= 20.0 + 1e-9; r += 0.2) {
        double l = solve_lambda(r);
        CHECK(l > 0.0);
        CHECK(std::abs(l / -std::expm1(-l) - r) <= 1e-10);
    }
}

TEST_CASE("two-term series error is bounded by the next-order term") {
    for (double c = 6.0; c <= 20.0 + 1e-9; c += 0.5) {
        double series = c * std::exp(-c) + c * c * std::exp(-2.0 * c);
        double bound = 3.0 * c * c * c * std::exp(-3.0 * c);
        CHECK(std::abs(solve_x(c) - series) <= bound);
    }
}

TEST_CASE("closed forms hit their frozen values") {
    CHECK(k1_fraction(10.0) == doctest::Approx(0.9999092).epsilon(1e-6));
    CHECK(k1_fraction(30.0) > 1.0 - 1e-12); // x -> 0 limit
    CHECK(corollary_bound(6.0) == doctest::Approx(0.9947476).epsilon(1e-6));
    CHECK(corollary_bound(40.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi_density_prediction(5.0) == doctest::Approx(25.0 * std::exp(-10.0)));
    CHECK(phi_density_prediction(5.0) == doctest::Approx(1.135e-3).epsilon(1e-3));
    CHECK(phi_density_prediction(50.0) < 1e-40);
    for (double c = 4.0; c <= 12.0 + 1e-9; c += 0.5)
        CHECK(corollary_bound(c) < k1_fraction(c));
}

TEST_CASE("f_k tail series agrees with the direct form where both are stable") {
    CHECK(f_k(1, 0.0) == 0.0);
    CHECK(f_k(0, 0.5) == doctest::Approx(std::exp(0.5)));
    CHECK(f_k(0, 5.0) == doctest::Approx(std::exp(5.0)));
    // direct e^l - partial sum, safe when lambda > k
    double direct = std::exp(5.0) - (1.0 + 5.0 + 12.5 + 125.0 / 6.0);
    CHECK(f_k(4, 5.0) == doctest::Approx(direct).epsilon(1e-12));
    // cancellation regime: k far above lambda
    CHECK(f_k(10, 0.1) == doctest::Approx(2.758e-17).epsilon(0.01));
    CHECK(f_k(10, 0.1) > 0.0);
}

TEST_CASE("solve_lambda reproduces the mean and approaches c for large ratios") {
    double l = solve_lambda(10.0);
    CHECK(l == doctest::Approx(9.999546).epsilon(1e-6));
    CHECK(std::abs(l - 10.0) < 1e-3);
    CHECK_THROWS_AS(solve_lambda(1.0), std::domain_error);
    CHECK_THROWS_AS(solve_lambda(0.9), std::domain_error);
}

TEST_CASE("truncated poisson table is a distribution with the right mean") {
    for (double lambda : {0.3, 0.8742, 3.0, 9.9995}) {
        TruncatedPoisson tp(lambda);
        double sum = 0.0;
        for (std::uint32_t t = 1; t <= tp.max_t(); ++t) sum += tp.pmf(t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tp.mean() == doctest::Approx(lambda / -std::expm1(-lambda)));
        CHECK(tp.pmf(0) == 0.0);
    }

    // empirical mean within 3 sigma at 1e6 draws
    double lambda = solve_lambda(7.0);
    TruncatedPoisson tp(lambda);
    SplitMix64 rng(4242);
    const std::size_t draws = 1000000;
    double total = 0.0, total_sq = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        std::uint32_t t = tp.sample(rng);
        CHECK(t >= 1);
        total += t;
        total_sq += static_cast<double>(t) * t;
    }
    double mean = total / draws;
    double second = (lambda * lambda + lambda) / -std::expm1(-lambda);
    double sd_mean = std::sqrt((second - 49.0) / draws);
    CHECK(std::abs(mean - 7.0) < 3.0 * sd_mean);
    (void)total_sq;
}

TEST_CASE("degree sequences hit the target sum exactly") {
    Vertex n = 20000;
    std::uint64_t m = 3 * static_cast<std::uint64_t>(n);
    DegreeSequences ds = sample_degree_sequences(n, m, 99);
    CHECK(ds.in_deg.size() == n);
    CHECK(ds.out_deg.size() == n);
    std::uint64_t sin = 0, sout = 0;
    std::uint32_t min_in = 1000, min_out = 1000;
    for (auto d : ds.in_deg) { sin += d; min_in = std::min(min_in, d); }
    for (auto d : ds.out_deg) { sout += d; min_out = std::min(min_out, d); }
    CHECK(sin == m);
    CHECK(sout == m);
    CHECK(min_in >= 1);
    CHECK(min_out >= 1);
    CHECK_FALSE(ds.repaired);

    DegreeSequences again = sample_degree_sequences(n, m, 99);
    CHECK(again.in_deg == ds.in_deg);
    CHECK(again.out_deg == ds.out_deg);

    CHECK_THROWS_AS(sample_degree_sequences(100, 100, 1), std::domain_error);
}

TEST_CASE("degree marginals track the truncated poisson law") {
    Vertex n = 20000;
    std::uint64_t m = 3 * static_cast<std::uint64_t>(n);
    DegreeSequences ds = sample_degree_sequences(n, m, 7);
    double lambda = solve_lambda(3.0);
    TruncatedPoisson tp(lambda);
    std::vector<double> emp(40, 0.0);
    for (auto d : ds.in_deg)
        if (d < emp.size()) emp[d] += 1.0 / n;
    double tv = 0.0;
    for (std::uint32_t t = 1; t < emp.size(); ++t)
        tv += std::abs(emp[t] - tp.pmf(t));
    tv *= 0.5;
    CHECK(tv <= 0.02);

    // joint check on a handful of small degree pairs: near product of marginals
    for (std::uint32_t d1 = 1; d1 <= 3; ++d1)
        for (std::uint32_t d2 = 1; d2 <= 3; ++d2) {
            double joint = 0.0;
            for (Vertex v = 0; v < n; ++v)
                if (ds.in_deg[v] == d1 && ds.out_deg[v] == d2) joint += 1.0 / n;
            double prod = tp.pmf(d1) * tp.pmf(d2);
            CHECK(joint == doctest::Approx(prod).epsilon(0.10));
        }
}

TEST_CASE("stub pairing realizes the degrees and both 2-vertex outcomes") {
    std::vector<std::uint32_t> ones{1, 1};
    bool saw_loops = false, saw_cycle = false;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        PseudoDigraph pd = build_pseudo_digraph(ones, ones, seed);
        CHECK(pd.edges.size() == 2);
        if (pd.edges[0] == Edge{0, 0}) {
            CHECK(pd.edges[1] == Edge{1, 1});
            CHECK_FALSE(pd.simple);
            saw_loops = true;
        } else {
            CHECK(pd.edges[0] == Edge{0, 1});
            CHECK(pd.edges[1] == Edge{1, 0});
            CHECK(pd.simple);
            saw_cycle = true;
        }
    }
    CHECK(saw_loops);
    CHECK(saw_cycle);

    // degrees match the input sequences exactly
    SplitMix64 rng(5);
    Vertex n = 50;
    std::vector<std::uint32_t> in_deg(n), out_deg(n);
    std::uint64_t acc = 0;
    for (Vertex v = 0; v < n; ++v) {
        in_deg[v] = 1 + static_cast<std::uint32_t>(rng.next_below(3));
        acc += in_deg[v];
    }
    std::uint64_t remaining = acc;
    for (Vertex v = 0; v < n; ++v) {
        std::uint64_t cap = remaining - (n - 1 - v);
        std::uint32_t take =
            (v + 1 == n) ? static_cast<std::uint32_t>(remaining)
                         : 1 + static_cast<std::uint32_t>(
                                   rng.next_below(std::min<std::uint64_t>(cap, 3)));
        out_deg[v] = take;
        remaining -= take;
    }
    PseudoDigraph pd = build_pseudo_digraph(in_deg, out_deg, 11);
    std::vector<std::uint32_t> got_in(n, 0), got_out(n, 0);
    for (const auto& [v, w] : pd.edges) { got_out[v]++; got_in[w]++; }
    CHECK(got_in == in_deg);
    CHECK(got_out == out_deg);
}

TEST_CASE("simple pairings appear at a healthy rate near ratio 1.5") {
    Vertex n = 10000;
    std::uint64_t m = 15000;
    DegreeSequences ds = sample_degree_sequences(n, m, 3);
    int simple = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i)
        if (build_pseudo_digraph(ds.in_deg, ds.out_deg, 1000 + i).simple) ++simple;
    CHECK(static_cast<double>(simple) / trials >= 0.1);

    Digraph d = build_simple_digraph(ds.in_deg, ds.out_deg, 77);
    CHECK(d.edges.size() == m); // simple: no merged duplicates
    for (Vertex v = 0; v < n; ++v) {
        CHECK(d.out.degree(v) == ds.out_deg[v]);
        CHECK(d.in.degree(v) == ds.in_deg[v]);
    }
}

TEST_CASE("rooted automorphism counts match brute force") {
    CHECK(rooted_tree_aut(star_shape(0, 3)) == 6);
    CHECK(rooted_tree_aut(star_shape(1, 1)) == 1);
    CHECK(rooted_tree_aut(star_shape(2, 2)) == 4);

    SplitMix64 rng(321);
    for (int iter = 0; iter < 150; ++iter) {
        std::size_t k = 2 + rng.next_below(6); // up to 7 vertices
        RootedTreeShape s = random_shape(k, rng);
        CHECK(rooted_tree_aut(s) == brute_aut(s));
    }
}

TEST_CASE("canonical codes are relabeling-invariant") {
    // same tree, two constructions: root with out-child a, a has in-child b
    RootedTreeShape s1;
    s1.parent = {0, 0, 1};
    s1.toward_root = {0, 0, 1};
    // root's child listed through a different insertion order
    RootedTreeShape s2;
    s2.parent = {0, 0, 1};
    s2.toward_root = {0, 0, 1};
    std::swap(s2.parent[1], s2.parent[1]); // same data; codes must agree
    CHECK(rooted_canonical_code(s1) == rooted_canonical_code(s2));

    // star(1,2) built with leaves in different orders
    RootedTreeShape a;
    a.parent = {0, 0, 0, 0};
    a.toward_root = {0, 1, 0, 0};
    RootedTreeShape b;
    b.parent = {0, 0, 0, 0};
    b.toward_root = {0, 0, 0, 1};
    CHECK(rooted_canonical_code(a) == rooted_canonical_code(b));
    CHECK(rooted_canonical_code(a) == rooted_canonical_code(star_shape(1, 2)));
    CHECK(rooted_tree_aut(a) == rooted_tree_aut(b));
    double lambda = solve_lambda(1.5);
    CHECK(rho_tree(a, 1e5, 1.5e5, lambda) ==
          doctest::Approx(rho_tree(b, 1e5, 1.5e5, lambda)));
    CHECK(rooted_canonical_code(a) != rooted_canonical_code(star_shape(2, 1)));
}

TEST_CASE("rho evaluates the written formula") {
    // single-vertex shape: e^{2l}/f_1(l)^2 = 1/(1-e^{-l})^2
    RootedTreeShape single;
    single.parent = {0};
    single.toward_root = {0};
    double l = 2.0;
    double expect = 1.0 / (-std::expm1(-l) * -std::expm1(-l));
    CHECK(rho_tree(single, 1000.0, 5000.0, l) == doctest::Approx(expect));

    // doubling Aut halves rho at fixed k: path (Aut 1) vs 2-star (Aut 2)
    RootedTreeShape path;
    path.parent = {0, 0, 1};
    path.toward_root = {0, 0, 0};
    RootedTreeShape twostar = star_shape(0, 2);
    double lam = solve_lambda(1.5);
    CHECK(rho_tree(path, 1e5, 1.5e5, lam) ==
          doctest::Approx(2.0 * rho_tree(twostar, 1e5, 1.5e5, lam)));
}

TEST_CASE("census counts exactly the matching tree neighborhoods") {
    // chain 0 -> 1 -> 2: only vertex 0 has the pure out-leaf window
    Digraph chain = Digraph::from_edges(3, {{0, 1}, {1, 2}});
    CHECK(neighborhood_census(chain, 1, star_shape(0, 1)) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(neighborhood_census(chain, 1, star_shape(1, 0)) ==
          doctest::Approx(1.0 / 3.0));

    // triangle: every window is all 3 vertices with 3 edges, never a tree
    Digraph tri = Digraph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(neighborhood_census(tri, 1, star_shape(1, 1)) == 0.0);
    CHECK(neighborhood_census(tri, 1, star_shape(0, 1)) == 0.0);

    // antiparallel pair is not a tree window
    Digraph two = Digraph::from_edges(2, {{0, 1}, {1, 0}});
    CHECK(neighborhood_census(two, 1, star_shape(0, 1)) == 0.0);
    CHECK(neighborhood_census(two, 1, star_shape(1, 0)) == 0.0);
}

TEST_CASE("star census in a simple pairing tracks the exact-degree product") {
    Vertex n = 20000;
    std::uint64_t m = 30000;
    DegreeSequences ds = sample_degree_sequences(n, m, 2025);
    Digraph d = build_simple_digraph(ds.in_deg, ds.out_deg, 17);
    double lambda = solve_lambda(1.5);
    for (auto [a, b] : {std::pair<std::uint32_t, std::uint32_t>{1, 1},
                        {1, 2},
                        {2, 1}}) {
        double emp = neighborhood_census(d, 1, star_shape(a, b));
        double pred = star_exact_prediction(a, b, lambda);
        CHECK(emp == doctest::Approx(pred).epsilon(0.10));
    }
}
