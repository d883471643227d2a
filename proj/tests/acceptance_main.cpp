// Acceptance harness: eleven end-to-end checks, one verdict line each.
// Tolerances are pinned next to the measurement they gate. Exit code is the
// number of failed checks; failing checks print their analysis inline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "longcycle/analytics.hpp"
#include "longcycle/contract.hpp"
#include "longcycle/digraph.hpp"
#include "longcycle/hamilton.hpp"
#include "longcycle/peel.hpp"
#include "longcycle/rng.hpp"
#include "longcycle/tree_pack.hpp"
#include "longcycle/trial.hpp"

using namespace longcycle;

namespace {

constexpr std::uint64_t kSuiteSeed = 20260819;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs), s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    }
};

struct Verdict {
    bool pass = true;
    std::string headline;
    std::vector<std::string> notes;
};

void note_runtime(Verdict& v, const Timer& tm, double limit_s) {
    double s = tm.secs();
    if (s > limit_s) {
        v.pass = false;
        v.notes.push_back(
            fmt("runtime %.1f s exceeds the %.0f s limit", s, limit_s));
    } else {
        v.notes.push_back(fmt("runtime %.1f s (limit %.0f s)", s, limit_s));
    }
}

// 1: mean giant-component fraction against the analytic fixed point
Verdict giant_fraction() {
    Timer tm;
    const Vertex n = 200000;
    const int trials = 10;
    const double tol = 3e-3;
    Verdict v;
    v.headline = "giant component fraction tracks the fixed point prediction";
    int block = 0;
    for (double c : {5.0, 6.0, 8.0}) {
        std::vector<double> fr;
        for (int t = 0; t < trials; ++t) {
            ModelParams mp{n, c};
            ColoredDigraph cd = sample_colored(
                mp, derive_seed(kSuiteSeed, 0x1000 + block * 64 + t));
            fr.push_back(
                static_cast<double>(giant_component(cd.union_view()).size()) /
                static_cast<double>(n));
        }
        double m = mean_of(fr), pred = k1_fraction(c);
        bool ok = std::abs(m - pred) <= tol;
        v.pass = v.pass && ok;
        v.notes.push_back(
            fmt("c=%g: mean %.6f predicted %.6f |diff| %.1e (tol %.0e)%s", c, m,
                pred, std::abs(m - pred), tol, ok ? "" : "  <- out of tolerance"));
        ++block;
    }
    note_runtime(v, tm, 120.0);
    return v;
}

// 2: packing-deficit density against the c^2 e^{-2c} leading order
Verdict deficit_density() {
    Timer tm;
    const Vertex n = 1000000;
    const double c = 5.0;
    const int trials = 5;
    const double rel_tol = 0.25;
    Verdict v;
    v.headline = "packing deficit density tracks c^2 e^{-2c}";
    std::vector<double> dens;
    int emptied = 0;
    Vertex k1 = 0;
    std::uint32_t tree_comps = 0;
    for (int t = 0; t < trials; ++t) {
        TrialRecord r = run_trial(n, c, derive_seed(kSuiteSeed, 0x2000 + t));
        if (!r.error.empty()) v.notes.push_back("trial error: " + r.error);
        dens.push_back(static_cast<double>(r.sum_phi_upper) /
                       static_cast<double>(n));
        emptied += r.s_l_size == r.k1_size;
        k1 = r.k1_size;
        tree_comps = r.tree_component_count;
    }
    double m = mean_of(dens), pred = phi_density_prediction(c);
    v.pass = std::abs(m - pred) <= rel_tol * pred;
    v.notes.push_back(fmt("mean deficit density %.3e predicted %.3e (need within %.0f%%)",
                          m, pred, rel_tol * 100.0));
    if (!v.pass) {
        v.notes.push_back(
            fmt("%d of %d trials: fixpoint removed the entire component "
                "(last |K1| = %u, %u tree components)",
                emptied, trials, k1, tree_comps));
        v.notes.push_back(
            "per-color mean degree is c/2 = 2.5, far below the five-in "
            "five-out survivor threshold; the removal cascade leaves no "
            "forest to pack (survivors first appear near c = 25 at these sizes)");
        v.notes.push_back(
            "the density formula is a large-c asymptotic with no finite-size "
            "witness at c = 5");
    }
    note_runtime(v, tm, 600.0);
    return v;
}

// 3: constructed cycle fraction against the scaling-limit lower bound
Verdict scaling_limit() {
    Timer tm;
    const Vertex n = 1000000;
    const double c = 6.0;
    const int trials = 5;
    const double tol = 1.5e-3;
    Verdict v;
    v.headline = "cycle length fraction reaches the scaling limit bound";
    std::vector<double> fr;
    int successes = 0, emptied = 0;
    for (int t = 0; t < trials; ++t) {
        TrialRecord r = run_trial(n, c, derive_seed(kSuiteSeed, 0x3000 + t));
        fr.push_back(static_cast<double>(r.cycle_length) /
                     static_cast<double>(n));
        successes += r.success();
        emptied += r.s_l_size == r.k1_size;
    }
    double m = mean_of(fr), pred = corollary_bound(c);
    v.pass = std::abs(m - pred) <= tol;
    v.notes.push_back(fmt("mean cycle fraction %.6f bound %.6f |diff| %.1e (tol %.1e)",
                          m, pred, std::abs(m - pred), tol));
    if (!v.pass) {
        v.notes.push_back(fmt("%d of %d trials built a cycle; %d of %d peeled to "
                              "the empty survivor set",
                              successes, trials, emptied, trials));
        v.notes.push_back(
            "with no survivor set the construction never starts and the "
            "cycle fraction is 0; the bound only binds once the removal "
            "cascade stops, which at these sizes needs c near 25 or more");
    }
    note_runtime(v, tm, 600.0);
    return v;
}

// 4: exact longest cycles never exceed |K1| minus the packing deficit
Verdict exact_upper_bound() {
    Timer tm;
    const int instances = 500;
    Verdict v;
    v.headline = "exact longest cycles respect the packing bound";
    int bound_viol = 0, construct_viol = 0, other = 0;
    Vertex n_min = 0xFFFFFFFFu, n_max = 0;
    double c_min = 1e9, c_max = 0;
    for (int t = 0; t < instances; ++t) {
        std::uint64_t h = derive_seed(kSuiteSeed, 0x4000 + t);
        Vertex n = 8 + static_cast<Vertex>(h % 9);
        double c = 3.0 + 0.5 * static_cast<double>((h >> 8) % 11);
        // the edge probability c/n must stay below 1
        if (c >= static_cast<double>(n)) n = static_cast<Vertex>(c) + 1;
        n_min = std::min(n_min, n);
        n_max = std::max(n_max, n);
        c_min = std::min(c_min, c);
        c_max = std::max(c_max, c);
        TrialOptions o;
        o.oracle_check = true;
        TrialRecord r = run_trial(n, c, derive_seed(kSuiteSeed, 0x4800 + t), o);
        if (r.error == "upper_bound_violated") {
            ++bound_viol;
            if (bound_viol <= 3)
                v.notes.push_back(fmt("violation: n=%u c=%g seed index %d: exact %u "
                                      "+ deficit %llu > |K1| %u",
                                      n, c, t, r.oracle_length,
                                      static_cast<unsigned long long>(r.sum_phi_upper),
                                      r.k1_size));
        } else if (r.error == "constructed_exceeds_exact") {
            ++construct_viol;
        } else if (!r.error.empty()) {
            ++other;
            if (other <= 3) v.notes.push_back("unexpected error: " + r.error);
        }
    }
    v.pass = bound_viol == 0 && construct_viol == 0 && other == 0;
    v.notes.insert(v.notes.begin(),
                   fmt("%d instances, n in [%u,%u], c in [%g,%g]: %d bound "
                       "violations, %d constructed-beyond-exact, %d errors",
                       instances, n_min, n_max, c_min, c_max, bound_viol,
                       construct_viol, other));
    note_runtime(v, tm, 300.0);
    return v;
}

// unlabeled tree enumeration by leaf attachment, deduped by canonical code
using UEdge = std::pair<int, int>;
using UTree = std::vector<UEdge>;

std::string rooted_code(int v, int parent,
                        const std::vector<std::vector<int>>& adj) {
    std::vector<std::string> kids;
    for (int w : adj[v])
        if (w != parent) kids.push_back(rooted_code(w, v, adj));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& k : kids) s += k;
    return s + ")";
}

std::string free_code(int n, const UTree& t) {
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : t) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::string best;
    for (int r = 0; r < n; ++r) {
        std::string c = rooted_code(r, -1, adj);
        if (best.empty() || c < best) best = std::move(c);
    }
    return best;
}

std::vector<std::vector<UTree>> enumerate_free_trees(int max_n) {
    std::vector<std::vector<UTree>> by_n(max_n + 1);
    by_n[1] = {UTree{}};
    for (int n = 2; n <= max_n; ++n) {
        std::set<std::string> seen;
        for (const UTree& base : by_n[n - 1])
            for (int host = 0; host < n - 1; ++host) {
                UTree t = base;
                t.push_back({host, n - 1});
                if (seen.insert(free_code(n, t)).second)
                    by_n[n].push_back(std::move(t));
            }
    }
    return by_n;
}

OrientedTree make_tree(int n, const UTree& shape, std::uint32_t orient,
                       std::uint32_t smask, std::uint32_t emask) {
    OrientedTree t;
    for (int i = 0; i < n; ++i) t.vertices.push_back(static_cast<Vertex>(i));
    for (std::size_t e = 0; e < shape.size(); ++e) {
        auto [a, b] = shape[e];
        if (orient >> e & 1) std::swap(a, b);
        t.edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
    }
    for (int i = 0; i < n; ++i) {
        t.start_ok.push_back(smask >> i & 1);
        t.end_ok.push_back(emask >> i & 1);
    }
    return t;
}

// 5: packing DP against the exhaustive oracle over every small tree shape
Verdict dp_oracle() {
    Timer tm;
    const int max_n = 9;
    const int per_shape = 110;
    Verdict v;
    v.headline = "packing dynamic program agrees with the exhaustive oracle";
    auto by_n = enumerate_free_trees(max_n);
    std::size_t shapes = 0, checks = 0, mismatches = 0;
    SplitMix64 rng(derive_seed(kSuiteSeed, 0x5000));
    for (int n = 1; n <= max_n; ++n) {
        for (const UTree& shape : by_n[n]) {
            ++shapes;
            for (int r = 0; r < per_shape; ++r) {
                std::uint32_t orient = static_cast<std::uint32_t>(rng.next()) &
                                       ((1u << (n - 1)) - 1u);
                std::uint32_t sm =
                    static_cast<std::uint32_t>(rng.next()) & ((1u << n) - 1u);
                std::uint32_t em =
                    static_cast<std::uint32_t>(rng.next()) & ((1u << n) - 1u);
                OrientedTree t = make_tree(n, shape, orient, sm, em);
                ++checks;
                mismatches += phi_dp(t).phi != phi_brute(t);
            }
        }
    }
    v.pass = mismatches == 0 && checks >= 10000;
    v.notes.push_back(fmt("%zu tree shapes up to %d vertices, %zu random "
                          "orientation and flag assignments, %zu mismatches",
                          shapes, max_n, checks, mismatches));
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

// 6: removal fixpoint identical under shuffled worklist orders
Verdict order_independence() {
    Timer tm;
    const Vertex n = 3000;
    const double c = 7.0;
    const int orders = 50;
    Verdict v;
    v.headline = "removal fixpoint is independent of worklist order";
    ModelParams mp{n, c};
    ColoredDigraph cd = sample_colored(mp, derive_seed(kSuiteSeed, 0x6000));
    std::vector<Vertex> k1 = giant_component(cd.union_view());
    PeelResult base = peel(cd, k1, 0);
    int agree = 1;
    for (int os = 1; os < orders; ++os)
        agree += peel(cd, k1, static_cast<std::uint64_t>(os)).s_l == base.s_l;
    v.pass = agree == orders;
    v.notes.push_back(fmt("%d worklist orders, %d identical fixpoints; |S_L| = "
                          "%zu of |K1| = %zu",
                          orders, agree, base.s_l.size(), k1.size()));
    if (base.s_l == k1)
        v.notes.push_back(
            "the fixpoint absorbed the whole component at this c; equality is "
            "still checked vertex for vertex per order");
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

// 7: light matching success rate and cycle count of the resulting permutation
Verdict matching_structure() {
    Timer tm;
    Verdict v;
    v.headline = "light matching succeeds and yields under 3 ln N cycles";
    const int trials = 20;
    int ok_small = 0;
    for (int t = 0; t < trials; ++t) {
        ContractedDigraph d =
            synthetic_dstar(10000, 0, derive_seed(kSuiteSeed, 0x7000 + t));
        PhaseParams pp = PhaseParams::desk(10000);
        ok_small +=
            phase1_matching(d, pp, derive_seed(kSuiteSeed, 0x7100 + t)).has_value();
    }
    const double cap = 3.0 * std::log(1e5);
    int ok_big = 0, found_big = 0;
    std::size_t worst = 0;
    for (int t = 0; t < trials; ++t) {
        ContractedDigraph d =
            synthetic_dstar(100000, 0, derive_seed(kSuiteSeed, 0x7200 + t));
        PhaseParams pp = PhaseParams::desk(100000);
        auto pi = phase1_matching(d, pp, derive_seed(kSuiteSeed, 0x7300 + t));
        if (pi) {
            ++found_big;
            worst = std::max(worst, pi->cycles.size());
            ok_big += static_cast<double>(pi->cycles.size()) <= cap;
        }
    }
    v.pass = ok_small >= 19 && ok_big >= 18;
    v.notes.push_back(
        fmt("matching found in %d of %d trials at N = 1e4 (need 19)", ok_small,
            trials));
    v.notes.push_back(fmt("cycle count <= 3 ln N = %.1f in %d of %d trials at "
                          "N = 1e5 (need 18; %d matched, worst %zu cycles)",
                          cap, ok_big, trials, found_big, worst));
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

// 8: full pipeline success rate at n = 5e4, c = 8 with desk parameters
Verdict end_to_end() {
    Timer tm;
    const Vertex n = 50000;
    const double c = 8.0;
    const int trials = 10;
    Verdict v;
    v.headline = "end-to-end construction succeeds at n = 5e4, c = 8";
    int succ = 0, emptied = 0;
    bool exact = true;
    for (int t = 0; t < trials; ++t) {
        TrialRecord r = run_trial(n, c, derive_seed(kSuiteSeed, 0x8000 + t));
        succ += r.success();
        emptied += r.s_l_size == r.k1_size;
        if (r.success() && r.cycle_length != r.v_star_size) exact = false;
    }
    v.pass = succ >= 7 && exact;
    v.notes.push_back(fmt("%d of %d seeds produced a verified cycle within 5 "
                          "restarts (need >= 7); spans matched exactly: %s",
                          succ, trials, exact ? "yes" : "no"));
    if (!v.pass) {
        v.notes.push_back(fmt("%d of %d seeds peeled to the empty survivor set, "
                              "so the target set has no vertices and the "
                              "construction cannot start",
                              emptied, trials));
        for (int t = 0; t < 3; ++t) {
            TrialRecord r =
                run_trial(n, 32.0, derive_seed(kSuiteSeed, 0x8800 + t));
            v.notes.push_back(
                fmt("same size in the surviving regime, c = 32 seed %d: cycle "
                    "%u of target %u, %u restarts",
                    t, r.cycle_length, r.v_star_size, r.restart_count));
        }
    }
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

double tv_distance(const std::vector<std::uint32_t>& degs,
                   const TruncatedPoisson& tp) {
    std::uint32_t max_d = 0;
    for (std::uint32_t d : degs) max_d = std::max(max_d, d);
    std::vector<double> emp(std::max<std::uint32_t>(max_d, tp.max_t()) + 1, 0.0);
    for (std::uint32_t d : degs) emp[d] += 1.0;
    for (double& e : emp) e /= static_cast<double>(degs.size());
    double tv = 0;
    for (std::uint32_t i = 1; i < emp.size(); ++i)
        tv += std::abs(emp[i] - tp.pmf(i));
    return tv / 2.0;
}

// 9: conditioned degree sampler against the zero-truncated Poisson law
Verdict degree_model() {
    Timer tm;
    const Vertex n = 100000;
    const std::uint64_t m = 700000;
    const double tv_tol = 0.01;
    Verdict v;
    v.headline = "degree sampler matches the truncated Poisson law";
    DegreeSequences ds =
        sample_degree_sequences(n, m, derive_seed(kSuiteSeed, 0x9000));
    std::uint64_t in_sum = 0, out_sum = 0;
    for (std::uint32_t d : ds.in_deg) in_sum += d;
    for (std::uint32_t d : ds.out_deg) out_sum += d;
    TruncatedPoisson tp(solve_lambda(static_cast<double>(m) /
                                     static_cast<double>(n)));
    double tv_in = tv_distance(ds.in_deg, tp);
    double tv_out = tv_distance(ds.out_deg, tp);
    v.pass = in_sum == m && out_sum == m && tv_in <= tv_tol && tv_out <= tv_tol;
    v.notes.push_back(fmt("conditioned sums: in %llu out %llu (target %llu)",
                          static_cast<unsigned long long>(in_sum),
                          static_cast<unsigned long long>(out_sum),
                          static_cast<unsigned long long>(m)));
    v.notes.push_back(fmt("TV distance: in %.4f out %.4f (need <= %.4f)", tv_in,
                          tv_out, tv_tol));
    if (ds.repaired)
        v.notes.push_back("rejection budget ran out; sequences were repaired "
                          "toward the target sum");
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

// 10: depth-1 star census in a simple pairing against the tree weight formula
Verdict star_census() {
    Timer tm;
    const Vertex n = 100000;
    const std::uint64_t m = 150000;
    const double rel_tol = 0.20;
    Verdict v;
    v.headline = "depth-1 star census stays within 20% of the weight formula";
    DegreeSequences ds =
        sample_degree_sequences(n, m, derive_seed(kSuiteSeed, 0xA000));
    Digraph d = build_simple_digraph(ds.in_deg, ds.out_deg,
                                     derive_seed(kSuiteSeed, 0xA100));
    double lambda = solve_lambda(static_cast<double>(m) /
                                 static_cast<double>(n));
    double f1 = f_k(1, lambda);
    bool product_ok = true;
    for (auto [a, b] : {std::pair<std::uint32_t, std::uint32_t>{1, 1},
                        {1, 2},
                        {2, 1}}) {
        RootedTreeShape shape = star_shape(a, b);
        double census = neighborhood_census(d, 1, shape);
        double rho = rho_tree(shape, static_cast<double>(n),
                              static_cast<double>(m), lambda);
        bool ok = std::abs(census - rho) <= rel_tol * rho;
        v.pass = v.pass && ok;
        std::uint32_t k = a + b + 1;
        double factor = std::exp((k + 1) * lambda) / std::pow(f1, k - 1.0);
        double product = star_exact_prediction(a, b, lambda);
        product_ok = product_ok && std::abs(census - product) <= 0.10 * product;
        v.notes.push_back(
            fmt("star(%u,%u): census %.4e weight formula %.4e ratio %.2f "
                "(e^{(k+1)lambda}/f1^{k-1} = %.2f); degree product %.4e "
                "ratio %.3f",
                a, b, census, rho, rho / census, factor, product,
                census / product));
    }
    if (!v.pass) {
        v.notes.push_back(
            "systematic: the weight formula exceeds the census by the "
            "constant factor e^{(k+1)lambda}/f1(lambda)^{k-1} shown per "
            "shape; it counts embedding weight, not occurrence frequency");
        v.notes.push_back(
            fmt("the in/out degree product reference matches the census "
                "within 10%% on every shape: %s",
                product_ok ? "yes" : "no"));
    }
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

// 11: cycle fraction deviation small at n = 1e5 and shrinking at n = 2e5
Verdict concentration() {
    Timer tm;
    const double c = 7.0;
    const int trials = 20;
    const double sd_tol = 2e-3;
    Verdict v;
    v.headline = "cycle fraction concentrates as n grows";
    std::vector<double> f1s, f2s;
    int succ = 0;
    for (int t = 0; t < trials; ++t) {
        TrialRecord r = run_trial(100000, c, derive_seed(kSuiteSeed, 0xB000 + t));
        f1s.push_back(static_cast<double>(r.cycle_length) / 100000.0);
        succ += r.success();
    }
    for (int t = 0; t < trials; ++t) {
        TrialRecord r = run_trial(200000, c, derive_seed(kSuiteSeed, 0xB100 + t));
        f2s.push_back(static_cast<double>(r.cycle_length) / 200000.0);
        succ += r.success();
    }
    double sd1 = sd_of(f1s), sd2 = sd_of(f2s);
    bool small_enough = sd1 <= sd_tol;
    bool decreases = sd2 < sd1;
    v.pass = small_enough && decreases;
    v.notes.push_back(fmt("sd of cycle fraction: %.3e at n = 1e5 (need <= %.0e), "
                          "%.3e at n = 2e5, decrease: %s",
                          sd1, sd_tol, sd2, decreases ? "yes" : "no"));
    if (!v.pass) {
        v.notes.push_back(fmt(
            "%d of %d trials built a cycle; at c = 7 every instance peels to "
            "the empty survivor set, both deviations are exactly 0, and 0 -> 0 "
            "is not a decrease",
            succ, 2 * trials));
        std::vector<double> g1s, g2s;
        for (int t = 0; t < 5; ++t) {
            TrialRecord r =
                run_trial(50000, 32.0, derive_seed(kSuiteSeed, 0xB200 + t));
            g1s.push_back(static_cast<double>(r.cycle_length) / 50000.0);
        }
        for (int t = 0; t < 5; ++t) {
            TrialRecord r =
                run_trial(100000, 32.0, derive_seed(kSuiteSeed, 0xB300 + t));
            g2s.push_back(static_cast<double>(r.cycle_length) / 100000.0);
        }
        v.notes.push_back(fmt("surviving regime, c = 32, 5 seeds: sd %.2e at "
                              "n = 5e4 -> %.2e at n = 1e5",
                              sd_of(g1s), sd_of(g2s)));
    }
    v.notes.push_back(fmt("runtime %.1f s", tm.secs()));
    return v;
}

} // namespace

int main() {
    Verdict (*checks[])() = {giant_fraction, deficit_density, scaling_limit,
                             exact_upper_bound, dp_oracle, order_independence,
                             matching_structure, end_to_end, degree_model,
                             star_census, concentration};
    int failed = 0;
    for (int i = 0; i < 11; ++i) {
        Verdict v = checks[i]();
        std::printf("[%s] %2d %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                    v.headline.c_str());
        for (const std::string& note : v.notes)
            std::printf("          %s\n", note.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("\n%d of 11 checks passed, %d failed\n", 11 - failed, failed);
    return failed;
}
