#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longcycle/digraph.hpp"
#include "longcycle/rng.hpp"

namespace longcycle {

/// Root of x e^{-x} = c e^{-c} in (0,1). Requires c > 1 (throws
/// std::domain_error otherwise). Residual below 1e-12.
double solve_x(double c);

/// Asymptotic giant-component fraction (1 - x/c)^2.
double k1_fraction(double c);

/// Lower bound on cycle_length/n for growing c: 1 - 2e^{-c} - (c^2+2c)e^{-2c}.
double corollary_bound(double c);

/// Leading-order prediction c^2 e^{-2c} for the packing deficit per vertex.
double phi_density_prediction(double c);

/// f_k(lambda) = e^lambda - sum_{i<k} lambda^i / i!, evaluated as the tail
/// series so no cancellation occurs when k exceeds lambda.
double f_k(int k, double lambda);

/// Root of lambda e^lambda / f_1(lambda) = ratio, i.e. the rate whose
/// zero-truncated Poisson has mean `ratio`. Requires ratio > 1 (throws
/// std::domain_error). Residual below 1e-10.
double solve_lambda(double ratio);

/// Poisson(lambda) conditioned on being >= 1. pmf(t) = lambda^t / (t! f_1).
class TruncatedPoisson {
public:
    explicit TruncatedPoisson(double lambda);
    double lambda() const { return lambda_; }
    double pmf(std::uint32_t t) const;
    double mean() const; // = lambda e^lambda / f_1(lambda)
    /// Largest t carried in the inversion table; tail beyond is < 1e-15.
    std::uint32_t max_t() const { return static_cast<std::uint32_t>(cdf_.size()); }
    std::uint32_t sample(SplitMix64& rng) const;

private:
    double lambda_;
    std::vector<double> cdf_; // cdf_[i] = P(T <= i+1)
};

struct DegreeSequences {
    std::vector<std::uint32_t> in_deg, out_deg;
    /// True when the rejection budget ran out and entries were re-drawn one at
    /// a time toward the target sum; the conditional law is then approximate.
    bool repaired = false;
    std::uint32_t rounds_in = 0, rounds_out = 0;
};

/// Two independent sequences of n zero-truncated Poisson draws, each
/// conditioned on summing to m (rate chosen so the mean matches m/n).
DegreeSequences sample_degree_sequences(Vertex n, std::uint64_t m,
                                        std::uint64_t seed,
                                        std::uint32_t rejection_budget = 20000);

struct PseudoDigraph {
    Vertex n = 0;
    std::vector<Edge> edges; // sorted; may contain self-loops and duplicates
    bool simple = false;
};

/// Uniform random pairing of out-stubs to in-stubs realizing the degrees.
PseudoDigraph build_pseudo_digraph(const std::vector<std::uint32_t>& in_deg,
                                   const std::vector<std::uint32_t>& out_deg,
                                   std::uint64_t seed);

/// Re-pairs until the result is simple; throws std::runtime_error when the
/// budget runs out.
Digraph build_simple_digraph(const std::vector<std::uint32_t>& in_deg,
                             const std::vector<std::uint32_t>& out_deg,
                             std::uint64_t seed, std::uint32_t budget = 1000);

/// Oriented tree with distinguished root 0. parent[v] < v for v >= 1;
/// toward_root[v] == 1 means the tree edge is directed v -> parent[v].
struct RootedTreeShape {
    std::vector<Vertex> parent;
    std::vector<std::uint8_t> toward_root;
    std::size_t size() const { return parent.size(); }
};

/// Star with `a` in-leaves (leaf -> root) and `b` out-leaves (root -> leaf).
RootedTreeShape star_shape(std::uint32_t a, std::uint32_t b);

/// Canonical code of the rooted oriented tree; equal codes iff rooted
/// isomorphic (direction-aware).
std::string rooted_canonical_code(const RootedTreeShape& shape);

/// Number of automorphisms fixing the root: product over vertices of the
/// factorials of multiplicities of identical (direction, subtree) children.
std::uint64_t rooted_tree_aut(const RootedTreeShape& shape);

/// Neighborhood-shape weight (1/Aut)(N/M)^{k-1} lambda^{2k-2} e^{2k lambda}
/// / f_1(lambda)^{2k}, evaluated in log space. Computed exactly as written;
/// it can exceed 1 (see star_exact_prediction for the frequency-calibrated
/// reference).
double rho_tree(const RootedTreeShape& shape, double big_n, double big_m,
                double lambda);

/// Probability that a vertex of the degree model has in-degree exactly a and
/// out-degree exactly b: pmf(a) * pmf(b). In a sparse simple digraph this is
/// the depth-1 star census frequency up to O(1/N).
double star_exact_prediction(std::uint32_t a, std::uint32_t b, double lambda);

/// Fraction of vertices whose depth-`depth` neighborhood (BFS over the
/// underlying undirected graph) induces an oriented tree rooted-isomorphic to
/// `shape`. A vertex pair joined in both directions never counts as a tree
/// edge, so such neighborhoods are excluded.
double neighborhood_census(const Digraph& d, std::uint32_t depth,
                           const RootedTreeShape& shape);

} // namespace longcycle
