#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "longcycle/contract.hpp"

namespace longcycle {

/// The uncontracted cycle failed re-verification against the original
/// edges. Always an implementation bug, never a sampling failure.
struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::uint32_t kNoSucc = 0xFFFFFFFFu;

/// Successor bijection plus its cycle decomposition. Each cycle is rotated
/// to start at its smallest vertex; cycles are listed by that vertex.
struct PermutationDigraph {
    std::vector<std::uint32_t> succ;
    std::vector<std::vector<std::uint32_t>> cycles;

    static PermutationDigraph from_succ(std::vector<std::uint32_t> s);
    std::size_t min_cycle() const;
};

/// Permutation digraph minus one edge: a path from start to end plus cycles
/// covering the rest. succ[end] == kNoSucc, everything else mapped.
struct Npd {
    std::vector<std::uint32_t> succ;
    std::uint32_t start = 0, end = 0;

    static Npd from_break(const PermutationDigraph& pi, std::uint32_t v0);
    void validate() const; // throws std::invalid_argument
};

/// Which boost-slot lookups may close a rotation path end->start: the end's
/// own out-slot, the start's in-slot, or either.
enum class ClosureLookup { Both, InFourOnly, OutFourOnly };

struct PhaseParams {
    std::uint32_t n0 = 2;     // minimum acceptable cycle length after boosting
    std::uint32_t nu = 1;     // rotation-tree leaf target
    std::uint32_t t2 = 1;     // rotation-tree depth cap
    std::uint64_t w_cap = 2;  // conditioning-set cap
    std::uint32_t resplit_budget = 5;    // matching role re-randomizations
    std::uint32_t restart_budget = 5;    // full pipeline restarts
    std::uint32_t closure_budget = 64;   // replay attempts per boost iteration
    std::uint32_t reassembly_budget = 8; // break re-randomizations
    bool strict_edges = false; // reserve slots only in phase 3; global W
    ClosureLookup closure_lookup = ClosureLookup::Both;

    void validate(std::uint32_t n) const; // throws std::invalid_argument
    static PhaseParams desk(std::uint32_t n);
    static PhaseParams asymptotic(std::uint32_t n);
};

/// Break vertices drawn from a cycle carrying base_count base vertices:
/// 2*floor(base_count/scale) + 1, clamped to an odd count <= base_count.
inline std::uint32_t section_break_count(std::uint32_t base_count,
                                         double scale) {
    std::uint32_t m =
        2 * static_cast<std::uint32_t>(static_cast<double>(base_count) / scale) +
        1;
    if (m > base_count) m = base_count - (base_count % 2 == 0 ? 1 : 0);
    return m;
}

struct PhaseStats {
    bool phase1_ok = false, phase2_ok = false, phase3_ok = false;
    std::uint32_t resplits = 0;
    std::uint32_t boost_iterations = 0;
    std::uint32_t reassembly_merges = 0;
    std::uint64_t w_peak = 0;
    double ms_phase1 = 0, ms_phase2 = 0, ms_phase3 = 0;
};

/// Consumption bookkeeping for one pipeline attempt: which boost slots were
/// conditioned by rotations, and the conditioning set W.
struct EdgeLedger {
    std::vector<std::uint8_t> out4_used, in4_used;
    std::vector<std::uint8_t> in_w;
    std::uint64_t w_size = 0, w_peak = 0;

    void init(std::uint32_t n);
    void add_w(std::uint32_t v);
    void clear_w(); // desk mode resets between boost iterations
};

/// Perfect matching of the bipartite light graph, as a successor bijection.
/// Re-randomizes the light split on failure up to the budget, mutating d.
std::optional<PermutationDigraph> phase1_matching(ContractedDigraph& d,
                                                  const PhaseParams& params,
                                                  std::uint64_t seed,
                                                  PhaseStats* stats = nullptr);

/// Rotation boosting: returns a permutation digraph whose cycles all have
/// at least n0 vertices (a lone covering cycle passes through unchanged),
/// or nullopt when some small cycle survives its edge retries.
std::optional<PermutationDigraph> phase2_boost(const PermutationDigraph& pi,
                                               const ContractedDigraph& d,
                                               const PhaseParams& params,
                                               EdgeLedger& ledger,
                                               PhaseStats* stats = nullptr);

/// Merges the remaining cycles into one via reserve-slot exchanges
/// (edge-driven by default, section-reassembly search as fallback).
std::optional<PermutationDigraph> phase3_reassemble(const PermutationDigraph& pi,
                                                    const ContractedDigraph& d,
                                                    const PhaseParams& params,
                                                    std::uint64_t seed,
                                                    EdgeLedger& ledger,
                                                    PhaseStats* stats = nullptr);

/// Phases 1-3 on one contracted digraph. On success the returned sequence
/// is the full cycle in contracted ids, starting at vertex 0.
std::optional<std::vector<std::uint32_t>> hamilton_cycle_dstar(
    ContractedDigraph& d, const PhaseParams& params, std::uint64_t seed,
    PhaseStats* stats = nullptr);

/// Expands a contracted cycle to original vertex ids and re-verifies it:
/// consecutive pairs (wrapping) must be union edges and all vertices
/// distinct. Throws VerificationFailed.
std::vector<Vertex> uncontract_and_verify(const std::vector<std::uint32_t>& cycle,
                                          const ContractedDigraph& d,
                                          const ColoredDigraph& cd);

struct HamiltonOutcome {
    bool success = false;
    std::vector<Vertex> cycle;    // original ids, empty on failure
    std::uint32_t v_star_size = 0; // |v1| + covered tree vertices
    std::uint32_t sum_phi_lower = 0;
    std::uint32_t restarts = 0;   // restarts actually consumed
    PhaseStats stats;             // last attempt
};

/// Full driver: survivor-mode packings, contraction, phases with restarts,
/// uncontraction. Fails fast (restarts = 0) when the target set has fewer
/// than 2 vertices.
HamiltonOutcome find_long_cycle(const ColoredDigraph& cd, const PeelResult& pr,
                                const std::vector<GammaComponent>& comps,
                                const PhaseParams& params, std::uint64_t seed);

} // namespace longcycle
