#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longcycle/digraph.hpp"

namespace longcycle {

/// Everything one pipeline execution measured. cycle_length is 0 whenever no
/// verified cycle was produced; when nonzero it equals v_star_size exactly.
struct TrialRecord {
    Vertex n = 0;
    double c = 0.0;
    std::uint32_t trial = 0; // index within the (n, c) cell
    std::uint64_t seed = 0;  // the seed this trial actually consumed
    Vertex k1_size = 0;
    Vertex s_l_size = 0;
    std::uint32_t tree_component_count = 0;
    Vertex nontree_vertex_count = 0;
    std::uint64_t sum_phi_upper = 0;
    std::uint64_t sum_phi_lower = 0;
    Vertex v_star_size = 0;
    Vertex cycle_length = 0;
    bool phase1_ok = false, phase2_ok = false, phase3_ok = false;
    std::uint32_t restart_count = 0;
    Vertex oracle_length = 0; // exact longest cycle, 0 unless the oracle ran
    double ms_sample = 0, ms_peel = 0, ms_pack = 0;
    double ms_phase1 = 0, ms_phase2 = 0, ms_phase3 = 0;
    std::string error; // hard-error tag, empty on clean runs

    bool success() const { return cycle_length > 0; }
    std::string to_json() const;
    static TrialRecord from_json(const std::string& line);
};

struct TrialOptions {
    std::uint32_t restart_budget = 5;
    bool strict_edges = false;
    bool asymptotic_n0 = false; // size the phases with the asymptotic constants
    /// Cross-check against the exact oracle; requires the working set to fit
    /// under the oracle cap, so only sensible for tiny n.
    bool oracle_check = false;
};

/// Samples, peels, packs, and (when survivors exist) runs the construction
/// phases. Hard errors are caught and recorded in `error`, never thrown.
/// `cycle_out`, when given, receives the verified cycle in original ids.
TrialRecord run_trial(Vertex n, double c, std::uint64_t seed,
                      const TrialOptions& opts = {},
                      std::vector<Vertex>* cycle_out = nullptr);

/// Flat key=value experiment description. Repeated `n=` / `c=` lines build
/// the grid; every (n, c) cell runs `trials` trials.
struct ExperimentConfig {
    std::vector<Vertex> ns;
    std::vector<double> cs;
    std::uint32_t trials = 1;
    std::uint64_t master_seed = 1;
    std::uint32_t threads = 1;
    TrialOptions trial;
    std::string records_path;   // JSONL, one record per line; empty = skip
    std::string aggregate_path; // CSV per-cell summary; empty = skip

    void validate() const; // throws std::invalid_argument
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

struct SweepResult {
    std::vector<TrialRecord> records; // sorted by (n, c, trial)
    std::string aggregate_csv;        // header always present
};

/// Runs the full grid. Trials execute on `threads` workers but every record's
/// seed depends only on (master_seed, cell, trial), and records are merged in
/// sorted order, so output is identical for any thread count.
SweepResult sweep(const ExperimentConfig& cfg);

struct CompareTolerances {
    double k1_abs = 0.01;    // |measured - predicted| on |K1|/n
    double phi_rel = 0.25;   // relative error on sum_phi_upper / n
    double phi_abs = 1e-5;   // floor so near-zero predictions stay testable
    double cycle_abs = 0.01; // |measured - predicted| on cycle_length/n
};

struct CompareRow {
    double c = 0;
    std::uint64_t trials = 0, successes = 0;
    double measured_k1_frac = 0, predicted_k1_frac = 0;
    double measured_phi_frac = 0, predicted_phi_frac = 0;
    double measured_cycle_frac = 0, predicted_cycle_frac = 0;
    bool has_prediction = false; // c outside the analytic domain otherwise
    bool ok = false;             // within tolerances; vacuously false without prediction
};

struct CompareReport {
    std::vector<CompareRow> rows; // one per distinct c, ascending
    bool all_ok = true;           // over rows that have predictions
    std::string to_csv() const;
};

/// Per-c comparison of measured means against the closed forms. Rows whose c
/// lies outside the analytic domain are flagged, kept, and excluded from
/// all_ok. Cycle fractions average over successful trials only.
CompareReport compare(const std::vector<TrialRecord>& records,
                      const CompareTolerances& tol = {});

} // namespace longcycle
