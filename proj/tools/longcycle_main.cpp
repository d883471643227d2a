#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "longcycle/analytics.hpp"
#include "longcycle/exact_cycle.hpp"
#include "longcycle/peel.hpp"
#include "longcycle/tree_pack.hpp"
#include "longcycle/trial.hpp"

namespace {

using namespace longcycle;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::uint32_t threads = 1;
    std::uint32_t restarts = 5;
    bool strict_edges = false;
    std::string n0_mode = "desk";

    TrialOptions trial() const {
        TrialOptions t;
        t.restart_budget = restarts;
        t.strict_edges = strict_edges;
        t.asymptotic_n0 = n0_mode == "asymptotic";
        return t;
    }
};

struct Front {
    ColoredDigraph cd;
    PeelResult pr;
    std::vector<GammaComponent> comps;
};

Front run_front(Vertex n, double c, std::uint64_t seed) {
    ModelParams mp{n, c};
    mp.validate();
    Front f;
    f.cd = sample_colored(mp, seed);
    f.pr = peel(f.cd, giant_component(f.cd.union_view()));
    f.comps = gamma_components(f.pr, f.cd);
    return f;
}

int cmd_sample(Vertex n, double c, const GlobalOpts& g) {
    ModelParams mp{n, c};
    mp.validate();
    ColoredDigraph cd = sample_colored(mp, g.seed);
    Digraph u = cd.union_view();
    nlohmann::json j = nlohmann::json::object();
    j["n"] = n;
    j["c"] = c;
    j["seed"] = g.seed;
    j["red_edges"] = cd.red.size();
    j["blue_edges"] = cd.blue.size();
    j["union_edges"] = u.edges.size();
    j["k1_size"] = giant_component(u).size();
    std::printf("%s\n", j.dump().c_str());
    return 0;
}

int cmd_peel(Vertex n, double c, const std::string& trace_path,
             const GlobalOpts& g) {
    Front f = run_front(n, c, g.seed);
    std::uint32_t trees = 0;
    std::uint64_t nontree = 0;
    for (const auto& comp : f.comps)
        comp.is_tree ? (void)++trees : (void)(nontree += comp.vertices.size());
    nlohmann::json j = nlohmann::json::object();
    j["k1"] = f.pr.k1.size();
    j["sl"] = f.pr.s_l.size();
    j["v1"] = f.pr.v1.size();
    j["v2"] = f.pr.v2.size();
    j["steps"] = f.pr.trace.size();
    j["tree_components"] = trees;
    j["nontree_vertices"] = nontree;
    std::printf("%s\n", j.dump().c_str());
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw std::runtime_error("cannot write " + trace_path);
        out << trace_to_jsonl(f.pr);
    }
    return 0;
}

int cmd_phi(Vertex n, double c, const GlobalOpts& g) {
    Front f = run_front(n, c, g.seed);
    std::uint64_t phi_up = 0, phi_lo = 0, covered = 0;
    std::uint32_t trees = 0;
    for (const auto& comp : f.comps) {
        if (!comp.is_tree) continue;
        ++trees;
        phi_up += phi_dp(oriented_tree_from_component(
                             comp, f.cd, f.pr.k1, f.pr.v1,
                             EligibilityMode::Upper))
                      .phi;
        std::uint32_t phi =
            phi_dp(oriented_tree_from_component(comp, f.cd, f.pr.k1, f.pr.v1,
                                                EligibilityMode::Lower))
                .phi;
        phi_lo += phi;
        covered += comp.vertices.size() - phi;
    }
    nlohmann::json j = nlohmann::json::object();
    j["k1"] = f.pr.k1.size();
    j["v1"] = f.pr.v1.size();
    j["tree_components"] = trees;
    j["sum_phi_upper"] = phi_up;
    j["sum_phi_lower"] = phi_lo;
    j["v_star"] = f.pr.v1.size() + covered;
    std::printf("%s\n", j.dump().c_str());
    return 0;
}

int cmd_cycle(Vertex n, double c, const GlobalOpts& g) {
    std::vector<Vertex> cycle;
    TrialRecord r = run_trial(n, c, g.seed, g.trial(), &cycle);
    std::fprintf(stderr, "%s\n", r.to_json().c_str());
    if (!r.error.empty()) return 1;
    if (r.success()) {
        std::string line;
        for (Vertex v : cycle) {
            if (!line.empty()) line += ' ';
            line += std::to_string(v);
        }
        std::printf("%s\n", line.c_str());
    }
    return 0;
}

int cmd_exact(Vertex n, double c, std::uint32_t max_n, const GlobalOpts& g) {
    TrialOptions opts = g.trial();
    opts.oracle_check = true;
    if (n > max_n) throw std::invalid_argument("exact: n exceeds --max-n");
    TrialRecord r = run_trial(n, c, g.seed, opts);
    if (!r.error.empty()) {
        std::fprintf(stderr, "%s\n", r.to_json().c_str());
        return 1;
    }
    nlohmann::json j = nlohmann::json::object();
    j["k1"] = r.k1_size;
    j["exact_length"] = r.oracle_length;
    j["sum_phi_upper"] = r.sum_phi_upper;
    j["bound"] = r.k1_size - r.sum_phi_upper;
    j["constructed"] = r.cycle_length;
    std::printf("%s\n", j.dump().c_str());
    return 0;
}

int cmd_analytics(double c_min, double c_max, double c_step) {
    std::printf("c,x,k1_fraction,corollary_bound,phi_density_prediction\n");
    for (double c = c_min; c <= c_max + 1e-9; c += c_step)
        std::printf("%.6g,%.9g,%.9g,%.9g,%.9g\n", c, solve_x(c),
                    k1_fraction(c), corollary_bound(c),
                    phi_density_prediction(c));
    return 0;
}

int cmd_sweep(const std::string& config_path, const CLI::App* cmd,
              const GlobalOpts& g, bool seed_set, bool threads_set,
              bool strict_set, bool mode_set, bool restarts_set) {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed_set) cfg.master_seed = g.seed;
    if (threads_set) cfg.threads = g.threads;
    if (strict_set) cfg.trial.strict_edges = g.strict_edges;
    if (mode_set) cfg.trial.asymptotic_n0 = g.n0_mode == "asymptotic";
    if (restarts_set) cfg.trial.restart_budget = g.restarts;
    (void)cmd;
    SweepResult res = sweep(cfg);
    if (cfg.aggregate_path.empty()) std::fputs(res.aggregate_csv.c_str(), stdout);
    std::fprintf(stderr, "sweep: %zu records\n", res.records.size());
    return 0;
}

int cmd_compare(const std::string& records_path, const CompareTolerances& tol,
                bool enforce) {
    std::ifstream in(records_path);
    if (!in) throw std::runtime_error("cannot read " + records_path);
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(TrialRecord::from_json(line));
    }
    CompareReport rep = compare(records, tol);
    std::fputs(rep.to_csv().c_str(), stdout);
    return enforce && !rep.all_ok ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"long directed cycles in sparse random digraphs"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
    auto* threads_opt = app.add_option("--threads", g.threads, "worker count");
    auto* strict_opt = app.add_flag("--strict-edges",
                                    g.strict_edges,
                                    "reserve-only reassembly, hard W cap");
    auto* mode_opt = app.add_option("--n0-mode", g.n0_mode,
                                    "short-cycle threshold scaling")
                         ->check(CLI::IsMember({"desk", "asymptotic"}));
    auto* restarts_opt =
        app.add_option("--restarts", g.restarts, "contraction restart budget");
    app.fallthrough();

    Vertex n = 0;
    double c = 0;
    std::string trace_path, config_path, records_path;
    std::uint32_t max_n = 18;
    double c_min = 2, c_max = 12, c_step = 0.5;
    CompareTolerances tol;
    bool enforce = false;

    auto add_nc = [&](CLI::App* cmd) {
        cmd->add_option("-n,--n", n, "vertex count")->required();
        cmd->add_option("-c,--c", c, "mean degree")->required();
    };

    auto* sample = app.add_subcommand("sample", "sample a two-layer digraph");
    add_nc(sample);
    auto* peel_cmd = app.add_subcommand("peel", "run the removal process");
    add_nc(peel_cmd);
    peel_cmd->add_option("--trace", trace_path, "write step trace JSONL");
    auto* phi_cmd = app.add_subcommand("phi", "path-packing deficits");
    add_nc(phi_cmd);
    auto* cycle_cmd = app.add_subcommand("cycle", "construct a long cycle");
    add_nc(cycle_cmd);
    auto* exact_cmd = app.add_subcommand("exact", "exact oracle cross-check");
    add_nc(exact_cmd);
    exact_cmd->add_option("--max-n", max_n, "oracle size cap");
    auto* analytics_cmd =
        app.add_subcommand("analytics", "closed-form prediction table");
    analytics_cmd->add_option("--c-min", c_min, "first c");
    analytics_cmd->add_option("--c-max", c_max, "last c");
    analytics_cmd->add_option("--c-step", c_step, "grid step");
    auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment grid");
    sweep_cmd->add_option("--config", config_path, "key=value config file")
        ->required();
    auto* compare_cmd =
        app.add_subcommand("compare", "records vs closed forms");
    compare_cmd->add_option("--records", records_path, "records JSONL")
        ->required();
    compare_cmd->add_option("--tol-k1", tol.k1_abs, "absolute |K1|/n tolerance");
    compare_cmd->add_option("--tol-phi", tol.phi_rel,
                            "relative phi-density tolerance");
    compare_cmd->add_option("--tol-cycle", tol.cycle_abs,
                            "absolute cycle-fraction tolerance");
    compare_cmd->add_flag("--enforce", enforce,
                          "exit nonzero when a row misses tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return cmd_sample(n, c, g);
        if (peel_cmd->parsed()) return cmd_peel(n, c, trace_path, g);
        if (phi_cmd->parsed()) return cmd_phi(n, c, g);
        if (cycle_cmd->parsed()) return cmd_cycle(n, c, g);
        if (exact_cmd->parsed()) return cmd_exact(n, c, max_n, g);
        if (analytics_cmd->parsed()) return cmd_analytics(c_min, c_max, c_step);
        if (sweep_cmd->parsed())
            return cmd_sweep(config_path, sweep_cmd, g, seed_opt->count() > 0,
                             threads_opt->count() > 0, strict_opt->count() > 0,
                             mode_opt->count() > 0, restarts_opt->count() > 0);
        if (compare_cmd->parsed())
            return cmd_compare(records_path, tol, enforce);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
