#include "longcycle/trial.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "longcycle/analytics.hpp"
#include "longcycle/exact_cycle.hpp"
#include "longcycle/hamilton.hpp"
#include "longcycle/peel.hpp"
#include "longcycle/rng.hpp"
#include "longcycle/tree_pack.hpp"

namespace longcycle {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

} // namespace

std::string TrialRecord::to_json() const {
    nlohmann::json ms = nlohmann::json::object();
    ms["sample"] = ms_sample;
    ms["peel"] = ms_peel;
    ms["pack"] = ms_pack;
    ms["p1"] = ms_phase1;
    ms["p2"] = ms_phase2;
    ms["p3"] = ms_phase3;
    nlohmann::json j = nlohmann::json::object();
    j["n"] = n;
    j["c"] = c;
    j["trial"] = trial;
    j["seed"] = seed;
    j["k1"] = k1_size;
    j["sl"] = s_l_size;
    j["tree_comps"] = tree_component_count;
    j["nontree_vertices"] = nontree_vertex_count;
    j["phi_upper"] = sum_phi_upper;
    j["phi_lower"] = sum_phi_lower;
    j["v_star"] = v_star_size;
    j["cycle"] = cycle_length;
    j["p1"] = phase1_ok;
    j["p2"] = phase2_ok;
    j["p3"] = phase3_ok;
    j["restarts"] = restart_count;
    j["oracle"] = oracle_length;
    j["ms"] = ms;
    j["error"] = error;
    return j.dump();
}

TrialRecord TrialRecord::from_json(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    TrialRecord r;
    r.n = j.at("n").get<Vertex>();
    r.c = j.at("c").get<double>();
    r.trial = j.at("trial").get<std::uint32_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.k1_size = j.at("k1").get<Vertex>();
    r.s_l_size = j.at("sl").get<Vertex>();
    r.tree_component_count = j.at("tree_comps").get<std::uint32_t>();
    r.nontree_vertex_count = j.at("nontree_vertices").get<Vertex>();
    r.sum_phi_upper = j.at("phi_upper").get<std::uint64_t>();
    r.sum_phi_lower = j.at("phi_lower").get<std::uint64_t>();
    r.v_star_size = j.at("v_star").get<Vertex>();
    r.cycle_length = j.at("cycle").get<Vertex>();
    r.phase1_ok = j.at("p1").get<bool>();
    r.phase2_ok = j.at("p2").get<bool>();
    r.phase3_ok = j.at("p3").get<bool>();
    r.restart_count = j.at("restarts").get<std::uint32_t>();
    r.oracle_length = j.at("oracle").get<Vertex>();
    const auto& ms = j.at("ms");
    r.ms_sample = ms.at("sample").get<double>();
    r.ms_peel = ms.at("peel").get<double>();
    r.ms_pack = ms.at("pack").get<double>();
    r.ms_phase1 = ms.at("p1").get<double>();
    r.ms_phase2 = ms.at("p2").get<double>();
    r.ms_phase3 = ms.at("p3").get<double>();
    r.error = j.at("error").get<std::string>();
    return r;
}

TrialRecord run_trial(Vertex n, double c, std::uint64_t seed,
                      const TrialOptions& opts,
                      std::vector<Vertex>* cycle_out) {
    TrialRecord r;
    r.n = n;
    r.c = c;
    r.seed = seed;
    if (cycle_out) cycle_out->clear();
    try {
        ModelParams mp{n, c};
        mp.validate();

        Timer t_sample;
        ColoredDigraph cd = sample_colored(mp, seed);
        r.ms_sample = t_sample.ms();

        Timer t_peel;
        std::vector<Vertex> k1 = giant_component(cd.union_view());
        PeelResult pr = peel(cd, k1);
        std::vector<GammaComponent> comps = gamma_components(pr, cd);
        r.ms_peel = t_peel.ms();
        r.k1_size = static_cast<Vertex>(pr.k1.size());
        r.s_l_size = static_cast<Vertex>(pr.s_l.size());

        Timer t_pack;
        std::uint64_t covered = 0;
        for (const auto& comp : comps) {
            if (!comp.is_tree) {
                r.nontree_vertex_count +=
                    static_cast<Vertex>(comp.vertices.size());
                continue;
            }
            ++r.tree_component_count;
            OrientedTree up = oriented_tree_from_component(
                comp, cd, pr.k1, pr.v1, EligibilityMode::Upper);
            r.sum_phi_upper += phi_dp(up).phi;
            OrientedTree lo = oriented_tree_from_component(
                comp, cd, pr.k1, pr.v1, EligibilityMode::Lower);
            std::uint32_t phi = phi_dp(lo).phi;
            r.sum_phi_lower += phi;
            covered += comp.vertices.size() - phi;
        }
        r.ms_pack = t_pack.ms();
        r.v_star_size = static_cast<Vertex>(pr.v1.size() + covered);

        if (!pr.v1.empty() && r.v_star_size >= 2) {
            PhaseParams pm = opts.asymptotic_n0
                                 ? PhaseParams::asymptotic(r.v_star_size)
                                 : PhaseParams::desk(r.v_star_size);
            if (opts.strict_edges) pm.strict_edges = true;
            pm.restart_budget = opts.restart_budget;
            HamiltonOutcome out = find_long_cycle(cd, pr, comps, pm, seed);
            r.phase1_ok = out.stats.phase1_ok;
            r.phase2_ok = out.stats.phase2_ok;
            r.phase3_ok = out.stats.phase3_ok;
            r.restart_count = out.restarts;
            r.ms_phase1 = out.stats.ms_phase1;
            r.ms_phase2 = out.stats.ms_phase2;
            r.ms_phase3 = out.stats.ms_phase3;
            if (out.success) {
                r.cycle_length = static_cast<Vertex>(out.cycle.size());
                if (cycle_out) *cycle_out = out.cycle;
            }
        }

        if (opts.oracle_check) {
            // exact longest cycle of the working-set-induced union subgraph
            constexpr Vertex kOutside = 0xFFFFFFFFu;
            Digraph whole = cd.union_view();
            std::vector<Vertex> local(cd.n, kOutside);
            for (std::size_t i = 0; i < pr.k1.size(); ++i)
                local[pr.k1[i]] = static_cast<Vertex>(i);
            std::vector<Edge> sub;
            for (const Edge& e : whole.edges)
                if (local[e.first] != kOutside && local[e.second] != kOutside)
                    sub.push_back({local[e.first], local[e.second]});
            Digraph induced = Digraph::from_edges(
                static_cast<Vertex>(pr.k1.size()), std::move(sub));
            r.oracle_length = longest_cycle_exact(induced);
            if (r.oracle_length + r.sum_phi_upper > r.k1_size)
                r.error = "upper_bound_violated";
            else if (r.cycle_length > r.oracle_length)
                r.error = "constructed_exceeds_exact";
        }
    } catch (const std::exception& e) {
        r.error = e.what();
        r.cycle_length = 0;
        if (cycle_out) cycle_out->clear();
    }
    return r;
}

void ExperimentConfig::validate() const {
    for (Vertex n : ns)
        if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    for (double c : cs)
        if (!(c > 0)) throw std::invalid_argument("config: c must be > 0");
    if (trials == 0) throw std::invalid_argument("config: trials must be >= 1");
    if (threads == 0) throw std::invalid_argument("config: threads must be >= 1");
    if (trial.restart_budget == 0)
        throw std::invalid_argument("config: restart_budget must be >= 1");
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument("config: bad integer for " + key + ": " +
                                    value);
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing junk");
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " +
                                    value);
    }
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "0" || value == "false") return false;
    if (value == "1" || value == "true") return true;
    throw std::invalid_argument("config: bad flag for " + key + ": " + value);
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        std::string line = strip(raw);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got: " +
                                        line);
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key == "n") {
            std::uint64_t n = parse_u64(key, value);
            if (n > 0xFFFFFFFFull)
                throw std::invalid_argument("config: n too large: " + value);
            cfg.ns.push_back(static_cast<Vertex>(n));
        } else if (key == "c") {
            cfg.cs.push_back(parse_double(key, value));
        } else if (key == "trials") {
            cfg.trials = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "seed") {
            cfg.master_seed = parse_u64(key, value);
        } else if (key == "threads") {
            cfg.threads = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "restart_budget") {
            cfg.trial.restart_budget =
                static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "strict_edges") {
            cfg.trial.strict_edges = parse_flag(key, value);
        } else if (key == "n0_mode") {
            if (value == "desk")
                cfg.trial.asymptotic_n0 = false;
            else if (value == "asymptotic")
                cfg.trial.asymptotic_n0 = true;
            else
                throw std::invalid_argument(
                    "config: n0_mode must be desk or asymptotic, got: " + value);
        } else if (key == "oracle_check") {
            cfg.trial.oracle_check = parse_flag(key, value);
        } else if (key == "records") {
            cfg.records_path = value;
        } else if (key == "aggregate") {
            cfg.aggregate_path = value;
        } else {
            throw std::invalid_argument("config: unknown key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

namespace {

struct CellStats {
    std::uint64_t trials = 0, successes = 0;
    // running sums in record order; record order is fixed, so so is the CSV
    double k1 = 0, k1_sq = 0, sl = 0, phi_up = 0, phi_lo = 0, vstar = 0;
    double cyc = 0, cyc_sq = 0, restarts = 0, ms = 0;
};

double mean_of(double sum, std::uint64_t n) {
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double sd_of(double sum, double sum_sq, std::uint64_t n) {
    if (n < 2) return 0.0;
    double m = sum / static_cast<double>(n);
    double var = (sum_sq - static_cast<double>(n) * m * m) /
                 static_cast<double>(n - 1);
    return var > 0 ? std::sqrt(var) : 0.0;
}

std::string aggregate_csv(const std::vector<TrialRecord>& records) {
    std::map<std::pair<Vertex, double>, CellStats> cells;
    for (const auto& r : records) {
        CellStats& s = cells[{r.n, r.c}];
        double n = static_cast<double>(r.n);
        ++s.trials;
        double k1 = r.k1_size / n;
        s.k1 += k1;
        s.k1_sq += k1 * k1;
        s.sl += r.s_l_size / n;
        s.phi_up += static_cast<double>(r.sum_phi_upper) / n;
        s.phi_lo += static_cast<double>(r.sum_phi_lower) / n;
        s.vstar += r.v_star_size / n;
        if (r.success()) {
            ++s.successes;
            double cf = r.cycle_length / n;
            s.cyc += cf;
            s.cyc_sq += cf * cf;
        }
        s.restarts += r.restart_count;
        s.ms += r.ms_sample + r.ms_peel + r.ms_pack + r.ms_phase1 +
                r.ms_phase2 + r.ms_phase3;
    }
    std::string out =
        "n,c,trials,successes,failures,mean_k1_frac,sd_k1_frac,mean_sl_frac,"
        "mean_phi_upper_frac,mean_phi_lower_frac,mean_vstar_frac,"
        "mean_cycle_frac,sd_cycle_frac,mean_restarts,mean_ms_total\n";
    for (const auto& [key, s] : cells) {
        out += std::to_string(key.first) + "," + fmt(key.second) + "," +
               std::to_string(s.trials) + "," + std::to_string(s.successes) +
               "," + std::to_string(s.trials - s.successes) + "," +
               fmt(mean_of(s.k1, s.trials)) + "," +
               fmt(sd_of(s.k1, s.k1_sq, s.trials)) + "," +
               fmt(mean_of(s.sl, s.trials)) + "," +
               fmt(mean_of(s.phi_up, s.trials)) + "," +
               fmt(mean_of(s.phi_lo, s.trials)) + "," +
               fmt(mean_of(s.vstar, s.trials)) + "," +
               fmt(mean_of(s.cyc, s.successes)) + "," +
               fmt(sd_of(s.cyc, s.cyc_sq, s.successes)) + "," +
               fmt(mean_of(s.restarts, s.trials)) + "," +
               fmt(mean_of(s.ms, s.trials)) + "\n";
    }
    return out;
}

} // namespace

SweepResult sweep(const ExperimentConfig& cfg) {
    cfg.validate();

    struct Task {
        Vertex n;
        double c;
        std::uint32_t trial;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    std::uint64_t index = 0;
    for (Vertex n : cfg.ns)
        for (double c : cfg.cs)
            for (std::uint32_t t = 0; t < cfg.trials; ++t, ++index)
                tasks.push_back({n, c, t, derive_seed(cfg.master_seed, index)});

    SweepResult out;
    out.records.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            TrialRecord r = run_trial(t.n, t.c, t.seed, cfg.trial);
            r.trial = t.trial;
            out.records[i] = std::move(r);
        }
    };
    std::size_t workers = std::min<std::size_t>(cfg.threads, tasks.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(out.records.begin(), out.records.end(),
              [](const TrialRecord& a, const TrialRecord& b) {
                  return std::make_tuple(a.n, a.c, a.trial) <
                         std::make_tuple(b.n, b.c, b.trial);
              });
    out.aggregate_csv = aggregate_csv(out.records);

    if (!cfg.records_path.empty()) {
        std::ofstream f(cfg.records_path);
        if (!f) throw std::runtime_error("sweep: cannot write " +
                                         cfg.records_path);
        for (const auto& r : out.records) f << r.to_json() << '\n';
        if (!f) throw std::runtime_error("sweep: write failed on " +
                                         cfg.records_path);
    }
    if (!cfg.aggregate_path.empty()) {
        std::ofstream f(cfg.aggregate_path);
        if (!f) throw std::runtime_error("sweep: cannot write " +
                                         cfg.aggregate_path);
        f << out.aggregate_csv;
        if (!f) throw std::runtime_error("sweep: write failed on " +
                                         cfg.aggregate_path);
    }
    return out;
}

CompareReport compare(const std::vector<TrialRecord>& records,
                      const CompareTolerances& tol) {
    struct Acc {
        std::uint64_t trials = 0, successes = 0;
        double k1 = 0, phi = 0, cyc = 0;
    };
    std::map<double, Acc> by_c;
    for (const auto& r : records) {
        Acc& a = by_c[r.c];
        double n = static_cast<double>(r.n);
        ++a.trials;
        a.k1 += r.k1_size / n;
        a.phi += static_cast<double>(r.sum_phi_upper) / n;
        if (r.success()) {
            ++a.successes;
            a.cyc += r.cycle_length / n;
        }
    }

    CompareReport rep;
    for (const auto& [c, a] : by_c) {
        CompareRow row;
        row.c = c;
        row.trials = a.trials;
        row.successes = a.successes;
        row.measured_k1_frac = mean_of(a.k1, a.trials);
        row.measured_phi_frac = mean_of(a.phi, a.trials);
        row.measured_cycle_frac = mean_of(a.cyc, a.successes);
        try {
            row.predicted_k1_frac = k1_fraction(c);
            row.predicted_phi_frac = phi_density_prediction(c);
            row.predicted_cycle_frac = corollary_bound(c);
            row.has_prediction = true;
        } catch (const std::domain_error&) {
            row.has_prediction = false;
        }
        if (row.has_prediction) {
            bool k1_ok = std::abs(row.measured_k1_frac -
                                  row.predicted_k1_frac) <= tol.k1_abs;
            bool phi_ok =
                std::abs(row.measured_phi_frac - row.predicted_phi_frac) <=
                std::max(tol.phi_rel * row.predicted_phi_frac, tol.phi_abs);
            bool cyc_ok = std::abs(row.measured_cycle_frac -
                                   row.predicted_cycle_frac) <= tol.cycle_abs;
            row.ok = k1_ok && phi_ok && cyc_ok;
            rep.all_ok = rep.all_ok && row.ok;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

std::string CompareReport::to_csv() const {
    std::string out =
        "c,trials,successes,measured_k1_frac,predicted_k1_frac,"
        "measured_phi_frac,predicted_phi_frac,measured_cycle_frac,"
        "predicted_cycle_frac,has_prediction,ok\n";
    for (const auto& r : rows) {
        out += fmt(r.c) + "," + std::to_string(r.trials) + "," +
               std::to_string(r.successes) + "," + fmt(r.measured_k1_frac) +
               "," + fmt(r.predicted_k1_frac) + "," +
               fmt(r.measured_phi_frac) + "," + fmt(r.predicted_phi_frac) +
               "," + fmt(r.measured_cycle_frac) + "," +
               fmt(r.predicted_cycle_frac) + "," +
               (r.has_prediction ? "1" : "0") + "," + (r.ok ? "1" : "0") +
               "\n";
    }
    return out;
}

} // namespace longcycle
