#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config_io.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "render.hpp"

namespace pmelect {

struct ExperimentSpec {
    std::string family;  // empty when config is set
    GeneratorParams params;
    std::optional<Configuration> config;
    bool config_has_seed = false;  // otherwise chirality follows the run seed
    std::vector<std::string> modes{"sync"};
    std::vector<std::uint64_t> seeds{0};
    std::uint64_t stability_window = 0;  // 0: 10 * n activation units
    std::uint64_t tick_budget = 0;       // 0: default_tick_budget()
    std::string out_dir = ".";
    bool trace = true;
    bool render_svg = false;
};

struct RunRecord {
    Configuration config;  // with chirality resolved
    std::string mode;
    std::uint64_t seed = 0;
    Metrics metrics;
    bool quiescent = false;
    int leaders = 0;
    std::string tree_error;
    nlohmann::json final_state;
    Snapshot snapshot;

    bool ok() const { return quiescent && leaders == 1 && tree_error.empty(); }
};

inline Configuration resolve_config(const ExperimentSpec& spec, std::uint64_t seed) {
    Configuration c = spec.config ? *spec.config : generate(spec.family, spec.params);
    if (!spec.config || !spec.config_has_seed) c.seed = seed;
    assign_chirality_from_seed(c);
    return c;
}

inline const char* role_name(GreyRole r) {
    switch (r) {
        case GreyRole::Undecided: return "Undecided";
        case GreyRole::Leader: return "Leader";
        case GreyRole::Follower: return "Follower";
    }
    return "?";
}

inline nlohmann::json metrics_json(const Metrics& m) {
    nlohmann::json j;
    j["ticks"] = m.ticks;
    j["activation_units"] = m.activation_units;
    j["activations"] = m.activations;
    j["messages_sent"] = m.messages_sent;
    j["merges"] = m.merges;
    j["comparisons"] = m.comparisons;
    j["max_same_kind_in_flight"] = m.max_same_kind_in_flight;
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& [c, r] : m.rounds_per_component) rounds.push_back({{"root", {c.x, c.y}}, {"rounds", r}});
    j["rounds_per_component"] = rounds;
    return j;
}

inline nlohmann::json final_json(const oracle::ElectionWorld& w, const RunRecord& r) {
    nlohmann::json j;
    j["config"] = config_to_json(w.config());
    j["mode"] = r.mode;
    j["seed"] = r.seed;
    j["quiescent"] = r.quiescent;
    nlohmann::json parts = nlohmann::json::array();
    nlohmann::json leaders = nlohmann::json::array();
    for (int i = 0; i < w.size(); ++i) {
        const auto& s = w.state(i);
        const NodeCoord c = w.coord(i);
        nlohmann::json p;
        p["node"] = {c.x, c.y};
        p["chirality"] = std::string(1, chirality_char(w.config().chirality[static_cast<std::size_t>(i)]));
        p["role"] = role_name(s.grey.role);
        if (s.tree.parent >= 0) {
            const NodeCoord q = w.coord(oracle::neighbor_index(w, i, s.tree.parent));
            p["parent"] = {q.x, q.y};
        } else {
            p["parent"] = nullptr;
        }
        parts.push_back(p);
        if (s.is_leader()) leaders.push_back({c.x, c.y});
    }
    j["particles"] = parts;
    j["leaders"] = leaders;
    j["metrics"] = metrics_json(r.metrics);
    j["checks"] = {{"unique_leader", r.leaders == 1}, {"tree", r.tree_error.empty()}, {"tree_error", r.tree_error}};
    return j;
}

inline Snapshot snapshot_of(const oracle::ElectionWorld& w) {
    Snapshot s;
    s.config = w.config();
    for (const auto& st : w.states()) {
        s.parent_port.push_back(st.tree.parent);
        s.leader.push_back(st.is_leader());
    }
    return s;
}

// Runs one (configuration, mode, seed) to quiescence. Trace lines go to trace when given.
inline RunRecord run_once(const Configuration& config, const std::string& mode, std::uint64_t seed,
                          std::uint64_t stability_window = 0, std::uint64_t tick_budget = 0,
                          std::ostream* trace = nullptr) {
    RunRecord r;
    r.mode = mode;
    r.seed = seed;
    oracle::ElectionWorld w(config, seed);
    r.config = w.config();
    if (trace) w.set_trace([trace](const std::string& line) { *trace << line << '\n'; });
    const std::uint64_t window = stability_window ? stability_window : 10 * config.size();
    const std::uint64_t budget = tick_budget ? tick_budget : default_tick_budget();
    try {
        r.metrics = w.run_to_quiescence(parse_mode(mode), window, budget);
        r.quiescent = true;
    } catch (const NonQuiescent& e) {
        r.metrics = e.metrics;
    }
    r.leaders = oracle::leader_count(w);
    std::vector<int> all(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    r.tree_error = oracle::tree_axioms(w, all);
    r.final_state = final_json(w, r);
    r.snapshot = snapshot_of(w);
    return r;
}

inline const char* metrics_csv_header() { return "n,mode,seed,ticks,activation_units,merges,comparisons"; }

inline std::string metrics_csv_row(const RunRecord& r) {
    return std::to_string(r.config.size()) + "," + r.mode + "," + std::to_string(r.seed) + "," +
           std::to_string(r.metrics.ticks) + "," + std::to_string(r.metrics.activation_units) + "," +
           std::to_string(r.metrics.merges) + "," + std::to_string(r.metrics.comparisons);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

// Runs every (mode, seed) pair. A single run writes its artifacts directly into out_dir;
// several runs get one sub-directory each and share one metrics.csv. Returns the number of failed runs.
inline int run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    const fs::path out(spec.out_dir);
    fs::create_directories(out);
    const bool single = spec.modes.size() * spec.seeds.size() == 1;
    std::string csv = std::string(metrics_csv_header()) + "\n";
    int failed = 0;
    for (const auto& mode : spec.modes) {
        parse_mode(mode);
        for (const auto seed : spec.seeds) {
            const Configuration c = resolve_config(spec, seed);
            const fs::path dir = single ? out : out / (mode + "_seed" + std::to_string(seed));
            fs::create_directories(dir);
            std::ofstream trace;
            if (spec.trace) trace.open(dir / "trace.log", std::ios::binary);
            RunRecord r = run_once(c, mode, seed, spec.stability_window, spec.tick_budget, spec.trace ? &trace : nullptr);
            write_text(dir / "final.json", r.final_state.dump(2) + "\n");
            if (spec.render_svg) write_text(dir / "render.svg", render_svg(r.snapshot));
            if (!single) write_text(dir / "metrics.csv", std::string(metrics_csv_header()) + "\n" + metrics_csv_row(r) + "\n");
            csv += metrics_csv_row(r) + "\n";
            if (!r.ok()) ++failed;
            if (log)
                *log << "n=" << c.size() << " mode=" << mode << " seed=" << seed << " leaders=" << r.leaders
                     << (r.quiescent ? "" : " NON-QUIESCENT") << (r.tree_error.empty() ? "" : " tree: " + r.tree_error)
                     << "\n";
        }
    }
    write_text(out / "metrics.csv", csv);
    return failed;
}

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline GeneratorParams params_from_json(const nlohmann::json& j) {
    GeneratorParams p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw SpecError("'params' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number_integer()) throw SpecError("parameter '" + it.key() + "' must be an integer");
        p[it.key()] = it.value().get<std::int64_t>();
    }
    return p;
}

// Sweep file: {"out": dir, "runs": [{"family"|"config", "params", "modes", "seeds", "stability_window",
// "tick_budget", "trace", "render"}]}. Relative config paths resolve against the sweep file.
inline std::vector<ExperimentSpec> sweep_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
    static const std::set<std::string> top{"out", "runs"};
    static const std::set<std::string> run_keys{"name",        "family", "params", "config", "modes", "seeds",
                                                "stability_window", "tick_budget", "trace", "render"};
    if (!j.is_object()) throw SpecError("sweep spec must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!top.count(it.key())) throw SpecError("unknown field '" + it.key() + "'");
    if (!j.contains("runs") || !j["runs"].is_array()) throw SpecError("missing 'runs' array");
    const std::filesystem::path out = j.value("out", std::string("sweep_out"));
    std::vector<ExperimentSpec> specs;
    int index = 0;
    for (const auto& r : j["runs"]) {
        if (!r.is_object()) throw SpecError("each run must be an object");
        for (auto it = r.begin(); it != r.end(); ++it)
            if (!run_keys.count(it.key())) throw SpecError("unknown run field '" + it.key() + "'");
        ExperimentSpec s;
        if (r.contains("config")) {
            std::filesystem::path p = r["config"].get<std::string>();
            if (p.is_relative()) p = base / p;
            std::ifstream in(p);
            if (!in) throw SpecError("cannot open " + p.string());
            const nlohmann::json cj = nlohmann::json::parse(in);
            s.config = config_from_json(cj);
            s.config_has_seed = cj.contains("seed");
        } else if (r.contains("family")) {
            s.family = r["family"].get<std::string>();
            s.params = params_from_json(r.value("params", nlohmann::json()));
        } else {
            throw SpecError("run needs 'family' or 'config'");
        }
        if (r.contains("modes")) s.modes = r["modes"].get<std::vector<std::string>>();
        if (r.contains("seeds")) s.seeds = r["seeds"].get<std::vector<std::uint64_t>>();
        s.stability_window = r.value("stability_window", std::uint64_t{0});
        s.tick_budget = r.value("tick_budget", std::uint64_t{0});
        s.trace = r.value("trace", false);
        s.render_svg = r.value("render", false);
        const std::string name = r.value("name", (s.family.empty() ? std::string("config") : s.family) + "_" +
                                                     std::to_string(index));
        s.out_dir = (out / name).string();
        specs.push_back(std::move(s));
        ++index;
    }
    return specs;
}

}  // namespace pmelect
