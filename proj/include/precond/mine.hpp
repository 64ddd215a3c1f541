// Validation and ranking: filter candidate pools by execution against the
// demonstrations, build satisfaction sets over the grounded instance grid,
// cluster set-equivalent candidates, and keep the anti-chain of most
// discriminative clusters. The conjunction over the winners is the mined
// precondition.

#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "precond/exec.hpp"
#include "precond/schema.hpp"
#include "precond/synth.hpp"
#include "precond/trajectory.hpp"

namespace precond {

struct MineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grounded instance grid and satisfaction sets

/// One grounded instance: a prefix of a trajectory plus an argument binding
/// for the action under consideration.
struct GroundedInstance {
    std::string trajectory_id;
    size_t step = 0;
    ArgBinding binding;

    friend bool operator==(const GroundedInstance& a, const GroundedInstance& b) {
        return a.trajectory_id == b.trajectory_id && a.step == b.step && a.binding == b.binding;
    }
    friend bool operator<(const GroundedInstance& a, const GroundedInstance& b) {
        if (a.trajectory_id != b.trajectory_id) return a.trajectory_id < b.trajectory_id;
        if (a.step != b.step) return a.step < b.step;
        return a.binding < b.binding;
    }
};

/// Enumerates (trajectory, step, binding) triples for one action over a
/// corpus: steps run from 0 (empty prefix) through end-of-trajectory, and
/// bindings come from action_groundings.
struct InstanceGrid {
    const DomainSchema* schema = nullptr;
    const Corpus* corpus = nullptr;
    const FunctionDecl* action = nullptr;
    std::vector<ArgBinding> bindings;
    std::vector<size_t> offsets;  // per-trajectory start index
    size_t total = 0;

    static std::shared_ptr<const InstanceGrid> build(const DomainSchema& schema,
                                                     const Corpus& corpus,
                                                     const FunctionDecl& action) {
        auto g = std::make_shared<InstanceGrid>();
        g->schema = &schema;
        g->corpus = &corpus;
        g->action = &action;
        g->bindings = action_groundings(schema, action);
        size_t at = 0;
        for (const auto& t : corpus.trajectories) {
            g->offsets.push_back(at);
            at += (t.calls.size() + 1) * g->bindings.size();
        }
        g->total = at;
        return g;
    }

    size_t index(size_t traj, size_t step, size_t binding) const {
        return offsets[traj] + step * bindings.size() + binding;
    }

    GroundedInstance instance_at(size_t flat) const {
        size_t traj = offsets.size() - 1;
        while (offsets[traj] > flat) --traj;
        const size_t rel = flat - offsets[traj];
        return {corpus->trajectories[traj].id, rel / bindings.size(),
                bindings[rel % bindings.size()]};
    }
};

/// Dense bit vector sized to one instance grid.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    void set(size_t i) { words_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    size_t size() const { return n_; }

    size_t count() const {
        size_t c = 0;
        for (uint64_t w : words_) c += static_cast<size_t>(__builtin_popcountll(w));
        return c;
    }

    bool subset_of(const Bitset& other) const {
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }
    bool strict_subset_of(const Bitset& other) const {
        return subset_of(other) && words_ != other.words_;
    }

    friend bool operator==(const Bitset& a, const Bitset& b) { return a.words_ == b.words_; }
    friend bool operator<(const Bitset& a, const Bitset& b) { return a.words_ < b.words_; }

private:
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

struct SatisfactionSet {
    std::string action;
    ExprPtr expr;
    std::shared_ptr<const InstanceGrid> grid;
    Bitset bits;

    size_t count() const { return bits.count(); }

    std::vector<GroundedInstance> instances() const {
        std::vector<GroundedInstance> out;
        for (size_t i = 0; i < bits.size(); ++i)
            if (bits.test(i)) out.push_back(grid->instance_at(i));
        return out;
    }
};

/// Evaluates `expr` at every grounded instance. The replay table carries the
/// per-step states; it must have been built from the same corpus.
inline Bitset satisfaction_bits(const ExprPtr& expr, const InstanceGrid& grid,
                                const ReplayTable& replays) {
    Bitset bits(grid.total);
    for (size_t ti = 0; ti < grid.corpus->trajectories.size(); ++ti) {
        const auto& snaps = replays.states[ti];
        for (size_t j = 0; j < snaps.size(); ++j) {
            for (size_t bi = 0; bi < grid.bindings.size(); ++bi) {
                BindingView binding{grid.action, &grid.bindings[bi]};
                if (eval_expr(*expr, snaps[j], binding)) bits.set(grid.index(ti, j, bi));
            }
        }
    }
    return bits;
}

inline SatisfactionSet satisfaction_set(const DomainSchema& schema, const ExprPtr& expr,
                                        const FunctionDecl& action, const Corpus& corpus) {
    type_check(*expr, schema, action);
    auto grid = InstanceGrid::build(schema, corpus, action);
    auto replays = ReplayTable::build(schema, corpus);
    return {action.name, expr, grid, satisfaction_bits(expr, *grid, replays)};
}

// ---------------------------------------------------------------------------
// Validation

/// Keeps exactly the typed candidates whose installed assertion executes ok
/// on every demonstration trajectory, in pool order. Unparseable entries and
/// execution failures are filtered, not errors.
inline std::vector<CandidateEntry> validate(const DomainSchema& schema,
                                            const CandidatePool& pool, const Corpus& demos) {
    std::vector<CandidateEntry> survivors;
    for (const auto& entry : pool.candidates) {
        if (entry.unparseable()) continue;
        bool ok = true;
        for (const auto& traj : demos.trajectories) {
            if (!execute_with_precondition(schema, traj, pool.action, entry.expr).ok()) {
                ok = false;
                break;
            }
        }
        if (ok) survivors.push_back(entry);
    }
    return survivors;
}

// ---------------------------------------------------------------------------
// Ranking (the anti-chain of minimal satisfaction sets)

struct RankedResult {
    std::string action;
    std::vector<CandidateEntry> valid;
    std::vector<std::vector<size_t>> clusters;  // partition of valid, by index
    std::vector<size_t> winners;                // winning cluster ids
    std::vector<CandidateEntry> opt;            // one representative per winner
    ExprPtr conjunction;                        // AND over opt; TRUE when empty
    std::vector<std::string> flags;             // "no candidates", per-action errors
    size_t initial_count = 0;
    size_t unparseable_count = 0;
};

inline ExprPtr conjunction_of(const std::vector<CandidateEntry>& entries) {
    if (entries.empty()) return make_true();
    ExprPtr acc = entries.front().expr;
    for (size_t i = 1; i < entries.size(); ++i) acc = make_and(acc, entries[i].expr);
    return acc;
}

/// Clusters validated candidates by identical satisfaction set, then keeps
/// every cluster whose set has no strict subset among the other clusters.
/// Representatives are chosen smallest-AST-first with lexicographic and then
/// positional tie-breaks, so results are reproducible run to run.
inline RankedResult rank(const DomainSchema& schema, const std::vector<CandidateEntry>& valid,
                         const FunctionDecl& action, const Corpus& demos) {
    RankedResult result;
    result.action = action.name;
    result.valid = valid;

    auto grid = InstanceGrid::build(schema, demos, action);
    auto replays = ReplayTable::build(schema, demos);

    std::vector<Bitset> sets;
    sets.reserve(valid.size());
    for (const auto& entry : valid) sets.push_back(satisfaction_bits(entry.expr, *grid, replays));

    std::map<Bitset, size_t> cluster_of;
    std::vector<Bitset> cluster_sets;
    for (size_t i = 0; i < valid.size(); ++i) {
        auto it = cluster_of.find(sets[i]);
        if (it == cluster_of.end()) {
            it = cluster_of.emplace(sets[i], result.clusters.size()).first;
            result.clusters.push_back({});
            cluster_sets.push_back(sets[i]);
        }
        result.clusters[it->second].push_back(i);
    }

    for (size_t c = 0; c < result.clusters.size(); ++c) {
        bool subsumed = false;
        for (size_t other = 0; other < result.clusters.size(); ++other) {
            if (other != c && cluster_sets[other].strict_subset_of(cluster_sets[c])) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) result.winners.push_back(c);
    }

    for (size_t c : result.winners) {
        const auto& members = result.clusters[c];
        size_t best = members.front();
        for (size_t m : members) {
            const int sm = expr_size(valid[m].expr);
            const int sb = expr_size(valid[best].expr);
            if (sm != sb) {
                if (sm < sb) best = m;
                continue;
            }
            const std::string tm = to_text(valid[m].expr);
            const std::string tb = to_text(valid[best].expr);
            if (tm < tb) best = m;
        }
        result.opt.push_back(valid[best]);
    }
    result.conjunction = conjunction_of(result.opt);
    if (valid.empty()) result.flags.push_back("no candidates");
    return result;
}

// ---------------------------------------------------------------------------
// Whole-pipeline mining

struct MineConfig {
    GeneratorConfig generator;
    bool use_model = false;
    size_t jobs = 1;
};

struct MiningReport {
    std::string schema_name;
    MineConfig config;
    std::vector<RankedResult> results;  // in schema action order

    const RankedResult* find(const std::string& action) const {
        for (const auto& r : results)
            if (r.action == action) return &r;
        return nullptr;
    }
};

namespace detail {

inline void parallel_for(size_t n, size_t jobs, const std::function<void(size_t)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    const size_t count = std::min(jobs, n);
    for (size_t w = 0; w < count; ++w) {
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace detail

/// Runs generation, validation and ranking independently for every action.
/// Per-action generator failures are recorded in that action's flags without
/// aborting the rest.
inline MiningReport mine_all(const DomainSchema& schema, const Corpus& demos,
                             const MineConfig& cfg, CompletionClient* client = nullptr) {
    if (demos.trajectories.empty()) throw MineError("mine_all requires demonstrations");
    MiningReport report;
    report.schema_name = schema.name;
    report.config = cfg;

    const auto actions = schema.actions();
    report.results.resize(actions.size());
    detail::parallel_for(actions.size(), cfg.jobs, [&](size_t i) {
        const FunctionDecl& action = *actions[i];
        RankedResult& out = report.results[i];
        try {
            CandidatePool pool;
            if (cfg.use_model) {
                if (!client) throw ModelError("model generator selected but no endpoint configured");
                pool = sample_candidates_via_model(schema, action, demos, cfg.generator, *client);
            } else {
                pool = enumerate_candidates(schema, action, cfg.generator);
            }
            auto valid = validate(schema, pool, demos);
            out = rank(schema, valid, action, demos);
            out.initial_count = pool.candidates.size();
            out.unparseable_count = pool.candidates.size() - pool.typed_count();
        } catch (const std::exception& ex) {
            out.action = action.name;
            out.conjunction = make_true();
            out.flags.push_back(std::string("generator error: ") + ex.what());
        }
    });
    return report;
}

/// Mines a supplied pool set (e.g. loaded from a file) instead of generating.
inline MiningReport mine_pools(const DomainSchema& schema, const Corpus& demos,
                               const std::vector<CandidatePool>& pools) {
    MiningReport report;
    report.schema_name = schema.name;
    for (const auto& pool : pools) {
        const auto* action = schema.find_function(pool.action);
        if (!action) continue;
        auto valid = validate(schema, pool, demos);
        RankedResult r = rank(schema, valid, *action, demos);
        r.initial_count = pool.candidates.size();
        r.unparseable_count = pool.candidates.size() - pool.typed_count();
        report.results.push_back(std::move(r));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::ordered_json mining_report_to_json(const MiningReport& report,
                                                    const std::string& manifest_digest = {}) {
    nlohmann::ordered_json j;
    if (!manifest_digest.empty()) j["manifest_digest"] = manifest_digest;
    j["schema"] = report.schema_name;
    nlohmann::ordered_json cfg;
    cfg["generator"] = report.config.use_model ? "model" : "enumerated";
    cfg["max_depth"] = report.config.generator.max_depth;
    cfg["max_pool"] = report.config.generator.max_pool;
    if (report.config.use_model) {
        cfg["samples_per_demo"] = report.config.generator.samples_per_demo;
        cfg["temperature"] = report.config.generator.temperature;
    }
    j["config"] = cfg;
    nlohmann::ordered_json actions = nlohmann::ordered_json::object();
    for (const auto& r : report.results) {
        nlohmann::ordered_json ja;
        ja["initial_count"] = r.initial_count;
        ja["unparseable_count"] = r.unparseable_count;
        ja["valid"] = nlohmann::ordered_json::array();
        for (const auto& v : r.valid) ja["valid"].push_back(to_text(v.expr));
        ja["clusters"] = nlohmann::ordered_json::array();
        for (const auto& cluster : r.clusters) {
            nlohmann::ordered_json jc = nlohmann::ordered_json::array();
            for (size_t m : cluster) jc.push_back(to_text(r.valid[m].expr));
            ja["clusters"].push_back(jc);
        }
        ja["opt"] = nlohmann::ordered_json::array();
        for (const auto& o : r.opt) ja["opt"].push_back(to_text(o.expr));
        ja["conjunction"] = r.conjunction ? to_text(r.conjunction) : "true";
        if (!r.flags.empty()) ja["flags"] = r.flags;
        actions[r.action] = ja;
    }
    j["actions"] = actions;
    return j;
}

/// Human-readable staged rendering: initial pool, survivors, clusters,
/// winners, then the chosen representatives.
inline std::string mining_report_to_text(const MiningReport& report) {
    std::string out;
    out += "mining report: " + report.schema_name + "\n";
    for (const auto& r : report.results) {
        out += "\n== " + r.action + " ==\n";
        out += "initial pool: " + std::to_string(r.initial_count) + " (" +
               std::to_string(r.unparseable_count) + " unparseable)\n";
        for (const auto& f : r.flags) out += "note: " + f + "\n";
        out += "valid after execution (" + std::to_string(r.valid.size()) + "):\n";
        for (const auto& v : r.valid) {
            out += "    " + (v.source == "enumerated" ? to_text(v.expr) : v.raw);
            out += "\n";
        }
        for (size_t c = 0; c < r.clusters.size(); ++c) {
            const bool won =
                std::find(r.winners.begin(), r.winners.end(), c) != r.winners.end();
            out += "cluster " + std::to_string(c) + (won ? " (kept)" : " (subsumed)") + ":\n";
            for (size_t m : r.clusters[c]) {
                const auto& v = r.valid[m];
                out += "    " + (v.source == "enumerated" ? to_text(v.expr) : v.raw) + "\n";
            }
        }
        out += "opt:\n";
        for (const auto& o : r.opt) out += "    " + to_text(o.expr) + "\n";
        out += "conjunction: " + std::string(r.conjunction ? to_text(r.conjunction) : "true") +
               "\n";
    }
    return out;
}

/// Loads the per-action conjunctions of a mining report file for use as a
/// precondition map.
inline std::map<std::string, ExprPtr> load_mined_conjunctions(const std::string& path,
                                                              const DomainSchema& schema) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open mining report '" + path + "'");
    nlohmann::ordered_json j;
    f >> j;
    std::map<std::string, ExprPtr> out;
    for (const auto& [action, ja] : j.at("actions").items()) {
        const auto* fn = schema.find_function(action);
        if (!fn) throw SchemaError("mining report references unknown action '" + action + "'");
        out[action] = parse_expr(ja.at("conjunction").get<std::string>(), schema, *fn);
    }
    return out;
}

}  // namespace precond
