// Test-side oracles, independent of the implementation paths they check:
// a brute-force subsumption ranking over materialized instance sets, random
// schema/corpus/pool fixtures, and a direct conjunction-equivalence scan.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "precond/exec.hpp"
#include "precond/mine.hpp"
#include "precond/rng.hpp"
#include "precond/schema.hpp"
#include "precond/synth.hpp"
#include "precond/trajectory.hpp"

namespace support {

using namespace precond;

// ---------------------------------------------------------------------------
// Brute-force ranking over std::set<GroundedInstance>

struct OracleResult {
    std::vector<std::vector<size_t>> clusters;
    std::vector<size_t> winners;
    std::vector<size_t> representatives;  // valid-index per winner
};

inline std::set<GroundedInstance> materialized_set(const DomainSchema& schema,
                                                   const ExprPtr& expr,
                                                   const FunctionDecl& action,
                                                   const Corpus& corpus) {
    std::set<GroundedInstance> out;
    const auto bindings = action_groundings(schema, action);
    for (const auto& traj : corpus.trajectories) {
        for (size_t j = 0; j <= traj.calls.size(); ++j) {
            State state = replay(schema, traj, j);
            for (const auto& b : bindings) {
                BindingView view{&action, &b};
                if (eval_expr(*expr, state, view)) out.insert({traj.id, j, b});
            }
        }
    }
    return out;
}

inline OracleResult brute_force_rank(const DomainSchema& schema,
                                     const std::vector<CandidateEntry>& valid,
                                     const FunctionDecl& action, const Corpus& corpus) {
    OracleResult result;
    std::vector<std::set<GroundedInstance>> sets;
    sets.reserve(valid.size());
    for (const auto& v : valid)
        sets.push_back(materialized_set(schema, v.expr, action, corpus));

    std::vector<int> cluster_of(valid.size(), -1);
    for (size_t i = 0; i < valid.size(); ++i) {
        if (cluster_of[i] >= 0) continue;
        const size_t id = result.clusters.size();
        result.clusters.push_back({i});
        cluster_of[i] = static_cast<int>(id);
        for (size_t j = i + 1; j < valid.size(); ++j)
            if (cluster_of[j] < 0 && sets[j] == sets[i]) {
                cluster_of[j] = static_cast<int>(id);
                result.clusters[id].push_back(j);
            }
    }

    for (size_t c = 0; c < result.clusters.size(); ++c) {
        const auto& mine = sets[result.clusters[c][0]];
        bool subsumed = false;
        for (size_t other = 0; other < result.clusters.size() && !subsumed; ++other) {
            if (other == c) continue;
            const auto& theirs = sets[result.clusters[other][0]];
            if (theirs.size() < mine.size() &&
                std::includes(mine.begin(), mine.end(), theirs.begin(), theirs.end()))
                subsumed = true;
        }
        if (!subsumed) result.winners.push_back(c);
    }

    for (size_t c : result.winners) {
        size_t best = result.clusters[c].front();
        for (size_t m : result.clusters[c]) {
            const int sm = expr_size(valid[m].expr), sb = expr_size(valid[best].expr);
            if (sm < sb || (sm == sb && to_text(valid[m].expr) < to_text(valid[best].expr)))
                best = m;
        }
        result.representatives.push_back(best);
    }
    return result;
}

inline bool same_ranking(const DomainSchema& schema, const RankedResult& fast,
                         const OracleResult& slow, const FunctionDecl& action,
                         const Corpus& corpus) {
    (void)schema;
    (void)action;
    (void)corpus;
    if (fast.clusters != slow.clusters) return false;
    if (fast.winners != slow.winners) return false;
    if (fast.opt.size() != slow.representatives.size()) return false;
    for (size_t i = 0; i < fast.opt.size(); ++i)
        if (!expr_equal(fast.opt[i].expr, fast.valid[slow.representatives[i]].expr))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Conjunction equivalence: AND over opt vs AND over valid, every instance

inline size_t conjunction_mismatches(const DomainSchema& schema, const RankedResult& r,
                                     const FunctionDecl& action, const Corpus& corpus) {
    const auto bindings = action_groundings(schema, action);
    size_t mismatches = 0;
    for (const auto& traj : corpus.trajectories) {
        for (size_t j = 0; j <= traj.calls.size(); ++j) {
            State state = replay(schema, traj, j);
            for (const auto& b : bindings) {
                BindingView view{&action, &b};
                bool over_opt = true;
                for (const auto& o : r.opt) over_opt &= eval_expr(*o.expr, state, view);
                bool over_valid = true;
                for (const auto& v : r.valid) over_valid &= eval_expr(*v.expr, state, view);
                if (over_opt != over_valid) ++mismatches;
            }
        }
    }
    return mismatches;
}

// ---------------------------------------------------------------------------
// Random small fixtures for the oracle-equivalence property

struct MiningFixture {
    DomainSchema schema;
    Corpus corpus;
    std::string action;
    CandidatePool pool;
};

inline MiningFixture random_mining_fixture(Rng& rng, size_t max_pool) {
    MiningFixture fx;
    fx.schema.name = "randomized";
    const size_t flags = 2 + rng.index(3);
    for (size_t i = 0; i < flags; ++i)
        fx.schema.state_vars.push_back(
            {"flag" + std::to_string(i), StateVarKind::BoolFlag, "self."});
    fx.schema.state_vars.push_back({"marks", StateVarKind::BoolMap, "self."});
    fx.schema.vocabularies["keys"] = {"k0", "k1", "k2"};

    for (size_t i = 0; i < flags; ++i) {
        FunctionDecl set_on, set_off;
        set_on.name = "obs.on" + std::to_string(i);
        set_on.effects = {{"flag" + std::to_string(i), EffectOp::SetTrue, {}, {}, {}}};
        fx.schema.functions.push_back(set_on);
        set_off.name = "obs.off" + std::to_string(i);
        set_off.effects = {{"flag" + std::to_string(i), EffectOp::SetFalse, {}, {}, {}}};
        fx.schema.functions.push_back(set_off);
    }
    FunctionDecl mark;
    mark.name = "obs.mark";
    mark.params = {{"key", "keys", false}};
    mark.effects = {{"marks", EffectOp::SetTrue, {{false, "key"}}, {}, {}}};
    fx.schema.functions.push_back(mark);

    FunctionDecl act;
    act.name = "agent.act";
    act.kind = FunctionKind::Action;
    act.params = {{"key", "keys", false}};
    fx.schema.functions.push_back(act);
    validate_schema(fx.schema);

    // random trajectories of observation calls with occasional actions
    fx.corpus.schema_name = fx.schema.name;
    const size_t trajs = 1 + rng.index(3);
    for (size_t t = 0; t < trajs; ++t) {
        Trajectory traj;
        traj.id = "t" + std::to_string(t);
        const size_t len = 3 + rng.index(8);
        for (size_t i = 0; i < len; ++i) {
            const size_t pick = rng.index(fx.schema.functions.size());
            const FunctionDecl& fn = fx.schema.functions[pick];
            Call call;
            call.fn = fn.name;
            for (const auto& p : fn.params) call.args.push_back(rng.pick(fx.schema.vocab(p.vocab)));
            traj.calls.push_back(call);
        }
        fx.corpus.trajectories.push_back(traj);
    }

    fx.action = "agent.act";
    GeneratorConfig cfg;
    cfg.max_pool = 1u << 20;
    CandidatePool all = enumerate_candidates(fx.schema, *fx.schema.find_function(fx.action), cfg);
    // random subset, order preserved
    fx.pool.action = fx.action;
    for (const auto& c : all.candidates) {
        if (fx.pool.candidates.size() >= max_pool) break;
        if (rng.chance(0.35)) fx.pool.candidates.push_back(c);
    }
    if (fx.pool.candidates.empty()) fx.pool.candidates.push_back(all.candidates.front());
    return fx;
}

}  // namespace support
