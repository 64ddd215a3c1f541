// Evaluation: precision/recall/F1 of predicted preconditions against ground
// truth over the grounded instance grid, turn-level policy metrics for the
// dialog domains, success rate and compatibility for the household
// simulator, and the labeled-dataset construction plus a reference linear
// classifier for the learned-precondition baseline.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "precond/domains.hpp"
#include "precond/exec.hpp"
#include "precond/mine.hpp"
#include "precond/policy.hpp"
#include "precond/rng.hpp"
#include "precond/schema.hpp"

namespace precond {

// ---------------------------------------------------------------------------
// Precondition precision/recall

struct PRF {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

inline PRF make_prf(double precision, double recall) {
    PRF out{precision, recall, 0};
    if (precision + recall > 0) out.f1 = 2 * precision * recall / (precision + recall);
    return out;
}

struct PrecondMetrics {
    std::map<std::string, PRF> per_action;
    PRF macro;
};

/// Eq-style precision and recall per action over the test corpus grid:
/// Prec = |C_pred ∩ C_gt| / |C_pred|, Rec = |C_pred ∩ C_gt| / |C_gt|, with
/// empty-set convention: an empty C_pred scores precision 1 when C_gt is
/// also empty and 0 otherwise (and symmetrically for recall).
inline PrecondMetrics precond_prf(const DomainSchema& schema,
                                  const std::map<std::string, ExprPtr>& pred,
                                  const std::map<std::string, ExprPtr>& gt,
                                  const Corpus& test) {
    PrecondMetrics out;
    const auto replays = ReplayTable::build(schema, test);
    double sum_p = 0, sum_r = 0, sum_f = 0;
    size_t n = 0;
    for (const auto& [action, pred_expr] : pred) {
        auto gt_it = gt.find(action);
        if (gt_it == gt.end())
            throw SchemaError("precond_prf: no ground truth for action '" + action + "'");
        const auto* fn = schema.find_function(action);
        if (!fn) throw SchemaError("precond_prf: unknown action '" + action + "'");
        auto grid = InstanceGrid::build(schema, test, *fn);
        const Bitset cp = satisfaction_bits(pred_expr, *grid, replays);
        const Bitset cg = satisfaction_bits(gt_it->second, *grid, replays);

        size_t inter = 0;
        for (size_t i = 0; i < grid->total; ++i)
            if (cp.test(i) && cg.test(i)) ++inter;
        const size_t np = cp.count(), ng = cg.count();
        const double precision =
            np == 0 ? (ng == 0 ? 1.0 : 0.0) : static_cast<double>(inter) / np;
        const double recall = ng == 0 ? (np == 0 ? 1.0 : 0.0) : static_cast<double>(inter) / ng;
        PRF prf = make_prf(precision, recall);
        out.per_action[action] = prf;
        sum_p += prf.precision;
        sum_r += prf.recall;
        sum_f += prf.f1;
        ++n;
    }
    if (n) {
        out.macro.precision = sum_p / n;
        out.macro.recall = sum_r / n;
        out.macro.f1 = sum_f / n;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Policy evaluation

struct PolicyMetrics {
    double f1 = 0;            // turn-level action F1 (dialog)
    double sr = 0;            // success rate (household)
    double compatibility = 0; // predictions satisfying gt preconditions
    size_t predictions = 0;
    size_t violations = 0;
    double verified_compatibility = 1.0;  // among verified=true predictions only
    size_t verified_predictions = 0;
};

struct PolicyEvalConfig {
    int max_attempts = 8;
    uint64_t seed = 0;
    const std::map<std::string, ExprPtr>* preconditions = nullptr;  // null: raw greedy
    size_t turn_cap_slack = 2;  // predicted turn length cap: reference + slack
};

namespace detail {

inline bool gt_compatible(const DomainSchema& schema, const State& state, const Call& call) {
    const auto* fn = schema.find_function(call.fn);
    if (!fn || !fn->gt_precondition) return true;
    BindingView binding{fn, &call.args};
    try {
        return eval_expr(*fn->gt_precondition, state, binding);
    } catch (const ExprError&) {
        return false;
    }
}

}  // namespace detail

/// Teacher-forced turn-level evaluation. For every system turn of every
/// reference trajectory the policy predicts action calls until it emits the
/// end-of-turn marker (capped at the reference turn length plus slack); the
/// turn F1 compares predicted and reference action multisets, and
/// compatibility checks each predicted call against the ground-truth
/// preconditions at the reference prefix state.
inline PolicyMetrics policy_eval_dialog(const DomainSchema& schema, const Corpus& demos,
                                        BasePolicy& base, const Corpus& test,
                                        const PolicyEvalConfig& cfg) {
    PolicyMetrics out;
    double f1_sum = 0;
    size_t turns = 0;
    size_t compatible = 0;
    size_t verified_compatible = 0;

    for (const auto& ref : test.trajectories) {
        size_t i = 0;
        while (i < ref.calls.size()) {
            const auto* fn = schema.find_function(ref.calls[i].fn);
            const bool system_action = fn && fn->is_action();
            if (!system_action) {
                ++i;
                continue;
            }
            // reference turn: consecutive action calls (observations like the
            // query status update pass through without ending the turn)
            size_t end = i;
            std::vector<Call> reference;
            while (end < ref.calls.size()) {
                const auto* f2 = schema.find_function(ref.calls[end].fn);
                if (f2->is_action()) {
                    reference.push_back(ref.calls[end]);
                    ++end;
                } else if (detail::side_of(ref.calls[end].fn) ==
                           detail::side_of(ref.calls[i].fn)) {
                    ++end;  // same-side observation inside the turn
                } else {
                    break;
                }
            }

            Trajectory prefix_traj = prefix(ref, i);
            std::vector<Call> predicted;
            const size_t cap = reference.size() + cfg.turn_cap_slack;
            uint64_t turn_seed = derive_seed(cfg.seed, ref.id + ":" + std::to_string(i));
            State prefix_state = replay(schema, ref, i);

            for (size_t k = 0; k < cap; ++k) {
                PolicyContext ctx;
                ctx.schema = &schema;
                ctx.demos = &demos;
                ctx.prefix = &prefix_traj;
                ctx.preconditions = cfg.preconditions;
                ctx.allow_end_of_turn = true;
                SampleResult r;
                try {
                    r = sample_with_verification(ctx, base, cfg.max_attempts,
                                                 derive_seed(turn_seed, std::to_string(k)));
                } catch (const std::exception&) {
                    break;  // policy error: turn scored with what we have
                }
                if (r.prediction.end_of_turn) break;
                predicted.push_back(r.prediction.call);
                ++out.predictions;
                const bool ok = detail::gt_compatible(schema, prefix_state, r.prediction.call);
                if (ok) ++compatible;
                else ++out.violations;
                if (r.verified) {
                    ++out.verified_predictions;
                    if (ok) ++verified_compatible;
                }
                prefix_traj.calls.push_back(r.prediction.call);
            }

            // multiset F1 between predicted and reference calls
            std::multiset<std::string> p, g;
            for (const auto& c : predicted) p.insert(detail::call_token(c));
            for (const auto& c : reference) g.insert(detail::call_token(c));
            std::vector<std::string> inter;
            std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                                  std::back_inserter(inter));
            const double tp = static_cast<double>(inter.size());
            const double prec = p.empty() ? (g.empty() ? 1.0 : 0.0) : tp / p.size();
            const double rec = g.empty() ? (p.empty() ? 1.0 : 0.0) : tp / g.size();
            f1_sum += make_prf(prec, rec).f1;
            ++turns;

            i = end;
        }
    }
    out.f1 = turns ? f1_sum / turns : 0;
    out.compatibility = out.predictions
                            ? static_cast<double>(compatible) / out.predictions
                            : 1.0;
    out.verified_compatibility =
        out.verified_predictions
            ? static_cast<double>(verified_compatible) / out.verified_predictions
            : 1.0;
    return out;
}

/// Tracks verified-prediction compatibility across an evaluation.
struct CompatibilityLedger {
    size_t predictions = 0;
    size_t compatible = 0;
    size_t verified = 0;
    size_t verified_compatible = 0;
};

/// Runs the simulator once per (world, task) pair. Success rate counts
/// completed episodes; compatibility counts predicted actions whose ground
/// truth precondition held when they were proposed.
inline PolicyMetrics policy_eval_household(const DomainSchema& schema, const Corpus& demos,
                                           BasePolicy& base,
                                           const std::vector<std::pair<WorldState, Task>>& runs,
                                           size_t max_steps, const PolicyEvalConfig& cfg) {
    PolicyMetrics out;
    size_t successes = 0;
    CompatibilityLedger ledger;

    for (size_t r = 0; r < runs.size(); ++r) {
        // One proposer per episode so attempt seeds are episode-local.
        struct VerifiedProposer : ActionProposer {
            const DomainSchema* schema;
            const Corpus* demos;
            BasePolicy* base;
            const PolicyEvalConfig* cfg;
            uint64_t episode_seed;
            size_t step = 0;
            CompatibilityLedger* ledger;
            std::vector<SampleResult> log;

            Call propose(const Trajectory& so_far) override {
                PolicyContext ctx;
                ctx.schema = schema;
                ctx.demos = demos;
                ctx.prefix = &so_far;
                ctx.preconditions = cfg->preconditions;
                SampleResult s = sample_with_verification(
                    ctx, *base, cfg->max_attempts,
                    derive_seed(episode_seed, "step-" + std::to_string(step++)));
                log.push_back(s);
                return s.prediction.call;
            }
        } proposer;
        proposer.schema = &schema;
        proposer.demos = &demos;
        proposer.base = &base;
        proposer.cfg = &cfg;
        proposer.episode_seed = derive_seed(cfg.seed, "episode-" + std::to_string(r));
        proposer.ledger = &ledger;

        SimResult sim = simulate(schema, runs[r].first, runs[r].second, proposer, max_steps,
                                 "eval-" + std::to_string(r));
        if (sim.success) ++successes;
        for (size_t s = 0; s < sim.steps.size(); ++s) {
            ++ledger.predictions;
            if (sim.steps[s].compatible) ++ledger.compatible;
            if (s < proposer.log.size() && proposer.log[s].verified) {
                ++ledger.verified;
                if (sim.steps[s].compatible) ++ledger.verified_compatible;
            }
        }
    }

    out.sr = runs.empty() ? 0 : static_cast<double>(successes) / runs.size();
    out.predictions = ledger.predictions;
    out.violations = ledger.predictions - ledger.compatible;
    out.compatibility = ledger.predictions
                            ? static_cast<double>(ledger.compatible) / ledger.predictions
                            : 1.0;
    out.verified_predictions = ledger.verified;
    out.verified_compatibility =
        ledger.verified ? static_cast<double>(ledger.verified_compatible) / ledger.verified
                        : 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Labeled dataset for the learned-precondition baseline

struct LabeledInstance {
    std::string trajectory_id;
    size_t step = 0;
    std::string action;
    ArgBinding binding;
    int label = 0;
};

/// Positives are the observed action calls; negatives assume the
/// precondition of every later, different action call of the same
/// trajectory was not yet satisfied. Classes are balanced by uniform
/// downsampling of the larger one.
inline std::vector<LabeledInstance> build_labeled_dataset(const DomainSchema& schema,
                                                          const Corpus& demos, uint64_t seed) {
    if (demos.trajectories.empty())
        throw GenerationError("build_labeled_dataset requires demonstrations");
    std::vector<LabeledInstance> pos, neg;
    for (const auto& traj : demos.trajectories) {
        std::vector<size_t> action_steps;
        for (size_t t = 0; t < traj.calls.size(); ++t) {
            const auto* fn = schema.find_function(traj.calls[t].fn);
            if (fn && fn->is_action()) action_steps.push_back(t);
        }
        for (size_t idx = 0; idx < action_steps.size(); ++idx) {
            const size_t t = action_steps[idx];
            const Call& now = traj.calls[t];
            pos.push_back({traj.id, t, now.fn, now.args, 1});
            std::set<std::string> seen;
            for (size_t later = idx + 1; later < action_steps.size(); ++later) {
                const Call& future = traj.calls[action_steps[later]];
                if (future == now) continue;
                if (!seen.insert(detail::call_token(future)).second) continue;
                neg.push_back({traj.id, t, future.fn, future.args, 0});
            }
        }
    }
    Rng rng(derive_seed(seed, "label-balance"));
    auto downsample = [&](std::vector<LabeledInstance>& v, size_t target) {
        rng.shuffle(v);
        v.resize(target);
    };
    if (pos.size() < neg.size()) downsample(neg, pos.size());
    else if (neg.size() < pos.size() && !neg.empty()) downsample(pos, neg.size());

    std::vector<LabeledInstance> out;
    out.reserve(pos.size() + neg.size());
    out.insert(out.end(), pos.begin(), pos.end());
    out.insert(out.end(), neg.begin(), neg.end());
    return out;
}

/// Treats ground-truth-derived labels as truth and scores the constructed
/// labels: precision of the positive labels and recall over instances whose
/// ground truth precondition actually holds.
inline std::pair<double, double> label_quality(const DomainSchema& schema, const Corpus& demos,
                                               const std::vector<LabeledInstance>& dataset) {
    const auto replays = ReplayTable::build(schema, demos);
    std::map<std::string, size_t> traj_index;
    for (size_t i = 0; i < demos.trajectories.size(); ++i)
        traj_index[demos.trajectories[i].id] = i;

    size_t labeled_pos = 0, labeled_pos_correct = 0;
    size_t gt_pos = 0, gt_pos_labeled = 0;
    for (const auto& inst : dataset) {
        const auto* fn = schema.find_function(inst.action);
        const State& state = replays.states[traj_index.at(inst.trajectory_id)][inst.step];
        bool truth = true;
        if (fn->gt_precondition) {
            BindingView binding{fn, &inst.binding};
            truth = eval_expr(*fn->gt_precondition, state, binding);
        }
        if (inst.label == 1) {
            ++labeled_pos;
            if (truth) ++labeled_pos_correct;
        }
        if (truth) {
            ++gt_pos;
            if (inst.label == 1) ++gt_pos_labeled;
        }
    }
    const double precision =
        labeled_pos ? static_cast<double>(labeled_pos_correct) / labeled_pos : 1.0;
    const double recall = gt_pos ? static_cast<double>(gt_pos_labeled) / gt_pos : 1.0;
    return {precision, recall};
}

// ---------------------------------------------------------------------------
// Reference linear classifier

/// Feature map: flattened boolean state snapshot (keys restricted to the
/// declared vocabularies for fixed dimensionality), one-hot action, and
/// per-position binding indicators.
class PrecondFeatureMap {
public:
    PrecondFeatureMap(const DomainSchema& schema) : schema_(&schema) {
        const auto lits = detail::all_vocab_literals(schema);
        for (const auto& v : schema.state_vars) {
            switch (v.kind) {
                case StateVarKind::BoolFlag: add_slot("flag:" + v.name); break;
                case StateVarKind::TriState:
                    add_slot("tri:" + v.name + ":true");
                    add_slot("tri:" + v.name + ":false");
                    break;
                case StateVarKind::OptString:
                    add_slot("opt:" + v.name + ":set");
                    for (const auto& l : lits) add_slot("opt:" + v.name + ":" + l);
                    break;
                case StateVarKind::BoolMap:
                    for (const auto& l : lits) add_slot("map:" + v.name + ":" + l);
                    break;
                case StateVarKind::StringSet:
                    for (const auto& l : lits) add_slot("set:" + v.name + ":" + l);
                    break;
                case StateVarKind::PropMap:
                    for (const auto& l : lits)
                        for (const auto& m : lits)
                            if (l != m) add_slot("prop:" + v.name + ":" + l + ":" + m);
                    break;
            }
        }
        size_t max_arity = 0;
        for (const auto* fn : schema.actions()) {
            add_slot("action:" + fn->name);
            max_arity = std::max(max_arity, fn->params.size());
        }
        for (size_t pos = 0; pos < max_arity; ++pos)
            for (const auto& l : lits) add_slot("arg" + std::to_string(pos) + ":" + l);
    }

    size_t dimension() const { return index_.size(); }

    std::vector<double> features(const State& state, const std::string& action,
                                 const ArgBinding& binding) const {
        std::vector<double> x(dimension(), 0.0);
        const auto on = [&](const std::string& key) {
            auto it = index_.find(key);
            if (it != index_.end()) x[it->second] = 1.0;
        };
        for (const auto& [name, value] : state.flags)
            if (value) on("flag:" + name);
        for (const auto& [name, value] : state.tristates) {
            if (value == TriState::True) on("tri:" + name + ":true");
            if (value == TriState::False) on("tri:" + name + ":false");
        }
        for (const auto& [name, value] : state.opt_strings)
            if (value) {
                on("opt:" + name + ":set");
                on("opt:" + name + ":" + *value);
            }
        for (const auto& [name, entries] : state.bool_maps)
            for (const auto& [key, v] : entries)
                if (v) on("map:" + name + ":" + key);
        for (const auto& [name, entries] : state.string_sets)
            for (const auto& key : entries) on("set:" + name + ":" + key);
        for (const auto& [name, entries] : state.prop_maps)
            for (const auto& [key, v] : entries)
                if (v) on("prop:" + name + ":" + key.first + ":" + key.second);
        on("action:" + action);
        for (size_t pos = 0; pos < binding.size(); ++pos)
            on("arg" + std::to_string(pos) + ":" + binding[pos]);
        return x;
    }

private:
    const DomainSchema* schema_;
    std::map<std::string, size_t> index_;

    void add_slot(const std::string& key) { index_.emplace(key, index_.size()); }
};

/// Logistic model over the feature map, trained with plain full-batch
/// gradient descent. predict() thresholds at 0.5.
class LinearPrecondClassifier {
public:
    LinearPrecondClassifier(const DomainSchema& schema)
        : features_(schema), weights_(features_.dimension() + 1, 0.0) {}

    /// Mean logistic loss and its gradient at `w` over the given batch.
    static double loss_and_grad(const std::vector<std::vector<double>>& xs,
                                const std::vector<int>& ys, const std::vector<double>& w,
                                std::vector<double>* grad) {
        const size_t n = xs.size();
        const size_t d = w.size() - 1;
        if (grad) grad->assign(w.size(), 0.0);
        double loss = 0;
        for (size_t i = 0; i < n; ++i) {
            double z = w[d];
            for (size_t j = 0; j < d; ++j) z += w[j] * xs[i][j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double y = ys[i];
            const double eps = 1e-12;
            loss += -(y * std::log(p + eps) + (1 - y) * std::log(1 - p + eps));
            if (grad) {
                const double delta = p - y;
                for (size_t j = 0; j < d; ++j) (*grad)[j] += delta * xs[i][j];
                (*grad)[d] += delta;
            }
        }
        loss /= n;
        if (grad)
            for (auto& g : *grad) g /= static_cast<double>(n);
        return loss;
    }

    /// Returns the per-epoch training losses.
    std::vector<double> train(const DomainSchema& schema, const Corpus& demos,
                              const std::vector<LabeledInstance>& dataset, int epochs,
                              double lr, uint64_t seed) {
        bool has_pos = false, has_neg = false;
        for (const auto& inst : dataset) (inst.label ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg)
            throw GenerationError("classifier training requires both classes");

        const auto replays = ReplayTable::build(schema, demos);
        std::map<std::string, size_t> traj_index;
        for (size_t i = 0; i < demos.trajectories.size(); ++i)
            traj_index[demos.trajectories[i].id] = i;

        std::vector<std::vector<double>> xs;
        std::vector<int> ys;
        xs.reserve(dataset.size());
        for (const auto& inst : dataset) {
            const State& state = replays.states[traj_index.at(inst.trajectory_id)][inst.step];
            xs.push_back(features_.features(state, inst.action, inst.binding));
            ys.push_back(inst.label);
        }
        Rng rng(derive_seed(seed, "classifier-init"));
        for (auto& w : weights_) w = (rng.real() - 0.5) * 0.01;

        std::vector<double> losses;
        std::vector<double> grad;
        for (int e = 0; e < epochs; ++e) {
            losses.push_back(loss_and_grad(xs, ys, weights_, &grad));
            for (size_t j = 0; j < weights_.size(); ++j) weights_[j] -= lr * grad[j];
        }
        return losses;
    }

    double score(const State& state, const std::string& action, const ArgBinding& binding) const {
        const auto x = features_.features(state, action, binding);
        double z = weights_.back();
        for (size_t j = 0; j < x.size(); ++j) z += weights_[j] * x[j];
        return 1.0 / (1.0 + std::exp(-z));
    }

    bool predict(const State& state, const std::string& action, const ArgBinding& binding) const {
        return score(state, action, binding) >= 0.5;
    }

    const PrecondFeatureMap& feature_map() const { return features_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    PrecondFeatureMap features_;
    std::vector<double> weights_;  // last entry is the bias
};

/// Per-action metrics of classifier-thresholded satisfaction sets against
/// the ground truth on a test corpus.
inline PrecondMetrics classifier_prf(const DomainSchema& schema,
                                     const LinearPrecondClassifier& clf,
                                     const std::map<std::string, ExprPtr>& gt,
                                     const Corpus& test) {
    PrecondMetrics out;
    const auto replays = ReplayTable::build(schema, test);
    double sum_p = 0, sum_r = 0, sum_f = 0;
    size_t n = 0;
    for (const auto& [action, gt_expr] : gt) {
        const auto* fn = schema.find_function(action);
        auto grid = InstanceGrid::build(schema, test, *fn);
        const Bitset cg = satisfaction_bits(gt_expr, *grid, replays);
        size_t inter = 0, np = 0;
        for (size_t ti = 0; ti < test.trajectories.size(); ++ti) {
            const auto& snaps = replays.states[ti];
            for (size_t j = 0; j < snaps.size(); ++j) {
                for (size_t bi = 0; bi < grid->bindings.size(); ++bi) {
                    if (!clf.predict(snaps[j], action, grid->bindings[bi])) continue;
                    ++np;
                    if (cg.test(grid->index(ti, j, bi))) ++inter;
                }
            }
        }
        const size_t ng = cg.count();
        const double precision =
            np == 0 ? (ng == 0 ? 1.0 : 0.0) : static_cast<double>(inter) / np;
        const double recall = ng == 0 ? (np == 0 ? 1.0 : 0.0) : static_cast<double>(inter) / ng;
        PRF prf = make_prf(precision, recall);
        out.per_action[action] = prf;
        sum_p += prf.precision;
        sum_r += prf.recall;
        sum_f += prf.f1;
        ++n;
    }
    if (n) {
        out.macro.precision = sum_p / n;
        out.macro.recall = sum_r / n;
        out.macro.f1 = sum_f / n;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report rendering

inline nlohmann::ordered_json precond_metrics_to_json(const PrecondMetrics& m) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [action, prf] : m.per_action) {
        per[action] = {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
    }
    j["per_action"] = per;
    j["macro"] = {{"precision", m.macro.precision},
                  {"recall", m.macro.recall},
                  {"f1", m.macro.f1}};
    return j;
}

inline std::string precond_metrics_to_text(const PrecondMetrics& m) {
    char buf[160];
    std::string out;
    out += "action                              Prec    Rec     F1\n";
    for (const auto& [action, prf] : m.per_action) {
        std::snprintf(buf, sizeof buf, "%-34s %6.3f %6.3f %6.3f\n", action.c_str(),
                      prf.precision, prf.recall, prf.f1);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-34s %6.3f %6.3f %6.3f\n", "macro", m.macro.precision,
                  m.macro.recall, m.macro.f1);
    out += buf;
    return out;
}

inline nlohmann::ordered_json policy_metrics_to_json(const PolicyMetrics& m, bool dialog) {
    nlohmann::ordered_json j;
    if (dialog) j["f1"] = m.f1;
    else j["sr"] = m.sr;
    j["compatibility"] = m.compatibility;
    j["predictions"] = m.predictions;
    j["violations"] = m.violations;
    j["verified_predictions"] = m.verified_predictions;
    j["verified_compatibility"] = m.verified_compatibility;
    return j;
}

inline std::string policy_metrics_to_text(const PolicyMetrics& m, bool dialog) {
    char buf[160];
    std::string out;
    if (dialog)
        std::snprintf(buf, sizeof buf, "F1 %.3f  Cmp %.3f  (%zu predictions, %zu violations)\n",
                      m.f1, m.compatibility, m.predictions, m.violations);
    else
        std::snprintf(buf, sizeof buf, "SR %.3f  Cmp %.3f  (%zu predictions, %zu violations)\n",
                      m.sr, m.compatibility, m.predictions, m.violations);
    out += buf;
    std::snprintf(buf, sizeof buf, "verified predictions %zu, verified compatibility %.3f\n",
                  m.verified_predictions, m.verified_compatibility);
    out += buf;
    return out;
}

}  // namespace precond
