// Base next-action predictors and the precondition-aware sampling wrapper.
// Policies propose the next action call given demonstrations and a prefix;
// the wrapper keeps drawing until a proposal satisfies the mined (or ground
// truth) preconditions, falling back to the greedy pick when none does.

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "precond/domains.hpp"
#include "precond/exec.hpp"
#include "precond/mine.hpp"
#include "precond/rng.hpp"
#include "precond/schema.hpp"
#include "precond/synth.hpp"
#include "precond/trajectory.hpp"

namespace precond {

struct PolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Next-action prediction: either a concrete call or the end-of-turn marker
/// (dialog evaluation treats a turn as the system calls before the next user
/// act; household episodes never end turns).
struct Prediction {
    bool end_of_turn = false;
    Call call;

    friend bool operator==(const Prediction& a, const Prediction& b) {
        return a.end_of_turn == b.end_of_turn && (a.end_of_turn || a.call == b.call);
    }
};

struct PolicyContext {
    const DomainSchema* schema = nullptr;
    const Corpus* demos = nullptr;
    const Trajectory* prefix = nullptr;
    // Per-action precondition conjunctions (mined or ground truth); empty map
    // means unvetted prediction.
    const std::map<std::string, ExprPtr>* preconditions = nullptr;
    bool include_preconditions_in_prompt = false;
    bool allow_end_of_turn = false;
};

struct BasePolicy {
    virtual ~BasePolicy() = default;
    virtual Prediction greedy(const PolicyContext& ctx) = 0;
    virtual Prediction sample(const PolicyContext& ctx, Rng& rng) = 0;
};

// ---------------------------------------------------------------------------
// Frequency policy: smoothed n-gram scores over grounded action calls

namespace detail {

inline std::string call_token(const Call& c) { return render_call(c); }

constexpr const char* kBosToken = "<s>";
constexpr const char* kEotToken = "<end_of_turn>";

inline std::string side_of(const std::string& fn) {
    const auto dot = fn.find('.');
    return dot == std::string::npos ? fn : fn.substr(0, dot);
}

}  // namespace detail

/// Scores every grounded action call (plus the end-of-turn marker when the
/// context allows it) by add-one-smoothed frequency of
/// (previous two call tokens -> candidate token) over the demonstrations.
/// k = 2; the end-of-turn event is counted where a user call follows a
/// system action in a demonstration.
class FrequencyPolicy : public BasePolicy {
public:
    FrequencyPolicy(const DomainSchema& schema, const Corpus& demos) : schema_(&schema) {
        if (demos.trajectories.empty())
            throw PolicyError("frequency policy requires demonstrations");
        for (const auto& t : demos.trajectories) {
            std::vector<std::string> tokens;
            tokens.reserve(t.calls.size());
            for (const auto& c : t.calls) tokens.push_back(detail::call_token(c));
            for (size_t i = 0; i < t.calls.size(); ++i) {
                const std::string key = context_key(tokens, i);
                const auto* fn = schema.find_function(t.calls[i].fn);
                if (fn && fn->is_action()) counts_[key][tokens[i]]++;
                // end-of-turn: a user observation right after a system action
                if (i > 0) {
                    const auto* prev = schema.find_function(t.calls[i - 1].fn);
                    if (prev && prev->is_action() &&
                        detail::side_of(t.calls[i].fn) != detail::side_of(t.calls[i - 1].fn))
                        counts_[key][detail::kEotToken]++;
                }
            }
        }
        for (const auto* fn : schema.actions())
            for (const auto& binding : action_groundings(schema, *fn))
                candidates_.push_back(Call{fn->name, binding});
        std::sort(candidates_.begin(), candidates_.end(),
                  [](const Call& a, const Call& b) {
                      return detail::call_token(a) < detail::call_token(b);
                  });
    }

    Prediction greedy(const PolicyContext& ctx) override {
        const auto scores = score_candidates(ctx);
        size_t best = 0;
        for (size_t i = 1; i < scores.size(); ++i)
            if (scores[i] > scores[best]) best = i;  // ties keep the lexicographically first
        return prediction_at(ctx, best);
    }

    Prediction sample(const PolicyContext& ctx, Rng& rng) override {
        const auto scores = score_candidates(ctx);
        return prediction_at(ctx, rng.weighted_index(scores));
    }

private:
    const DomainSchema* schema_;
    std::map<std::string, std::map<std::string, int>> counts_;
    std::vector<Call> candidates_;

    static std::string context_key(const std::vector<std::string>& tokens, size_t i) {
        const std::string prev1 = i >= 1 ? tokens[i - 1] : detail::kBosToken;
        const std::string prev2 = i >= 2 ? tokens[i - 2] : detail::kBosToken;
        return prev2 + "\x1f" + prev1;
    }

    std::vector<double> score_candidates(const PolicyContext& ctx) const {
        std::vector<std::string> tokens;
        for (const auto& c : ctx.prefix->calls) tokens.push_back(detail::call_token(c));
        const std::string key = context_key(tokens, tokens.size());
        const auto it = counts_.find(key);
        const size_t extra = ctx.allow_end_of_turn ? 1 : 0;
        std::vector<double> scores(candidates_.size() + extra, 0.0);
        const double vocab = static_cast<double>(scores.size());
        double total = 0;
        if (it != counts_.end())
            for (const auto& [tok, n] : it->second) total += n;
        for (size_t i = 0; i < candidates_.size(); ++i) {
            double n = 0;
            if (it != counts_.end()) {
                auto f = it->second.find(detail::call_token(candidates_[i]));
                if (f != it->second.end()) n = f->second;
            }
            scores[i] = (n + 1.0) / (total + vocab);
        }
        if (extra) {
            double n = 0;
            if (it != counts_.end()) {
                auto f = it->second.find(detail::kEotToken);
                if (f != it->second.end()) n = f->second;
            }
            scores.back() = (n + 1.0) / (total + vocab);
        }
        return scores;
    }

    Prediction prediction_at(const PolicyContext& ctx, size_t index) const {
        Prediction p;
        if (ctx.allow_end_of_turn && index == candidates_.size()) {
            p.end_of_turn = true;
            return p;
        }
        p.call = candidates_[index];
        return p;
    }
};

// ---------------------------------------------------------------------------
// Model-backed policy

/// Prompts the completion endpoint with the rendered demonstrations (action
/// definitions carrying assert lines when configured) plus the rendered
/// prefix, and parses one completed line into a call. An empty line or a
/// user-side call counts as end of turn.
class ModelPolicy : public BasePolicy {
public:
    ModelPolicy(CompletionClient& client, double temperature = 0.8, int max_tokens = 48)
        : client_(&client), temperature_(temperature), max_tokens_(max_tokens) {}

    Prediction greedy(const PolicyContext& ctx) override { return predict(ctx, 0.0); }

    Prediction sample(const PolicyContext& ctx, Rng&) override {
        return predict(ctx, temperature_);
    }

private:
    CompletionClient* client_;
    double temperature_;
    int max_tokens_;

    std::string render_prompt(const PolicyContext& ctx) const {
        std::string out;
        const auto* schema = ctx.schema;
        const std::map<std::string, ExprPtr>* asserts =
            ctx.include_preconditions_in_prompt ? ctx.preconditions : nullptr;
        if (asserts && !ctx.demos->trajectories.empty()) {
            // function definitions rendered once, with assert bodies
            out += render_completion_prompt(*schema, ctx.demos->trajectories.front(),
                                            *schema->actions().front(), asserts);
            // strip the trailing stub the candidate-generation prompt carries
            const auto stub = out.rfind("def ");
            if (stub != std::string::npos) out.erase(stub);
        } else {
            for (const auto& t : ctx.demos->trajectories) {
                out += serialize_trajectory(t);
                out += "\n";
            }
        }
        out += serialize_trajectory(*ctx.prefix);
        return out;
    }

    Prediction predict(const PolicyContext& ctx, double temperature) {
        std::string text = client_->complete(render_prompt(ctx), max_tokens_, temperature);
        const auto nl = text.find('\n');
        if (nl != std::string::npos) text = text.substr(0, nl);
        while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
            text.erase(text.begin());
        Prediction p;
        if (text.empty()) {
            p.end_of_turn = true;
            return p;
        }
        Call call = parse_call(text, "completion");  // throws CorpusError on junk
        const auto* fn = ctx.schema->find_function(call.fn);
        if (fn && !fn->is_action()) {
            p.end_of_turn = true;  // the model moved on to the other side's turn
            return p;
        }
        check_call(*ctx.schema, call, "completion");
        p.call = std::move(call);
        return p;
    }
};

// ---------------------------------------------------------------------------
// Verified sampling

struct SampleResult {
    Prediction prediction;
    bool verified = false;
    int attempts = 0;
    bool fallback_used = false;
};

/// Checks a prediction against the configured precondition map at the state
/// reached by replaying the prefix. End-of-turn predictions and actions
/// without an entry verify trivially; bindings come from the predicted call.
inline bool verify_prediction(const PolicyContext& ctx, const Prediction& p) {
    if (p.end_of_turn) return true;
    if (!ctx.preconditions) return true;
    const auto it = ctx.preconditions->find(p.call.fn);
    if (it == ctx.preconditions->end() || !it->second) return true;
    const auto* fn = ctx.schema->find_function(p.call.fn);
    if (!fn) return false;
    State state = replay(*ctx.schema, *ctx.prefix, ctx.prefix->calls.size());
    BindingView binding{fn, &p.call.args};
    try {
        return eval_expr(*it->second, state, binding);
    } catch (const ExprError&) {
        return false;
    }
}

/// Greedy first, then random samples until one verifies or the attempt
/// budget runs out; on total failure the greedy prediction is returned
/// unverified. Duplicate random draws are skipped without consuming an
/// attempt.
inline SampleResult sample_with_verification(const PolicyContext& ctx, BasePolicy& base,
                                             int max_attempts, uint64_t seed) {
    if (max_attempts < 1) throw PolicyError("max_attempts must be at least 1");
    Rng rng(derive_seed(seed, "verified-sampling"));

    SampleResult result;
    Prediction greedy = base.greedy(ctx);
    result.prediction = greedy;
    result.attempts = 1;
    result.verified = verify_prediction(ctx, greedy);
    if (result.verified || max_attempts == 1) {
        result.fallback_used = !result.verified;
        return result;
    }

    std::set<std::string> tried{greedy.end_of_turn ? std::string(detail::kEotToken)
                                                   : detail::call_token(greedy.call)};
    // Bounded duplicate skipping: at most a candidate-pool worth of redraws.
    size_t redraw_budget = 4096;
    while (result.attempts < max_attempts) {
        Prediction draw = base.sample(ctx, rng);
        const std::string token =
            draw.end_of_turn ? std::string(detail::kEotToken) : detail::call_token(draw.call);
        if (!tried.insert(token).second) {
            if (redraw_budget-- == 0) break;
            continue;  // duplicates do not consume attempts
        }
        ++result.attempts;
        if (verify_prediction(ctx, draw)) {
            result.prediction = draw;
            result.verified = true;
            return result;
        }
    }
    result.prediction = greedy;
    result.verified = false;
    result.fallback_used = true;
    return result;
}

/// Adapts a policy (optionally precondition-verified) to the simulator's
/// proposer interface.
class PolicyProposer : public ActionProposer {
public:
    PolicyProposer(const DomainSchema& schema, const Corpus& demos, BasePolicy& base,
                   const std::map<std::string, ExprPtr>* preconditions, int max_attempts,
                   uint64_t seed)
        : schema_(&schema),
          demos_(&demos),
          base_(&base),
          preconditions_(preconditions),
          max_attempts_(max_attempts),
          seed_(seed) {}

    Call propose(const Trajectory& so_far) override {
        PolicyContext ctx;
        ctx.schema = schema_;
        ctx.demos = demos_;
        ctx.prefix = &so_far;
        ctx.preconditions = preconditions_;
        ctx.allow_end_of_turn = false;
        SampleResult r = sample_with_verification(
            ctx, *base_, max_attempts_, derive_seed(seed_, "step-" + std::to_string(step_++)));
        last_ = r;
        return r.prediction.call;
    }

    const SampleResult& last() const { return last_; }

private:
    const DomainSchema* schema_;
    const Corpus* demos_;
    BasePolicy* base_;
    const std::map<std::string, ExprPtr>* preconditions_;
    int max_attempts_;
    uint64_t seed_;
    size_t step_ = 0;
    SampleResult last_;
};

/// Precondition maps: ground truth from the schema, or mined conjunctions.
inline std::map<std::string, ExprPtr> gt_precondition_map(const DomainSchema& schema) {
    std::map<std::string, ExprPtr> out;
    for (const auto* fn : schema.actions())
        if (fn->gt_precondition) out[fn->name] = fn->gt_precondition;
    return out;
}

inline std::map<std::string, ExprPtr> mined_precondition_map(const MiningReport& report) {
    std::map<std::string, ExprPtr> out;
    for (const auto& r : report.results)
        out[r.action] = r.conjunction ? r.conjunction : make_true();
    return out;
}

}  // namespace precond
