#include <catch2/catch_amalgamated.hpp>

#include "precond/domains.hpp"
#include "precond/policy.hpp"

using namespace precond;

namespace {

struct DialogFixture {
    DomainSchema schema = restaurants_schema();
    Corpus demos = generate_dialog_demos(schema, dialog_scenario_templates(schema, 10, 1), 1);
};

Trajectory prefix_of(const Corpus& corpus, size_t traj, size_t upto) {
    return prefix(corpus.trajectories[traj], upto);
}

// A rigged base policy: greedy proposes a fixed violating call, random
// sampling draws from a small list that includes a verifying one.
struct Rigged : BasePolicy {
    Call greedy_pick;
    std::vector<Call> draws;

    Prediction greedy(const PolicyContext&) override { return {false, greedy_pick}; }
    Prediction sample(const PolicyContext&, Rng& rng) override {
        return {false, draws[rng.index(draws.size())]};
    }
};

}  // namespace

TEST_CASE("frequency policy follows demonstration bigrams") {
    DialogFixture fx;
    FrequencyPolicy policy(fx.schema, fx.demos);

    // find a prefix of a demo ending right after user.GOODBYE()
    const Trajectory* traj = nullptr;
    size_t upto = 0;
    for (const auto& t : fx.demos.trajectories)
        for (size_t i = 0; i < t.calls.size(); ++i)
            if (t.calls[i].fn == "user.GOODBYE") {
                traj = &t;
                upto = i + 1;
            }
    REQUIRE(traj != nullptr);
    Trajectory pfx = prefix(*traj, upto);

    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;
    Prediction p = policy.greedy(ctx);
    REQUIRE_FALSE(p.end_of_turn);
    CHECK(p.call == Call{"system.GOODBYE", {}});
}

TEST_CASE("frequency policy requires demonstrations") {
    DomainSchema rest = restaurants_schema();
    Corpus empty;
    empty.schema_name = "restaurants";
    CHECK_THROWS_AS(FrequencyPolicy(rest, empty), PolicyError);
}

TEST_CASE("seeded sampling is reproducible") {
    DialogFixture fx;
    FrequencyPolicy policy(fx.schema, fx.demos);
    Trajectory pfx = prefix_of(fx.demos, 0, 3);
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;

    Rng a(42), b(42);
    for (int i = 0; i < 20; ++i) CHECK(policy.sample(ctx, a) == policy.sample(ctx, b));
}

TEST_CASE("verified sampling returns the greedy pick when it verifies") {
    DialogFixture fx;
    FrequencyPolicy policy(fx.schema, fx.demos);
    Trajectory pfx = prefix_of(fx.demos, 0, 1);  // after user.INFORM_INTENT
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;

    // vacuous preconditions: identical to the base greedy policy
    std::map<std::string, ExprPtr> trivial;
    for (const auto* fn : fx.schema.actions()) trivial[fn->name] = make_true();
    ctx.preconditions = &trivial;
    SampleResult r = sample_with_verification(ctx, policy, 8, 7);
    CHECK(r.verified);
    CHECK(r.attempts == 1);
    CHECK_FALSE(r.fallback_used);
    CHECK(r.prediction == policy.greedy(ctx));
}

TEST_CASE("degradation bound: one attempt equals the base greedy policy") {
    DialogFixture fx;
    FrequencyPolicy policy(fx.schema, fx.demos);
    auto gt = gt_precondition_map(fx.schema);
    for (size_t upto : {0u, 2u, 5u, 9u}) {
        Trajectory pfx = prefix_of(fx.demos, 1, upto);
        PolicyContext ctx;
        ctx.schema = &fx.schema;
        ctx.demos = &fx.demos;
        ctx.prefix = &pfx;
        ctx.preconditions = &gt;
        SampleResult r = sample_with_verification(ctx, policy, 1, 3);
        CHECK(r.prediction == policy.greedy(ctx));
        if (!r.verified) CHECK(r.fallback_used);
    }
}

TEST_CASE("a violating greedy pick is replaced by a verifying sample") {
    DialogFixture fx;
    auto gt = gt_precondition_map(fx.schema);

    Rigged rigged;
    rigged.greedy_pick = {"system.GOODBYE", {}};  // no_more is false at step 1
    rigged.draws = {{"system.GOODBYE", {}},
                    {"system.NOTIFY_SUCCESS", {}},
                    {"system.REQUEST", {"cuisine"}}};  // not informed yet: verifies

    Trajectory pfx = prefix_of(fx.demos, 0, 1);
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;
    ctx.preconditions = &gt;

    SampleResult r = sample_with_verification(ctx, rigged, 8, 5);
    CHECK(r.verified);
    CHECK(r.attempts <= 8);
    CHECK(r.prediction.call == Call{"system.REQUEST", {"cuisine"}});

    // soundness: re-evaluate the returned call against the preconditions
    State state = replay(fx.schema, pfx, pfx.calls.size());
    const auto* fn = fx.schema.find_function(r.prediction.call.fn);
    BindingView binding{fn, &r.prediction.call.args};
    CHECK(eval_expr(*gt.at(fn->name), state, binding));
}

TEST_CASE("total verification failure falls back to greedy, flagged") {
    DialogFixture fx;
    auto gt = gt_precondition_map(fx.schema);
    Rigged rigged;
    rigged.greedy_pick = {"system.GOODBYE", {}};
    rigged.draws = {{"system.GOODBYE", {}}, {"system.NOTIFY_SUCCESS", {}}};

    Trajectory pfx = prefix_of(fx.demos, 0, 1);
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;
    ctx.preconditions = &gt;

    SampleResult r = sample_with_verification(ctx, rigged, 4, 9);
    CHECK_FALSE(r.verified);
    CHECK(r.fallback_used);
    CHECK(r.prediction.call == rigged.greedy_pick);
}

TEST_CASE("verified actions under ground truth are always compatible") {
    DialogFixture fx;
    FrequencyPolicy policy(fx.schema, fx.demos);
    auto gt = gt_precondition_map(fx.schema);
    size_t verified = 0;
    for (size_t t = 0; t < 3; ++t) {
        const Trajectory& ref = fx.demos.trajectories[t];
        for (size_t upto = 0; upto < ref.calls.size(); upto += 3) {
            Trajectory pfx = prefix(ref, upto);
            PolicyContext ctx;
            ctx.schema = &fx.schema;
            ctx.demos = &fx.demos;
            ctx.prefix = &pfx;
            ctx.preconditions = &gt;
            SampleResult r = sample_with_verification(ctx, policy, 8, 77 + upto);
            if (!r.verified || r.prediction.end_of_turn) continue;
            ++verified;
            State state = replay(fx.schema, pfx, pfx.calls.size());
            const auto* fn = fx.schema.find_function(r.prediction.call.fn);
            BindingView binding{fn, &r.prediction.call.args};
            CHECK(eval_expr(*fn->gt_precondition, state, binding));
        }
    }
    CHECK(verified > 0);
}

namespace {

struct ScriptedClient : CompletionClient {
    std::vector<std::string> lines;
    size_t at = 0;
    std::string last_prompt;
    std::string complete(const std::string& prompt, int, double) override {
        last_prompt = prompt;
        return lines[at++ % lines.size()];
    }
};

}  // namespace

TEST_CASE("model policy parses completions into calls") {
    DialogFixture fx;
    ScriptedClient client;
    client.lines = {"system.REQUEST('city')"};
    ModelPolicy policy(client);

    Trajectory pfx = prefix_of(fx.demos, 0, 1);
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;

    Prediction p = policy.greedy(ctx);
    REQUIRE_FALSE(p.end_of_turn);
    CHECK(p.call == Call{"system.REQUEST", {"city"}});

    client.lines = {"system.REQUEST('starfish')"};
    CHECK_THROWS_AS(policy.greedy(ctx), CorpusError);

    client.lines = {"user.INFORM('city')"};  // the other side: end of turn
    CHECK(policy.greedy(ctx).end_of_turn);
}

TEST_CASE("precondition-aware prompts embed assert lines") {
    DialogFixture fx;
    ScriptedClient client;
    client.lines = {"system.REQUEST('city')"};
    ModelPolicy policy(client);

    auto gt = gt_precondition_map(fx.schema);
    Trajectory pfx = prefix_of(fx.demos, 0, 1);
    PolicyContext ctx;
    ctx.schema = &fx.schema;
    ctx.demos = &fx.demos;
    ctx.prefix = &pfx;
    ctx.preconditions = &gt;
    ctx.include_preconditions_in_prompt = true;

    policy.greedy(ctx);
    CHECK(client.last_prompt.find("def GOODBYE(self):\n    assert self.user.no_more") !=
          std::string::npos);
    CHECK(client.last_prompt.find(serialize_trajectory(pfx)) != std::string::npos);
}
