#include <catch2/catch_amalgamated.hpp>

#include "precond/domains.hpp"
#include "precond/evalkit.hpp"

using namespace precond;

namespace {

struct Fixture {
    DomainSchema schema = restaurants_schema();
    Corpus demos = generate_dialog_demos(schema, dialog_scenario_templates(schema, 10, 1), 1);
    Corpus test = generate_dialog_demos(schema, dialog_scenario_templates(schema, 20, 2), 2,
                                        "test");
};

}  // namespace

TEST_CASE("identical precondition maps score all ones") {
    Fixture fx;
    auto gt = gt_precondition_map(fx.schema);
    PrecondMetrics m = precond_prf(fx.schema, gt, gt, fx.test);
    for (const auto& [action, prf] : m.per_action) {
        CHECK(prf.precision == 1.0);
        CHECK(prf.recall == 1.0);
        CHECK(prf.f1 == 1.0);
    }
    CHECK(m.macro.f1 == 1.0);
}

TEST_CASE("a strengthened prediction keeps precision at one") {
    Fixture fx;
    auto gt = gt_precondition_map(fx.schema);
    auto pred = gt;
    const auto* inform = fx.schema.find_function("system.INFORM");
    pred["system.INFORM"] =
        make_and(gt.at("system.INFORM"),
                 parse_expr("query_success == true", fx.schema, *inform));
    PrecondMetrics m = precond_prf(fx.schema, pred, gt, fx.test);
    CHECK(m.per_action.at("system.INFORM").precision == 1.0);
    CHECK(m.per_action.at("system.INFORM").recall < 1.0);
}

TEST_CASE("swapping prediction and truth swaps precision and recall") {
    Fixture fx;
    auto gt = gt_precondition_map(fx.schema);
    auto pred = gt;
    const auto* inform = fx.schema.find_function("system.INFORM");
    pred["system.INFORM"] =
        make_and(gt.at("system.INFORM"),
                 parse_expr("query_success == true", fx.schema, *inform));
    pred["system.GOODBYE"] = make_true();

    PrecondMetrics forward = precond_prf(fx.schema, pred, gt, fx.test);
    PrecondMetrics reversed = precond_prf(fx.schema, gt, pred, fx.test);
    for (const auto& [action, prf] : forward.per_action) {
        CHECK(prf.precision == Catch::Approx(reversed.per_action.at(action).recall));
        CHECK(prf.recall == Catch::Approx(reversed.per_action.at(action).precision));
    }
    CHECK(forward.macro.precision == Catch::Approx(reversed.macro.recall));
}

TEST_CASE("empty satisfaction sets follow the documented convention") {
    Fixture fx;
    const auto* inform = fx.schema.find_function("system.INFORM");
    // never satisfiable: no_more and not no_more
    ExprPtr contradiction =
        make_and(make_flag("no_more"), make_not(make_flag("no_more")));
    type_check(contradiction, fx.schema, *inform);
    std::map<std::string, ExprPtr> pred{{"system.INFORM", contradiction}};
    std::map<std::string, ExprPtr> gt{{"system.INFORM", contradiction}};
    PrecondMetrics both_empty = precond_prf(fx.schema, pred, gt, fx.test);
    CHECK(both_empty.per_action.at("system.INFORM").precision == 1.0);
    CHECK(both_empty.per_action.at("system.INFORM").recall == 1.0);

    gt["system.INFORM"] = make_true();
    PrecondMetrics empty_pred = precond_prf(fx.schema, pred, gt, fx.test);
    CHECK(empty_pred.per_action.at("system.INFORM").precision == 0.0);
    CHECK(empty_pred.per_action.at("system.INFORM").recall == 0.0);
}

namespace {

// Replays the reference trajectory: perfect turn predictions.
struct OraclePolicy : BasePolicy {
    const Corpus* test;

    Prediction greedy(const PolicyContext& ctx) override {
        // find the reference trajectory by id prefix and emit its next action
        const std::string base = ctx.prefix->id.substr(0, ctx.prefix->id.find('@'));
        for (const auto& t : test->trajectories) {
            if (t.id != base) continue;
            const size_t at = ctx.prefix->calls.size();
            if (at >= t.calls.size()) return {true, {}};
            const Call& next = t.calls[at];
            // an observation next means the turn is over
            return next.fn.rfind("system.", 0) == 0 && next.fn != "system.set_query_status"
                       ? Prediction{false, next}
                       : Prediction{true, {}};
        }
        return {true, {}};
    }
    Prediction sample(const PolicyContext& ctx, Rng&) override { return greedy(ctx); }
};

}  // namespace

TEST_CASE("an oracle policy scores perfect turn F1 and compatibility") {
    Fixture fx;
    OraclePolicy oracle;
    oracle.test = &fx.test;
    PolicyEvalConfig cfg;
    cfg.seed = 5;
    PolicyMetrics m = policy_eval_dialog(fx.schema, fx.demos, oracle, fx.test, cfg);
    CHECK(m.f1 == Catch::Approx(1.0));
    CHECK(m.compatibility == Catch::Approx(1.0));
    CHECK(m.violations == 0);
}

TEST_CASE("an always-goodbye policy is counted incompatible until no_more") {
    Fixture fx;
    struct Goodbye : BasePolicy {
        Prediction greedy(const PolicyContext&) override {
            return {false, Call{"system.GOODBYE", {}}};
        }
        Prediction sample(const PolicyContext& ctx, Rng&) override { return greedy(ctx); }
    } policy;
    PolicyEvalConfig cfg;
    PolicyMetrics m = policy_eval_dialog(fx.schema, fx.demos, policy, fx.test, cfg);
    CHECK(m.compatibility < 1.0);
    CHECK(m.violations > 0);
}

TEST_CASE("labeled datasets come from observed and future actions") {
    Fixture fx;
    auto dataset = build_labeled_dataset(fx.schema, fx.demos, 3);
    size_t pos = 0, neg = 0;
    for (const auto& inst : dataset) (inst.label ? pos : neg)++;
    CHECK(pos > 0);
    CHECK(neg > 0);
    CHECK(pos == neg);  // balanced by downsampling

    // single-action trajectory: no negatives to harvest
    DomainSchema rest = fx.schema;
    Corpus tiny;
    tiny.schema_name = "restaurants";
    Trajectory t;
    t.id = "solo";
    t.calls = {Call{"user.GOODBYE", {}}, Call{"system.GOODBYE", {}}};
    tiny.trajectories.push_back(t);
    auto solo = build_labeled_dataset(rest, tiny, 3);
    for (const auto& inst : solo) CHECK(inst.label == 1);
}

TEST_CASE("label quality: positives are exact, negatives are noisy") {
    Fixture fx;
    auto dataset = build_labeled_dataset(fx.schema, fx.demos, 3);
    auto [precision, recall] = label_quality(fx.schema, fx.demos, dataset);
    CHECK(precision == Catch::Approx(1.0));

    std::vector<LabeledInstance> positives_only;
    for (const auto& inst : dataset)
        if (inst.label == 1) positives_only.push_back(inst);
    auto [p2, r2] = label_quality(fx.schema, fx.demos, positives_only);
    CHECK(p2 == Catch::Approx(1.0));
    CHECK(r2 == Catch::Approx(1.0));  // every gt-true instance carries label 1

    // navigation makes plausible alternatives negatives in the household
    DomainSchema hh = household_schema();
    Corpus hh_demos = generate_household_demos(hh, 2, 8);
    auto hh_dataset = build_labeled_dataset(hh, hh_demos, 3);
    auto [hp, hr] = label_quality(hh, hh_demos, hh_dataset);
    CHECK(hp == Catch::Approx(1.0));
    CHECK(hr < 1.0);
}

TEST_CASE("the linear classifier separates a single-flag rule") {
    DomainSchema rest = restaurants_schema();
    // synthetic corpus where GOODBYE is plausible exactly when no_more holds
    Corpus demos;
    demos.schema_name = "restaurants";
    for (int i = 0; i < 6; ++i) {
        Trajectory t;
        t.id = "s" + std::to_string(i);
        if (i % 2) t.calls.push_back({"user.GOODBYE", {}});
        t.calls.push_back({"user.SELECT", {}});
        t.calls.push_back({"system.GOODBYE", {}});
        demos.trajectories.push_back(t);
    }
    std::vector<LabeledInstance> dataset;
    for (const auto& t : demos.trajectories) {
        const bool said_goodbye = t.calls.size() == 3;
        dataset.push_back({t.id, t.calls.size() - 1, "system.GOODBYE", {},
                           said_goodbye ? 1 : 0});
    }
    LinearPrecondClassifier clf(rest);
    auto losses = clf.train(rest, demos, dataset, 400, 0.8, 1);
    REQUIRE_FALSE(losses.empty());
    CHECK(losses.back() < losses.front());

    const auto replays = ReplayTable::build(rest, demos);
    size_t correct = 0;
    for (const auto& inst : dataset) {
        size_t ti = 0;
        for (size_t i = 0; i < demos.trajectories.size(); ++i)
            if (demos.trajectories[i].id == inst.trajectory_id) ti = i;
        const State& state = replays.states[ti][inst.step];
        if (clf.predict(state, inst.action, inst.binding) == (inst.label == 1)) ++correct;
    }
    CHECK(correct == dataset.size());
}

TEST_CASE("analytic gradients match central finite differences") {
    Fixture fx;
    auto dataset = build_labeled_dataset(fx.schema, fx.demos, 3);
    dataset.resize(std::min<size_t>(dataset.size(), 40));

    LinearPrecondClassifier clf(fx.schema);
    const auto replays = ReplayTable::build(fx.schema, fx.demos);
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < fx.demos.trajectories.size(); ++i)
        index[fx.demos.trajectories[i].id] = i;
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (const auto& inst : dataset) {
        xs.push_back(clf.feature_map().features(replays.states[index.at(inst.trajectory_id)][inst.step],
                                                inst.action, inst.binding));
        ys.push_back(inst.label);
    }

    Rng rng(99);
    std::vector<double> w(xs[0].size() + 1);
    for (auto& v : w) v = (rng.real() - 0.5);
    std::vector<double> grad;
    LinearPrecondClassifier::loss_and_grad(xs, ys, w, &grad);

    const double h = 1e-5;
    size_t checked = 0;
    for (size_t j = 0; j < w.size() && checked < 24; j += std::max<size_t>(1, w.size() / 24)) {
        auto wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        const double fp = LinearPrecondClassifier::loss_and_grad(xs, ys, wp, nullptr);
        const double fm = LinearPrecondClassifier::loss_and_grad(xs, ys, wm, nullptr);
        const double numeric = (fp - fm) / (2 * h);
        const double denom = std::max({std::abs(numeric), std::abs(grad[j]), 1e-8});
        CHECK(std::abs(numeric - grad[j]) / denom < 1e-4);
        ++checked;
    }
    REQUIRE(checked > 0);
}

TEST_CASE("training loss is non-increasing with a small step size") {
    Fixture fx;
    auto dataset = build_labeled_dataset(fx.schema, fx.demos, 3);
    LinearPrecondClassifier clf(fx.schema);
    auto losses = clf.train(fx.schema, fx.demos, dataset, 60, 0.05, 2);
    for (size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
}

TEST_CASE("single-class datasets are rejected") {
    Fixture fx;
    std::vector<LabeledInstance> ones = {
        {fx.demos.trajectories[0].id, 1, "system.GOODBYE", {}, 1}};
    LinearPrecondClassifier clf(fx.schema);
    CHECK_THROWS(clf.train(fx.schema, fx.demos, ones, 5, 0.1, 1));
}
