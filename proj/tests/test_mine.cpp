#include <catch2/catch_amalgamated.hpp>

#include "precond/domains.hpp"
#include "precond/mine.hpp"
#include "precond/schema_io.hpp"
#include "support/oracle.hpp"

using namespace precond;

namespace {

const std::string kFixtures = PRECOND_FIXTURE_DIR;

CandidateEntry entry(ExprPtr e) { return {e, "enumerated", to_text(e)}; }

}  // namespace

TEST_CASE("validation keeps exactly the execution survivors") {
    DomainSchema rest = restaurants_schema();
    Corpus example = parse_corpus(kFixtures + "/restaurants_example.corpus", rest);
    const auto* goodbye = rest.find_function("system.GOODBYE");

    CandidatePool pool;
    pool.action = "system.GOODBYE";
    pool.candidates.push_back(entry(make_true()));
    pool.candidates.push_back(entry(parse_expr("no_more", rest, *goodbye)));
    pool.candidates.push_back(entry(parse_expr("not no_more", rest, *goodbye)));
    pool.candidates.push_back({nullptr, "model", "junk()"});

    auto valid = validate(rest, pool, example);
    REQUIRE(valid.size() == 2);  // TRUE and no_more; the negation fails, junk is skipped
    CHECK(to_text(valid[0].expr) == "true");
    CHECK(to_text(valid[1].expr) == "no_more");
}

TEST_CASE("satisfaction sets enumerate the grounded grid") {
    DomainSchema rest = restaurants_schema();
    Corpus example = parse_corpus(kFixtures + "/restaurants_example.corpus", rest);
    const auto* goodbye = rest.find_function("system.GOODBYE");
    const auto* inform = rest.find_function("system.INFORM");

    auto full = satisfaction_set(rest, make_true(), *goodbye, example);
    CHECK(full.count() == 42);  // 41 calls -> 42 prefixes, nullary binding

    auto after_thanks =
        satisfaction_set(rest, parse_expr("no_more", rest, *goodbye), *goodbye, example);
    auto instances = after_thanks.instances();
    REQUIRE(instances.size() == 3);  // steps 39, 40, 41
    CHECK(instances.front().step == 39);
    CHECK(instances.back().step == 41);

    auto live_music = satisfaction_set(
        rest, parse_expr("requested_slot[slot]", rest, *inform), *inform, example);
    size_t expected = 0;
    for (const auto& inst : live_music.instances()) {
        if (inst.binding == ArgBinding{"has_live_music"}) {
            CHECK(inst.step >= 14);  // after user.REQUEST('has_live_music')
            ++expected;
        }
    }
    CHECK(expected == 42 - 14);
}

TEST_CASE("ranking keeps the anti-chain of minimal satisfaction sets") {
    DomainSchema rest = restaurants_schema();
    Corpus example = parse_corpus(kFixtures + "/restaurants_example.corpus", rest);
    const auto* goodbye = rest.find_function("system.GOODBYE");

    SECTION("a sole candidate is trivially minimal") {
        auto r = rank(rest, {entry(make_true())}, *goodbye, example);
        REQUIRE(r.opt.size() == 1);
        CHECK(to_text(r.opt[0].expr) == "true");
        CHECK(to_text(r.conjunction) == "true");
    }
    SECTION("a strict subset subsumes the superset") {
        auto no_more = entry(parse_expr("no_more", rest, *goodbye));
        auto r = rank(rest, {entry(make_true()), no_more}, *goodbye, example);
        REQUIRE(r.opt.size() == 1);
        CHECK(to_text(r.opt[0].expr) == "no_more");
        // pairwise anti-chain among winners
        for (size_t a : r.winners)
            for (size_t b : r.winners)
                if (a != b) {
                    auto ca = satisfaction_set(rest, r.valid[r.clusters[a][0]].expr, *goodbye,
                                               example);
                    auto cb = satisfaction_set(rest, r.valid[r.clusters[b][0]].expr, *goodbye,
                                               example);
                    CHECK_FALSE(ca.bits.strict_subset_of(cb.bits));
                }
    }
}

TEST_CASE("the curated INFORM pool reproduces the staged worked example") {
    DomainSchema schema = load_schema(kFixtures + "/appendix_e/schema.json");
    Corpus demos = parse_corpus(kFixtures + "/appendix_e/demos.corpus", schema);
    auto pools = load_pools(kFixtures + "/appendix_e/pool.json", schema);
    REQUIRE(pools.size() == 1);
    REQUIRE(pools[0].candidates.size() == 17);
    CHECK(pools[0].candidates.size() - pools[0].typed_count() == 4);

    auto valid = validate(schema, pools[0], demos);
    const std::vector<std::string> survivors = {
        "self.query_success!= None",
        "(self.query_success == True)",
        "(self.query_success)",
        "self.query_success is not None",
        "isinstance(slot, str)",
        "slot!= 'date'",
        "self.query_success in (True, False)",
        "self.user.requested_slot[slot]",
    };
    REQUIRE(valid.size() == survivors.size());
    for (size_t i = 0; i < survivors.size(); ++i) CHECK(valid[i].raw == survivors[i]);

    const auto* inform = schema.find_function("system.INFORM");
    auto result = rank(schema, valid, *inform, demos);
    REQUIRE(result.clusters.size() == 4);
    CHECK(result.clusters[0].size() == 3);  // the query-status-is-set cluster
    CHECK(result.clusters[1].size() == 2);  // query_success == True / truthy
    CHECK(result.clusters[2].size() == 2);  // the tautologies
    CHECK(result.clusters[3].size() == 1);  // requested_slot[slot]
    REQUIRE(result.winners == std::vector<size_t>{1, 3});
    REQUIRE(result.opt.size() == 2);
    CHECK(to_text(result.opt[0].expr) == "query_success == true");
    CHECK(to_text(result.opt[1].expr) == "requested_slot[slot]");
}

TEST_CASE("mining on the demo corpus recovers reported shapes") {
    DomainSchema rest = restaurants_schema();
    Corpus demos = generate_dialog_demos(rest, dialog_scenario_templates(rest, 10, 1), 1);
    MineConfig cfg;
    MiningReport report = mine_all(rest, demos, cfg);

    const auto* goodbye = report.find("system.GOODBYE");
    REQUIRE(goodbye != nullptr);
    CHECK(to_text(goodbye->conjunction) == "no_more");

    // every rank invariant holds on each mined action
    for (const auto& r : report.results) {
        const auto* fn = rest.find_function(r.action);
        // validation soundness: every member re-executes ok
        for (const auto& v : r.valid)
            for (const auto& traj : demos.trajectories)
                CHECK(execute_with_precondition(rest, traj, r.action, v.expr).ok());
        // conjunction over opt equals conjunction over valid at every
        // grounded corpus instance
        CHECK(support::conjunction_mismatches(rest, r, *fn, demos) == 0);
    }
}

TEST_CASE("household mining includes the inventory condition for put") {
    DomainSchema hh = household_schema();
    Corpus demos = generate_household_demos(hh, 2, 40);
    MineConfig cfg;
    MiningReport report = mine_all(hh, demos, cfg);
    const auto* put = report.find("agent.put");
    REQUIRE(put != nullptr);
    std::vector<ExprPtr> conjuncts;
    const std::function<void(const ExprPtr&)> collect = [&](const ExprPtr& e) {
        if (e->kind == ExprKind::And) {
            collect(e->lhs);
            collect(e->rhs);
        } else {
            conjuncts.push_back(e);
        }
    };
    collect(put->conjunction);
    bool has_inventory = false;
    for (const auto& c : conjuncts)
        if (to_text(c) == "inventory == obj") has_inventory = true;
    CHECK(has_inventory);
}

TEST_CASE("an empty pool mines to TRUE with a flag") {
    DomainSchema rest = restaurants_schema();
    Corpus demos = generate_dialog_demos(rest, dialog_scenario_templates(rest, 2, 1), 1);
    CandidatePool empty;
    empty.action = "system.GOODBYE";
    MiningReport report = mine_pools(rest, demos, {empty});
    REQUIRE(report.results.size() == 1);
    CHECK(report.results[0].opt.empty());
    CHECK(to_text(report.results[0].conjunction) == "true");
    REQUIRE_FALSE(report.results[0].flags.empty());
    CHECK(report.results[0].flags[0] == "no candidates");
}

TEST_CASE("adding a demonstration never grows the valid set") {
    DomainSchema rest = restaurants_schema();
    Corpus demos = generate_dialog_demos(rest, dialog_scenario_templates(rest, 6, 9), 9);
    const auto* inform = rest.find_function("system.INFORM");
    GeneratorConfig gen;
    gen.max_pool = 512;
    CandidatePool pool = enumerate_candidates(rest, *inform, gen);

    Corpus some;
    some.schema_name = demos.schema_name;
    std::set<std::string> previous_texts;
    bool first = true;
    for (const auto& traj : demos.trajectories) {
        some.trajectories.push_back(traj);
        auto valid = validate(rest, pool, some);
        std::set<std::string> texts;
        for (const auto& v : valid) texts.insert(to_text(v.expr));
        if (!first) {
            for (const auto& t : texts) CHECK(previous_texts.count(t) == 1);
            CHECK(texts.size() <= previous_texts.size());
        }
        previous_texts = std::move(texts);
        first = false;
    }
}

TEST_CASE("rank matches the brute-force subsumption oracle on random pools") {
    Rng rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        auto fixture = support::random_mining_fixture(rng, /*max_pool=*/24);
        const auto* action = fixture.schema.find_function(fixture.action);
        auto valid = validate(fixture.schema, fixture.pool, fixture.corpus);
        RankedResult fast = rank(fixture.schema, valid, *action, fixture.corpus);
        support::OracleResult slow =
            support::brute_force_rank(fixture.schema, valid, *action, fixture.corpus);
        CHECK(support::same_ranking(fixture.schema, fast, slow, *action, fixture.corpus));
    }
}

TEST_CASE("mining reports serialize to json and text") {
    DomainSchema rest = restaurants_schema();
    Corpus demos = generate_dialog_demos(rest, dialog_scenario_templates(rest, 4, 2), 2);
    MineConfig cfg;
    cfg.generator.max_pool = 512;
    MiningReport report = mine_all(rest, demos, cfg);

    auto j = mining_report_to_json(report, "digest123");
    CHECK(j["manifest_digest"] == "digest123");
    CHECK(j["actions"].contains("system.GOODBYE"));
    CHECK(j["actions"]["system.GOODBYE"].contains("conjunction"));

    std::string text = mining_report_to_text(report);
    CHECK(text.find("system.GOODBYE") != std::string::npos);
    CHECK(text.find("cluster") != std::string::npos);

    // conjunctions reload through the report file
    write_text_file("/tmp/precond_report.json", j.dump(2));
    auto conjunctions = load_mined_conjunctions("/tmp/precond_report.json", rest);
    CHECK(conjunctions.size() == report.results.size());
}
