// Command implementations behind the CLI: each takes explicit options,
// writes its report files (JSON plus a .txt rendering, with a .manifest.json
// sidecar) and returns the primary JSON. Kept out of main() so tests can
// drive the exact same paths.

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "precond/domains.hpp"
#include "precond/evalkit.hpp"
#include "precond/manifest.hpp"
#include "precond/mine.hpp"
#include "precond/model_client.hpp"
#include "precond/policy.hpp"
#include "precond/schema_io.hpp"

namespace precond {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

inline void write_report(const std::string& out_path, const nlohmann::ordered_json& report,
                         const std::string& text, RunManifest manifest,
                         const Stopwatch& watch) {
    nlohmann::ordered_json with_digest = report;
    with_digest["manifest_digest"] = manifest.digest();
    write_text_file(out_path, with_digest.dump(2) + "\n");
    write_text_file(out_path + ".txt", text);
    manifest.elapsed_ms = watch.ms();
    write_text_file(out_path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

inline DomainSchema load_domain(const std::string& domain_or_path) {
    if (domain_or_path == "restaurants" || domain_or_path == "buses" ||
        domain_or_path == "household")
        return builtin_schema(domain_or_path);
    return load_schema(domain_or_path);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct ExportSchemaOptions {
    std::string domain;  // builtin name or schema file path
    std::string out;
};

inline void cmd_export_schema(const ExportSchemaOptions& opt) {
    detail::Stopwatch watch;
    DomainSchema schema = detail::load_domain(opt.domain);
    save_schema(schema, opt.out);
    RunManifest manifest;
    manifest.command = "export-schema " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.elapsed_ms = watch.ms();
    write_text_file(opt.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct GenDemosOptions {
    std::string domain;
    size_t demos = 10;
    size_t test = 50;
    uint64_t seed = 0;
    std::string out_prefix;  // writes <prefix>.demos.corpus / <prefix>.test.corpus
};

inline void cmd_gen_demos(const GenDemosOptions& opt) {
    if (opt.demos == 0) throw CliError("--demos must be positive");
    detail::Stopwatch watch;
    DomainSchema schema = detail::load_domain(opt.domain);

    const auto generate = [&](size_t count, uint64_t seed, const std::string& prefix) {
        if (schema.name == "household") {
            const size_t per_kind = (count + 5) / 6;
            Corpus c = generate_household_demos(schema, per_kind, seed, prefix);
            c.trajectories.resize(std::min(c.trajectories.size(), count));
            return c;
        }
        auto scenarios = dialog_scenario_templates(schema, count, seed);
        return generate_dialog_demos(schema, scenarios, seed, prefix);
    };

    Corpus demos = generate(opt.demos, derive_seed(opt.seed, "demos"), "demo");
    Corpus test = generate(opt.test, derive_seed(opt.seed, "test"), "test");

    // Generator correctness gate: every demonstration must satisfy every
    // action's ground truth.
    for (const Corpus* corpus : {&demos, &test}) {
        for (const auto& traj : corpus->trajectories)
            for (const auto* fn : schema.actions())
                if (fn->gt_precondition) {
                    auto outcome =
                        execute_with_precondition(schema, traj, fn->name, fn->gt_precondition);
                    if (!outcome.ok())
                        throw GenerationError("generated trajectory '" + traj.id +
                                              "' violates gt precondition of " + fn->name);
                }
    }

    write_corpus(demos, opt.out_prefix + ".demos.corpus");
    write_corpus(test, opt.out_prefix + ".test.corpus");

    RunManifest manifest;
    manifest.command = "gen-demos " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.config["demos"] = opt.demos;
    manifest.config["test"] = opt.test;
    manifest.seed = opt.seed;
    manifest.elapsed_ms = watch.ms();
    write_text_file(opt.out_prefix + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct MineOptions {
    std::string domain;
    std::string demos_path;
    std::string out;
    std::string generator = "enum";  // enum | model
    std::string endpoint;            // model generator only
    std::string auth_token;
    std::optional<std::string> pool_path;  // mine a pre-built pool file instead
    int max_depth = 2;
    size_t max_pool = 4096;
    int samples_per_demo = 5;
    double temperature = 0.8;
    uint64_t seed = 0;
    size_t jobs = 1;
};

inline MiningReport cmd_mine(const MineOptions& opt) {
    detail::Stopwatch watch;
    DomainSchema schema = detail::load_domain(opt.domain);
    Corpus demos = parse_corpus(opt.demos_path, schema);

    MiningReport report;
    MineConfig cfg;
    cfg.generator.max_depth = opt.max_depth;
    cfg.generator.max_pool = opt.max_pool;
    cfg.generator.samples_per_demo = opt.samples_per_demo;
    cfg.generator.temperature = opt.temperature;
    cfg.jobs = opt.jobs;

    if (opt.pool_path) {
        auto pools = load_pools(*opt.pool_path, schema);
        report = mine_pools(schema, demos, pools);
        report.config = cfg;
    } else if (opt.generator == "model") {
        if (opt.endpoint.empty())
            throw CliError("--generator model requires --endpoint");
        cfg.use_model = true;
        HttpCompletionClient client(opt.endpoint, opt.auth_token);
        report = mine_all(schema, demos, cfg, &client);
    } else if (opt.generator == "enum") {
        report = mine_all(schema, demos, cfg);
    } else {
        throw CliError("unknown generator '" + opt.generator + "'");
    }

    RunManifest manifest;
    manifest.command = "mine " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.config["generator"] = opt.generator;
    manifest.config["max_depth"] = opt.max_depth;
    manifest.config["max_pool"] = opt.max_pool;
    manifest.seed = opt.seed;
    manifest.add_input(opt.demos_path);
    if (opt.pool_path) manifest.add_input(*opt.pool_path);

    detail::write_report(opt.out, mining_report_to_json(report, manifest.digest()),
                         mining_report_to_text(report), manifest, watch);
    return report;
}

// ---------------------------------------------------------------------------

struct EvalPrecondsOptions {
    std::string domain;
    std::string pred_path;  // mining report json, or "gt"
    std::string test_path;
    std::string out;
    uint64_t seed = 0;
};

inline PrecondMetrics cmd_eval_preconds(const EvalPrecondsOptions& opt) {
    detail::Stopwatch watch;
    DomainSchema schema = detail::load_domain(opt.domain);
    Corpus test = parse_corpus(opt.test_path, schema);

    std::map<std::string, ExprPtr> gt = gt_precondition_map(schema);
    std::map<std::string, ExprPtr> pred =
        opt.pred_path == "gt" ? gt : load_mined_conjunctions(opt.pred_path, schema);

    PrecondMetrics metrics = precond_prf(schema, pred, gt, test);

    RunManifest manifest;
    manifest.command = "eval-preconds " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.config["pred"] = opt.pred_path;
    manifest.seed = opt.seed;
    if (opt.pred_path != "gt") manifest.add_input(opt.pred_path);
    manifest.add_input(opt.test_path);

    detail::write_report(opt.out, precond_metrics_to_json(metrics),
                         precond_metrics_to_text(metrics), manifest, watch);
    return metrics;
}

// ---------------------------------------------------------------------------

struct PolicyOptions {
    std::string domain;
    std::string demos_path;
    std::string test_path;          // dialog: corpus; household: ignored
    std::string out;
    std::string policy = "frequency";  // frequency | model
    std::string endpoint;
    std::string auth_token;
    std::string precond = "none";   // none | gt | mined:<report.json>
    bool precond_prompt = false;
    int max_attempts = 8;
    uint64_t seed = 0;
    size_t tasks = 20;              // household episodes
    size_t max_steps = 30;
};

namespace detail {

struct PolicyBundle {
    DomainSchema schema;
    Corpus demos;
    std::unique_ptr<BasePolicy> policy;
    std::unique_ptr<CompletionClient> client;
    std::map<std::string, ExprPtr> preconditions;
    bool use_preconditions = false;
};

inline PolicyBundle make_policy_bundle(const PolicyOptions& opt) {
    PolicyBundle b;
    b.schema = detail::load_domain(opt.domain);
    b.demos = parse_corpus(opt.demos_path, b.schema);

    if (opt.policy == "frequency") {
        b.policy = std::make_unique<FrequencyPolicy>(b.schema, b.demos);
    } else if (opt.policy == "model") {
        if (opt.endpoint.empty()) throw CliError("--policy model requires --endpoint");
        b.client = std::make_unique<HttpCompletionClient>(opt.endpoint, opt.auth_token);
        b.policy = std::make_unique<ModelPolicy>(*b.client);
    } else {
        throw CliError("unknown policy '" + opt.policy + "'");
    }

    if (opt.precond == "gt") {
        b.preconditions = gt_precondition_map(b.schema);
        b.use_preconditions = true;
    } else if (opt.precond.rfind("mined:", 0) == 0) {
        b.preconditions = load_mined_conjunctions(opt.precond.substr(6), b.schema);
        b.use_preconditions = true;
    } else if (opt.precond != "none") {
        throw CliError("unknown --precond '" + opt.precond + "'");
    }
    return b;
}

inline std::vector<std::pair<WorldState, Task>> household_eval_runs(size_t tasks,
                                                                    uint64_t seed) {
    const auto roster = household_task_roster();
    std::vector<std::pair<WorldState, Task>> runs;
    for (size_t i = 0; i < tasks; ++i) {
        const Task& task = roster[i % roster.size()];
        WorldState world = make_household_world(derive_seed(seed, "eval-world-" + std::to_string(i)));
        runs.push_back({world, task});
    }
    return runs;
}

}  // namespace detail

/// Steps the policy over the test set and logs every SampleResult.
inline nlohmann::ordered_json cmd_run_policy(const PolicyOptions& opt) {
    detail::Stopwatch watch;
    auto bundle = detail::make_policy_bundle(opt);
    const auto* precond = bundle.use_preconditions ? &bundle.preconditions : nullptr;

    nlohmann::ordered_json log = nlohmann::ordered_json::array();
    std::string text;

    if (bundle.schema.name == "household") {
        auto runs = detail::household_eval_runs(opt.tasks, opt.seed);
        for (size_t r = 0; r < runs.size(); ++r) {
            PolicyProposer proposer(bundle.schema, bundle.demos, *bundle.policy, precond,
                                    opt.max_attempts, derive_seed(opt.seed, std::to_string(r)));
            SimResult sim = simulate(bundle.schema, runs[r].first, runs[r].second, proposer,
                                     opt.max_steps, "run-" + std::to_string(r));
            for (size_t s = 0; s < sim.steps.size(); ++s) {
                nlohmann::ordered_json je;
                je["episode"] = r;
                je["step"] = s;
                je["call"] = detail::call_token(sim.steps[s].call);
                je["compatible"] = sim.steps[s].compatible;
                je["applied"] = sim.steps[s].applied;
                log.push_back(je);
            }
            text += "episode " + std::to_string(r) + ": " +
                    (sim.success ? "success" : "failure") + ", " +
                    std::to_string(sim.steps.size()) + " steps\n";
        }
    } else {
        Corpus test = parse_corpus(opt.test_path, bundle.schema);
        for (const auto& ref : test.trajectories) {
            for (size_t t = 0; t <= ref.calls.size(); ++t) {
                if (t == ref.calls.size()) break;
                const auto* fn = bundle.schema.find_function(ref.calls[t].fn);
                if (!fn || !fn->is_action()) continue;
                Trajectory pfx = prefix(ref, t);
                PolicyContext ctx;
                ctx.schema = &bundle.schema;
                ctx.demos = &bundle.demos;
                ctx.prefix = &pfx;
                ctx.preconditions = precond;
                ctx.allow_end_of_turn = true;
                SampleResult r = sample_with_verification(
                    ctx, *bundle.policy, opt.max_attempts,
                    derive_seed(opt.seed, ref.id + ":" + std::to_string(t)));
                nlohmann::ordered_json je;
                je["trajectory"] = ref.id;
                je["step"] = t;
                je["predicted"] = r.prediction.end_of_turn
                                      ? std::string("<end_of_turn>")
                                      : detail::call_token(r.prediction.call);
                je["reference"] = detail::call_token(ref.calls[t]);
                je["verified"] = r.verified;
                je["attempts"] = r.attempts;
                je["fallback_used"] = r.fallback_used;
                log.push_back(je);
            }
        }
        text = "logged " + std::to_string(log.size()) + " predictions\n";
    }

    RunManifest manifest;
    manifest.command = "run-policy " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.config["policy"] = opt.policy;
    manifest.config["precond"] = opt.precond;
    manifest.config["max_attempts"] = opt.max_attempts;
    manifest.seed = opt.seed;
    manifest.add_input(opt.demos_path);
    if (!opt.test_path.empty()) manifest.add_input(opt.test_path);

    nlohmann::ordered_json report;
    report["steps"] = log;
    detail::write_report(opt.out, report, text, manifest, watch);
    return report;
}

inline PolicyMetrics cmd_eval_policy(const PolicyOptions& opt) {
    detail::Stopwatch watch;
    auto bundle = detail::make_policy_bundle(opt);

    PolicyEvalConfig cfg;
    cfg.max_attempts = opt.max_attempts;
    cfg.seed = opt.seed;
    cfg.preconditions = bundle.use_preconditions ? &bundle.preconditions : nullptr;

    PolicyMetrics metrics;
    const bool dialog = bundle.schema.name != "household";
    if (dialog) {
        Corpus test = parse_corpus(opt.test_path, bundle.schema);
        metrics = policy_eval_dialog(bundle.schema, bundle.demos, *bundle.policy, test, cfg);
    } else {
        auto runs = detail::household_eval_runs(opt.tasks, opt.seed);
        metrics = policy_eval_household(bundle.schema, bundle.demos, *bundle.policy, runs,
                                        opt.max_steps, cfg);
    }

    RunManifest manifest;
    manifest.command = "eval-policy " + opt.domain;
    manifest.config["domain"] = opt.domain;
    manifest.config["policy"] = opt.policy;
    manifest.config["precond"] = opt.precond;
    manifest.config["max_attempts"] = opt.max_attempts;
    manifest.config["tasks"] = opt.tasks;
    manifest.config["max_steps"] = opt.max_steps;
    manifest.seed = opt.seed;
    manifest.add_input(opt.demos_path);
    if (!opt.test_path.empty()) manifest.add_input(opt.test_path);

    detail::write_report(opt.out, policy_metrics_to_json(metrics, dialog),
                         policy_metrics_to_text(metrics, dialog), manifest, watch);
    return metrics;
}

}  // namespace precond
