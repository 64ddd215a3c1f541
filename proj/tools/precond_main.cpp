// precond: mine action preconditions from demonstration programs and use
// them to gate policy predictions.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "precond/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"precondition mining over program trajectories"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    size_t jobs = 1;
    std::string config_path;
    app.add_option("--seed", seed, "base seed; sub-streams derive from it");
    app.add_option("--jobs", jobs, "internal parallelism bound");
    app.add_option("--config", config_path, "JSON config file with option defaults");

    // export-schema
    precond::ExportSchemaOptions export_opt;
    auto* cmd_export = app.add_subcommand("export-schema", "write a domain schema file");
    cmd_export->add_option("--domain", export_opt.domain, "builtin name or schema path")
        ->required();
    cmd_export->add_option("--out", export_opt.out, "output schema json")->required();

    // gen-demos
    precond::GenDemosOptions gen_opt;
    auto* cmd_gen = app.add_subcommand("gen-demos", "generate demonstration/test corpora");
    cmd_gen->add_option("--domain", gen_opt.domain)->required();
    cmd_gen->add_option("--demos", gen_opt.demos, "demonstration count");
    cmd_gen->add_option("--test", gen_opt.test, "held-out count");
    cmd_gen->add_option("--out", gen_opt.out_prefix, "output path prefix")->required();

    // mine
    precond::MineOptions mine_opt;
    auto* cmd_mine_app = app.add_subcommand("mine", "mine preconditions from demonstrations");
    cmd_mine_app->add_option("--domain", mine_opt.domain)->required();
    cmd_mine_app->add_option("--demos", mine_opt.demos_path, "demonstration corpus")->required();
    cmd_mine_app->add_option("--out", mine_opt.out, "mining report json")->required();
    cmd_mine_app->add_option("--generator", mine_opt.generator, "enum or model");
    cmd_mine_app->add_option("--endpoint", mine_opt.endpoint, "completion endpoint URL");
    std::string pool_path;
    cmd_mine_app->add_option("--pool", pool_path, "pre-built candidate pool file");
    cmd_mine_app->add_option("--max-depth", mine_opt.max_depth);
    cmd_mine_app->add_option("--max-pool", mine_opt.max_pool);
    cmd_mine_app->add_option("--samples-per-demo", mine_opt.samples_per_demo);
    cmd_mine_app->add_option("--temperature", mine_opt.temperature);

    // eval-preconds
    precond::EvalPrecondsOptions evalp_opt;
    auto* cmd_evalp = app.add_subcommand("eval-preconds",
                                         "score predicted preconditions against ground truth");
    cmd_evalp->add_option("--domain", evalp_opt.domain)->required();
    cmd_evalp->add_option("--pred", evalp_opt.pred_path, "mining report json, or 'gt'")
        ->required();
    cmd_evalp->add_option("--test", evalp_opt.test_path, "held-out corpus")->required();
    cmd_evalp->add_option("--out", evalp_opt.out)->required();

    // run-policy / eval-policy
    precond::PolicyOptions run_opt;
    auto add_policy_options = [&](CLI::App* cmd, precond::PolicyOptions& opt) {
        cmd->add_option("--domain", opt.domain)->required();
        cmd->add_option("--demos", opt.demos_path)->required();
        cmd->add_option("--test", opt.test_path, "held-out corpus (dialog domains)");
        cmd->add_option("--out", opt.out)->required();
        cmd->add_option("--policy", opt.policy, "frequency or model");
        cmd->add_option("--endpoint", opt.endpoint);
        cmd->add_option("--precond", opt.precond, "none, gt, or mined:<report.json>");
        cmd->add_flag("--precond-prompt", opt.precond_prompt,
                      "include preconditions in the model prompt");
        cmd->add_option("--max-attempts", opt.max_attempts);
        cmd->add_option("--tasks", opt.tasks, "household episode count");
        cmd->add_option("--max-steps", opt.max_steps, "household step budget");
    };
    auto* cmd_run = app.add_subcommand("run-policy", "log per-step policy predictions");
    add_policy_options(cmd_run, run_opt);
    precond::PolicyOptions eval_opt;
    auto* cmd_eval = app.add_subcommand("eval-policy", "aggregate policy metrics");
    add_policy_options(cmd_eval, eval_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            // config files supply endpoint/auth defaults
            auto j = nlohmann::json::parse(precond::read_text_file(config_path));
            if (j.contains("endpoint")) {
                if (mine_opt.endpoint.empty()) mine_opt.endpoint = j["endpoint"];
                if (run_opt.endpoint.empty()) run_opt.endpoint = j["endpoint"];
                if (eval_opt.endpoint.empty()) eval_opt.endpoint = j["endpoint"];
            }
        }
        if (const char* token = std::getenv("PRECOND_MODEL_TOKEN")) {
            mine_opt.auth_token = token;
            run_opt.auth_token = token;
            eval_opt.auth_token = token;
        }
        mine_opt.seed = gen_opt.seed = evalp_opt.seed = run_opt.seed = eval_opt.seed = seed;
        mine_opt.jobs = jobs;
        if (!pool_path.empty()) mine_opt.pool_path = pool_path;

        if (cmd_export->parsed()) {
            precond::cmd_export_schema(export_opt);
        } else if (cmd_gen->parsed()) {
            precond::cmd_gen_demos(gen_opt);
        } else if (cmd_mine_app->parsed()) {
            precond::cmd_mine(mine_opt);
        } else if (cmd_evalp->parsed()) {
            auto metrics = precond::cmd_eval_preconds(evalp_opt);
            std::cout << precond::precond_metrics_to_text(metrics);
        } else if (cmd_run->parsed()) {
            precond::cmd_run_policy(run_opt);
        } else if (cmd_eval->parsed()) {
            auto metrics = precond::cmd_eval_policy(eval_opt);
            std::cout << precond::policy_metrics_to_text(metrics,
                                                         eval_opt.domain != "household");
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
