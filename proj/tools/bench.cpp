// bench: run agents on the tabular environments, sweep hyperparameters and
// print value-iteration solutions.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "dynat/harness.hpp"
#include "dynat/oracle.hpp"

namespace {

int run_command(const dynat::RunConfig& config, const std::string& out_dir) {
    const auto records = dynat::run(config);
    const auto path = dynat::write_run(out_dir, config, records);

    const std::size_t window = std::min<std::size_t>(100, records.size());
    const auto last = dynat::summarize(records, window).back();
    std::cout << path.string() << '\n'
              << "final " << window << "-episode mean return " << dynat::format_double(last.mean) << " (std "
              << dynat::format_double(last.stddev) << ")\n";
    return 0;
}

int sweep_command(const std::string& spec_path, const std::string& out_dir, std::size_t jobs) {
    std::ifstream in(spec_path);
    if (!in) throw dynat::ConfigError("cannot open sweep spec " + spec_path);
    const auto spec = dynat::parse_sweep_spec(in);
    const auto paths = dynat::sweep_to_dir(spec, out_dir, jobs);
    for (const auto& p : paths) std::cout << p.string() << '\n';
    return 0;
}

int oracle_command(const std::string& env_name, double gamma, double tol) {
    const auto env = dynat::make_environment(env_name);
    const auto model = env->true_model();
    const auto u = dynat::value_iteration(model, gamma, tol);
    const auto policy = dynat::greedy_policy(model, u, gamma);
    std::cout << "state,value,action\n";
    for (std::size_t s = 0; s < model.n_states; ++s) {
        std::cout << s << ',' << dynat::format_double(u.values[s]) << ',' << policy[s].index << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular RL benchmark: Q-learning, SARSA(lambda), Dyna-Q, Stochastic Dyna-Q and Dyna-T"};
    app.require_subcommand(1);

    dynat::RunConfig config;
    std::string out_dir = "results";
    std::optional<std::size_t> max_steps;
    std::string schedule = "fixed";
    std::string trace_decay = "lambda";

    auto* run = app.add_subcommand("run", "Run one (env, agent, seed) configuration");
    run->add_option("--env", config.env_name, "cliffwalking | nchain | frozenlake")->required();
    run->add_option("--agent", config.agent_name, "qlearning | sarsa-lambda | dynaq | stochastic-dynaq | dynat")
        ->required();
    run->add_option("--episodes", config.episodes)->required();
    run->add_option("--seed", config.seed)->required();
    run->add_option("--alpha", config.hyperparams.alpha)->capture_default_str();
    run->add_option("--gamma", config.hyperparams.gamma)->capture_default_str();
    run->add_option("--epsilon", config.hyperparams.epsilon)->capture_default_str();
    run->add_option("--lambda", config.hyperparams.lambda)->capture_default_str();
    run->add_option("--c-uct", config.hyperparams.c_uct)->capture_default_str();
    run->add_option("--planning-steps", config.hyperparams.planning_steps)->capture_default_str();
    run->add_option("--max-steps", max_steps, "Override the environment's episode step cap");
    run->add_option("--epsilon-schedule", schedule, "fixed | linear-decay")->capture_default_str();
    run->add_option("--trace-decay", trace_decay, "lambda | gamma-lambda")->capture_default_str();
    run->add_option("--out", out_dir, "Output directory")->required();

    std::string spec_path;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "Run the cartesian product described by a spec file");
    sweep->add_option("--spec", spec_path, "key = value file; lists comma-separated")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    std::string oracle_env;
    double gamma = 0.95;
    double tol = dynat::default_oracle_tol;
    auto* oracle = app.add_subcommand("oracle", "Value iteration on the true model; prints state,value,action");
    oracle->add_option("--env", oracle_env)->required();
    oracle->add_option("--gamma", gamma)->required();
    oracle->add_option("--tol", tol)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            config.max_steps_override = max_steps;
            config.epsilon_schedule.kind = dynat::parse_schedule_kind(schedule);
            config.hyperparams.trace_decay = dynat::parse_trace_decay(trace_decay);
            return run_command(config, out_dir);
        }
        if (*sweep) return sweep_command(spec_path, out_dir, jobs);
        return oracle_command(oracle_env, gamma, tol);
    } catch (const dynat::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
