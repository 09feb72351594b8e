#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynat/agents.hpp"
#include "dynat/core.hpp"
#include "dynat/envs.hpp"

namespace dynat {

enum class EpsilonScheduleKind { fixed, linear_decay };

/// Per-episode exploration rate. `fixed` uses the hyperparameter epsilon
/// throughout; `linear_decay` moves from `start` to `end` over the first
/// `decay_fraction` of the episodes and then holds `end`.
struct EpsilonSchedule {
    EpsilonScheduleKind kind = EpsilonScheduleKind::fixed;
    double start = 1.0;
    double end = 0.01;
    double decay_fraction = 0.5;

    double epsilon_at(std::size_t episode, std::size_t episodes, double fixed_epsilon) const;
};

/// "fixed" | "linear-decay"; ConfigError otherwise.
EpsilonScheduleKind parse_schedule_kind(std::string_view name);
/// "lambda" | "gamma-lambda"; ConfigError otherwise.
TraceDecay parse_trace_decay(std::string_view name);

struct RunConfig {
    std::string env_name = "cliffwalking";
    std::string agent_name = "qlearning";
    Hyperparams hyperparams;
    std::size_t episodes = 100;
    std::optional<std::size_t> max_steps_override;
    std::uint64_t seed = 0;
    EpsilonSchedule epsilon_schedule;

    /// Throws ConfigError on unknown names or out-of-range values.
    void validate() const;
};

struct EpisodeRecord {
    std::string run_id;
    std::size_t episode = 0;
    /// Undiscounted sum of rewards.
    double ret = 0.0;
    std::size_t steps = 0;
    double wall_ms = 0.0;
};

/// Stream ids for Rng::derive. The environment and the agent draw from
/// separate children of the run seed.
inline constexpr std::uint64_t env_stream = 1;
inline constexpr std::uint64_t agent_stream = 2;

/// Resolved configuration as `key = value` lines in a fixed key order.
std::string canonical_config(const RunConfig& config);

/// 16 hex digits of FNV-1a/64 over canonical_config(config).
std::string make_run_id(const RunConfig& config);

/// Executes config.episodes episodes. Fully determined by the config apart
/// from wall_ms.
std::vector<EpisodeRecord> run(const RunConfig& config);

/// Same loop with a caller-supplied agent; env and seeds still come from
/// `config`, `config.agent_name` is only used for the run id.
std::vector<EpisodeRecord> run(const RunConfig& config, Agent& agent);

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view csv_header = "run_id,episode,return,steps,wall_ms";

/// Provenance comment line, the exact header, then one row per record.
/// With include_wall_ms = false the wall_ms column is dropped (used for
/// determinism comparisons).
void write_csv(std::ostream& out, const RunConfig& config, std::span<const EpisodeRecord> records,
               bool include_wall_ms = true);

/// Parses a file produced by write_csv. Lines starting with '#' are skipped.
/// Throws ConfigError naming the line on a schema mismatch.
std::vector<EpisodeRecord> read_csv(std::istream& in);

/// Writes <run_id>.csv and <run_id>.meta into `dir` (created if missing);
/// returns the CSV path.
std::filesystem::path write_run(const std::filesystem::path& dir, const RunConfig& config,
                                std::span<const EpisodeRecord> records);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
    RunConfig base;
    std::vector<double> alpha;
    std::vector<double> gamma;
    std::vector<double> epsilon;
    std::vector<double> lambda;
    std::vector<double> c_uct;
    std::vector<std::size_t> planning_steps;
    std::vector<std::uint64_t> seeds;
    std::size_t max_runs = 10'000;
};

/// Parses flat `key = value` lines; list values are comma-separated. Keys:
/// env, agent, episodes, max_steps, epsilon_schedule, trace_decay, max_runs,
/// seed|seeds, alpha, gamma, epsilon, lambda, c_uct, planning_steps.
SweepSpec parse_sweep_spec(std::istream& in);

/// Cartesian product of the lists (empty list = base value). Throws
/// ConfigError if the product exceeds spec.max_runs.
std::vector<RunConfig> expand_sweep(const SweepSpec& spec);

struct RunResult {
    RunConfig config;
    std::string run_id;
    std::vector<EpisodeRecord> records;
};

/// Runs every expanded configuration on `jobs` worker threads. Results are in
/// expansion order and identical to serial execution (wall_ms aside).
std::vector<RunResult> sweep(const SweepSpec& spec, std::size_t jobs = 1);

/// sweep() followed by write_run() for each result.
std::vector<std::filesystem::path> sweep_to_dir(const SweepSpec& spec, const std::filesystem::path& dir,
                                                std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Summaries

struct WindowStat {
    std::size_t episode = 0;
    double mean = 0.0;
    /// Population standard deviation.
    double stddev = 0.0;
};

/// Trailing-window mean and std of the returns, one entry per episode index
/// >= window - 1. UsageError on empty input, window == 0 or
/// window > number of episodes.
std::vector<WindowStat> summarize(std::span<const double> returns, std::size_t window);
std::vector<WindowStat> summarize(std::span<const EpisodeRecord> records, std::size_t window);

std::vector<double> returns_of(std::span<const EpisodeRecord> records);

/// Number of episodes after which the trailing-`window` mean first reaches
/// `threshold`, or empty if it never does.
std::optional<std::size_t> episodes_to_threshold(std::span<const double> returns, std::size_t window,
                                                 double threshold);

inline constexpr double frozenlake_solved_score = 0.74;
inline constexpr std::size_t solved_window = 100;

/// Any trailing-100 mean >= 0.74.
bool solved(std::span<const EpisodeRecord> records, std::size_t window = solved_window,
            double threshold = frozenlake_solved_score);

}  // namespace dynat
