#include "dynat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace dynat {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    for (;;) {
        const auto pos = s.find(sep);
        parts.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("invalid " + std::string(what) + " value '" + std::string(text) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
    std::vector<T> out;
    for (auto part : split(text, ',')) out.push_back(parse_number<T>(part, what));
    return out;
}

std::string_view schedule_name(EpsilonScheduleKind k) {
    return k == EpsilonScheduleKind::fixed ? "fixed" : "linear-decay";
}

std::string_view trace_decay_name(TraceDecay d) { return d == TraceDecay::lambda ? "lambda" : "gamma-lambda"; }

std::size_t resolved_max_steps(const RunConfig& c) {
    if (c.max_steps_override) return *c.max_steps_override;
    return make_environment(c.env_name)->spec().max_steps_per_episode;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

EpsilonScheduleKind parse_schedule_kind(std::string_view name) {
    if (name == "fixed") return EpsilonScheduleKind::fixed;
    if (name == "linear-decay") return EpsilonScheduleKind::linear_decay;
    throw ConfigError("unknown epsilon schedule '" + std::string(name) + "' (expected fixed or linear-decay)");
}

TraceDecay parse_trace_decay(std::string_view name) {
    if (name == "lambda") return TraceDecay::lambda;
    if (name == "gamma-lambda") return TraceDecay::gamma_lambda;
    throw ConfigError("unknown trace decay '" + std::string(name) + "' (expected lambda or gamma-lambda)");
}

double EpsilonSchedule::epsilon_at(std::size_t episode, std::size_t episodes, double fixed_epsilon) const {
    if (kind == EpsilonScheduleKind::fixed) return fixed_epsilon;
    const double horizon = decay_fraction * static_cast<double>(episodes);
    if (horizon <= 0.0) return end;
    const double progress = std::min(1.0, static_cast<double>(episode) / horizon);
    return start + (end - start) * progress;
}

void RunConfig::validate() const {
    const auto envs = environment_names();
    if (std::find(envs.begin(), envs.end(), env_name) == envs.end()) {
        throw ConfigError("unknown environment '" + env_name + "'");
    }
    const auto agents = agent_names();
    if (std::find(agents.begin(), agents.end(), agent_name) == agents.end()) {
        throw ConfigError("unknown agent '" + agent_name + "'");
    }
    if (episodes == 0) throw ConfigError("episodes must be positive");
    if (max_steps_override && *max_steps_override == 0) throw ConfigError("max_steps must be positive");
    hyperparams.validate();
    const auto& e = epsilon_schedule;
    if (!(e.start >= 0.0 && e.start <= 1.0 && e.end >= 0.0 && e.end <= 1.0 && e.decay_fraction >= 0.0)) {
        throw ConfigError("epsilon schedule out of range");
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string canonical_config(const RunConfig& c) {
    const auto& h = c.hyperparams;
    std::ostringstream out;
    out << "env = " << c.env_name << '\n'
        << "agent = " << c.agent_name << '\n'
        << "episodes = " << c.episodes << '\n'
        << "max_steps = " << resolved_max_steps(c) << '\n'
        << "seed = " << c.seed << '\n'
        << "alpha = " << format_double(h.alpha) << '\n'
        << "gamma = " << format_double(h.gamma) << '\n'
        << "epsilon = " << format_double(h.epsilon) << '\n'
        << "lambda = " << format_double(h.lambda) << '\n'
        << "c_uct = " << format_double(h.c_uct) << '\n'
        << "planning_steps = " << h.planning_steps << '\n'
        << "trace_decay = " << trace_decay_name(h.trace_decay) << '\n'
        << "epsilon_schedule = " << schedule_name(c.epsilon_schedule.kind) << '\n';
    if (c.epsilon_schedule.kind == EpsilonScheduleKind::linear_decay) {
        out << "epsilon_start = " << format_double(c.epsilon_schedule.start) << '\n'
            << "epsilon_end = " << format_double(c.epsilon_schedule.end) << '\n'
            << "epsilon_decay_fraction = " << format_double(c.epsilon_schedule.decay_fraction) << '\n';
    }
    return out.str();
}

std::string make_run_id(const RunConfig& config) {
    static constexpr char digits[] = "0123456789abcdef";
    std::uint64_t h = fnv1a64(canonical_config(config));
    std::string id(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) id[static_cast<std::size_t>(i)] = digits[h & 0xF];
    return id;
}

// ---------------------------------------------------------------------------
// Runs

std::vector<EpisodeRecord> run(const RunConfig& config, Agent& agent) {
    config.validate();
    using clock = std::chrono::steady_clock;

    auto env = make_environment(config.env_name, config.max_steps_override);
    Rng env_rng(Rng::derive(config.seed, env_stream));
    Rng agent_rng(Rng::derive(config.seed, agent_stream));
    const std::string run_id = make_run_id(config);

    std::vector<EpisodeRecord> records;
    records.reserve(config.episodes);
    for (std::size_t ep = 0; ep < config.episodes; ++ep) {
        const auto t0 = clock::now();
        agent.set_epsilon(config.epsilon_schedule.epsilon_at(ep, config.episodes, config.hyperparams.epsilon));

        StateId s = env->reset(env_rng);
        agent.begin_episode(s);
        double ret = 0.0;
        std::size_t steps = 0;
        for (;;) {
            const ActionId a = agent.select(s, agent_rng);
            const StepOutcome out = env->step(a, env_rng);
            agent.observe(Transition{s, a, out.reward, out.next_state, out.terminal}, agent_rng);
            ret += out.reward;
            ++steps;
            if (out.done()) break;
            s = out.next_state;
        }

        const std::chrono::duration<double, std::milli> wall = clock::now() - t0;
        records.push_back(EpisodeRecord{run_id, ep, ret, steps, wall.count()});
    }
    return records;
}

std::vector<EpisodeRecord> run(const RunConfig& config) {
    config.validate();
    const auto env = make_environment(config.env_name, config.max_steps_override);
    auto agent = make_agent(config.agent_name, env->spec(), config.hyperparams);
    return run(config, *agent);
}

// ---------------------------------------------------------------------------
// Persistence

void write_csv(std::ostream& out, const RunConfig& config, std::span<const EpisodeRecord> records,
               bool include_wall_ms) {
    out << "# run_id=" << make_run_id(config);
    std::istringstream lines(canonical_config(config));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find(" = ");
        out << ' ' << line.substr(0, eq) << '=' << line.substr(eq + 3);
    }
    out << '\n';

    if (include_wall_ms) {
        out << csv_header << '\n';
    } else {
        out << "run_id,episode,return,steps\n";
    }
    for (const auto& r : records) {
        out << r.run_id << ',' << r.episode << ',' << format_double(r.ret) << ',' << r.steps;
        if (include_wall_ms) {
            char buf[32];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r.wall_ms, std::chars_format::fixed, 6);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

std::vector<EpisodeRecord> read_csv(std::istream& in) {
    std::vector<EpisodeRecord> records;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto where = "line " + std::to_string(line_no);
        if (!header_seen) {
            if (line != csv_header) throw ConfigError(where + ": expected header '" + std::string(csv_header) + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 5) throw ConfigError(where + ": expected 5 fields");
        EpisodeRecord r;
        r.run_id = std::string(fields[0]);
        r.episode = parse_number<std::size_t>(fields[1], where + " episode");
        r.ret = parse_number<double>(fields[2], where + " return");
        r.steps = parse_number<std::size_t>(fields[3], where + " steps");
        r.wall_ms = parse_number<double>(fields[4], where + " wall_ms");
        records.push_back(std::move(r));
    }
    if (!header_seen) throw ConfigError("missing CSV header");
    return records;
}

std::filesystem::path write_run(const std::filesystem::path& dir, const RunConfig& config,
                                std::span<const EpisodeRecord> records) {
    std::filesystem::create_directories(dir);
    const std::string id = make_run_id(config);
    const auto csv_path = dir / (id + ".csv");
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + csv_path.string());
        write_csv(csv, config, records);
    }
    std::ofstream meta(dir / (id + ".meta"), std::ios::binary);
    if (!meta) throw ConfigError("cannot write " + (dir / (id + ".meta")).string());
    meta << "run_id = " << id << '\n' << canonical_config(config);
    return csv_path;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepSpec parse_sweep_spec(std::istream& in) {
    SweepSpec spec;
    auto& base = spec.base;
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("sweep spec line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "env") {
            base.env_name = std::string(value);
        } else if (key == "agent") {
            base.agent_name = std::string(value);
        } else if (key == "episodes") {
            base.episodes = parse_number<std::size_t>(value, key);
        } else if (key == "max_steps") {
            base.max_steps_override = parse_number<std::size_t>(value, key);
        } else if (key == "epsilon_schedule") {
            base.epsilon_schedule.kind = parse_schedule_kind(value);
        } else if (key == "trace_decay") {
            base.hyperparams.trace_decay = parse_trace_decay(value);
        } else if (key == "max_runs") {
            spec.max_runs = parse_number<std::size_t>(value, key);
        } else if (key == "seed" || key == "seeds") {
            spec.seeds = parse_list<std::uint64_t>(value, key);
        } else if (key == "alpha") {
            spec.alpha = parse_list<double>(value, key);
        } else if (key == "gamma") {
            spec.gamma = parse_list<double>(value, key);
        } else if (key == "epsilon") {
            spec.epsilon = parse_list<double>(value, key);
        } else if (key == "lambda") {
            spec.lambda = parse_list<double>(value, key);
        } else if (key == "c_uct" || key == "c-uct") {
            spec.c_uct = parse_list<double>(value, key);
        } else if (key == "planning_steps" || key == "planning-steps") {
            spec.planning_steps = parse_list<std::size_t>(value, key);
        } else {
            throw ConfigError("sweep spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return spec;
}

std::vector<RunConfig> expand_sweep(const SweepSpec& spec) {
    const auto& b = spec.base;
    const auto& h = b.hyperparams;
    auto or_base = [](const auto& list, auto fallback) {
        using T = std::decay_t<decltype(fallback)>;
        return list.empty() ? std::vector<T>{fallback} : std::vector<T>(list.begin(), list.end());
    };
    const auto alphas = or_base(spec.alpha, h.alpha);
    const auto gammas = or_base(spec.gamma, h.gamma);
    const auto epsilons = or_base(spec.epsilon, h.epsilon);
    const auto lambdas = or_base(spec.lambda, h.lambda);
    const auto cs = or_base(spec.c_uct, h.c_uct);
    const auto plans = or_base(spec.planning_steps, h.planning_steps);
    const auto seeds = or_base(spec.seeds, b.seed);

    const std::size_t total = alphas.size() * gammas.size() * epsilons.size() * lambdas.size() * cs.size() *
                              plans.size() * seeds.size();
    if (total > spec.max_runs) {
        throw ConfigError("sweep expands to " + std::to_string(total) + " runs, above the cap of " +
                          std::to_string(spec.max_runs));
    }

    std::vector<RunConfig> configs;
    configs.reserve(total);
    for (double alpha : alphas)
        for (double gamma : gammas)
            for (double epsilon : epsilons)
                for (double lambda : lambdas)
                    for (double c : cs)
                        for (std::size_t plan : plans)
                            for (std::uint64_t seed : seeds) {
                                RunConfig c_run = b;
                                c_run.hyperparams.alpha = alpha;
                                c_run.hyperparams.gamma = gamma;
                                c_run.hyperparams.epsilon = epsilon;
                                c_run.hyperparams.lambda = lambda;
                                c_run.hyperparams.c_uct = c;
                                c_run.hyperparams.planning_steps = plan;
                                c_run.seed = seed;
                                configs.push_back(std::move(c_run));
                            }
    for (const auto& c : configs) c.validate();
    return configs;
}

std::vector<RunResult> sweep(const SweepSpec& spec, std::size_t jobs) {
    const auto configs = expand_sweep(spec);
    std::vector<RunResult> results(configs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = RunResult{configs[i], make_run_id(configs[i]), run(configs[i])};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, configs.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<std::filesystem::path> sweep_to_dir(const SweepSpec& spec, const std::filesystem::path& dir,
                                                std::size_t jobs) {
    std::vector<std::filesystem::path> paths;
    for (const auto& r : sweep(spec, jobs)) paths.push_back(write_run(dir, r.config, r.records));
    return paths;
}

// ---------------------------------------------------------------------------
// Summaries

std::vector<WindowStat> summarize(std::span<const double> returns, std::size_t window) {
    if (returns.empty()) throw UsageError("summarize: no records");
    if (window == 0 || window > returns.size()) throw UsageError("summarize: window must lie in [1, episodes]");

    std::vector<WindowStat> stats;
    stats.reserve(returns.size() - window + 1);
    for (std::size_t end = window; end <= returns.size(); ++end) {
        const auto slice = returns.subspan(end - window, window);
        double mean = 0.0;
        for (double r : slice) mean += r;
        mean /= static_cast<double>(window);
        double var = 0.0;
        for (double r : slice) var += (r - mean) * (r - mean);
        var /= static_cast<double>(window);
        stats.push_back(WindowStat{end - 1, mean, std::sqrt(var)});
    }
    return stats;
}

std::vector<double> returns_of(std::span<const EpisodeRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.ret);
    return out;
}

std::vector<WindowStat> summarize(std::span<const EpisodeRecord> records, std::size_t window) {
    const auto rets = returns_of(records);
    return summarize(std::span<const double>(rets), window);
}

std::optional<std::size_t> episodes_to_threshold(std::span<const double> returns, std::size_t window,
                                                 double threshold) {
    if (window == 0) throw UsageError("episodes_to_threshold: window must be positive");
    for (std::size_t end = window; end <= returns.size(); ++end) {
        double sum = 0.0;
        for (std::size_t k = end - window; k < end; ++k) sum += returns[k];
        if (sum / static_cast<double>(window) >= threshold) return end;
    }
    return std::nullopt;
}

bool solved(std::span<const EpisodeRecord> records, std::size_t window, double threshold) {
    const auto rets = returns_of(records);
    return episodes_to_threshold(rets, window, threshold).has_value();
}

}  // namespace dynat
