#include "dynat/agents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace dynat {

// ---------------------------------------------------------------------------
// DeterministicModel

DeterministicModel::DeterministicModel(std::size_t n_states, std::size_t n_actions)
    : n_actions_(n_actions), entries_(n_states * n_actions) {}

void DeterministicModel::observe(const Transition& t) {
    auto& slot = entries_[t.state.index * n_actions_ + t.action.index];
    if (!slot) keys_.emplace_back(t.state, t.action);
    slot = Entry{t.reward, t.next_state, t.terminal};
}

std::optional<DeterministicModel::Entry> DeterministicModel::lookup(StateId s, ActionId a) const {
    return entries_[s.index * n_actions_ + a.index];
}

std::pair<StateId, ActionId> DeterministicModel::sample_key(Rng& rng) const {
    if (keys_.empty()) throw UsageError("DeterministicModel: sampling an empty model");
    return keys_[rng.uniform_int(keys_.size())];
}

// ---------------------------------------------------------------------------
// StochasticModel

StochasticModel::StochasticModel(std::size_t n_states, std::size_t n_actions)
    : n_actions_(n_actions), n_sa_(n_states * n_actions, 0), successors_(n_states * n_actions) {}

void StochasticModel::observe(const Transition& t) {
    const std::size_t i = index(t.state, t.action);
    if (n_sa_[i]++ == 0) keys_.emplace_back(t.state, t.action);

    for (auto& succ : successors_[i]) {
        if (succ.next_state == t.next_state) {
            ++succ.count;
            succ.reward_mean += (t.reward - succ.reward_mean) / static_cast<double>(succ.count);
            succ.terminal = t.terminal;
            return;
        }
    }
    successors_[i].push_back(Successor{t.next_state, 1, t.reward, t.terminal});
}

std::size_t StochasticModel::n_sas(StateId s, ActionId a, StateId next) const {
    for (const auto& succ : successors_[index(s, a)]) {
        if (succ.next_state == next) return succ.count;
    }
    return 0;
}

std::pair<StateId, ActionId> StochasticModel::sample_key(Rng& rng) const {
    if (keys_.empty()) throw UsageError("StochasticModel: sampling an empty model");
    return keys_[rng.uniform_int(keys_.size())];
}

// ---------------------------------------------------------------------------
// EligibilityTable / VisitCounts

EligibilityTable::EligibilityTable(std::size_t n_states, std::size_t n_actions)
    : n_actions_(n_actions), traces_(n_states * n_actions, 0.0) {}

void EligibilityTable::scale(double factor) {
    for (double& z : traces_) z *= factor;
}

void EligibilityTable::clear() { std::fill(traces_.begin(), traces_.end(), 0.0); }

VisitCounts::VisitCounts(std::size_t n_states, std::size_t n_actions)
    : n_actions_(n_actions), n_s_(n_states, 0), n_sa_(n_states * n_actions, 0) {}

// ---------------------------------------------------------------------------
// Update rules

void q_update(QTable& q, const Transition& t, const Hyperparams& h) {
    const double bootstrap = t.terminal ? 0.0 : q.max(t.next_state);
    double& value = q(t.state, t.action);
    value += h.alpha * (t.reward + h.gamma * bootstrap - value);
}

void sarsa_lambda_update(QTable& q, EligibilityTable& z, const SarsaStep& step, const Hyperparams& h) {
    z.add(step.state, step.action);
    const double next_value = step.next_action ? q(step.next_state, *step.next_action) : 0.0;
    const double delta = step.reward + h.gamma * next_value - q(step.state, step.action);

    if (delta != 0.0) {
        auto values = q.values();
        auto traces = z.values();
        const double scale = h.alpha * delta;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += scale * traces[i];
    }
    z.scale(h.trace_decay == TraceDecay::gamma_lambda ? h.gamma * h.lambda : h.lambda);
}

void dynaq_observe_and_plan(QTable& q, DeterministicModel& model, const Transition& t, const Hyperparams& h,
                            Rng& rng) {
    q_update(q, t, h);
    model.observe(t);
    for (std::size_t k = 0; k < h.planning_steps; ++k) {
        const auto [s, a] = model.sample_key(rng);
        const auto entry = *model.lookup(s, a);
        q_update(q, Transition{s, a, entry.reward, entry.next_state, entry.terminal}, h);
    }
}

double stochastic_plan_target(const StochasticModel& model, const QTable& q, StateId s, ActionId a, double gamma) {
    const std::size_t n = model.n_sa(s, a);
    if (n == 0) throw UsageError("stochastic_plan_target: (s, a) was never observed");

    double target = 0.0;
    for (const auto& succ : model.successors(s, a)) {
        const double bootstrap = succ.terminal ? 0.0 : q.max(succ.next_state);
        target += static_cast<double>(succ.count) * (succ.reward_mean + gamma * bootstrap);
    }
    return target / static_cast<double>(n);
}

void stochastic_dynaq_observe_and_plan(QTable& q, StochasticModel& model, const Transition& t,
                                       const Hyperparams& h, Rng& rng) {
    q_update(q, t, h);
    model.observe(t);
    for (std::size_t k = 0; k < h.planning_steps; ++k) {
        const auto [s, a] = model.sample_key(rng);
        double& value = q(s, a);
        value += h.alpha * (stochastic_plan_target(model, q, s, a, h.gamma) - value);
    }
}

void uct_bounds(const QTable& q, const VisitCounts& counts, StateId s, double c, std::span<double> out) {
    const auto row = q.row(s);
    if (out.size() != row.size()) throw UsageError("uct_bounds: output size mismatch");
    if (c == 0.0) {
        std::copy(row.begin(), row.end(), out.begin());
        return;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n_s = counts.n_s(s);
    const double log_n = n_s > 0 ? std::log(static_cast<double>(n_s)) : 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
        const std::size_t n_sa = counts.n_sa(s, ActionId{a});
        out[a] = (n_s == 0 || n_sa == 0) ? inf : row[a] + c * std::sqrt(log_n / static_cast<double>(n_sa));
    }
}

ActionId uct_select(const QTable& q, const VisitCounts& counts, StateId s, double c, Rng& rng) {
    if (!(c >= 0.0)) throw UsageError("uct_select: exploration constant must be >= 0");
    std::array<double, 16> small{};
    std::vector<double> large;
    std::span<double> bounds;
    if (q.n_actions() <= small.size()) {
        bounds = std::span<double>(small.data(), q.n_actions());
    } else {
        large.resize(q.n_actions());
        bounds = large;
    }
    uct_bounds(q, counts, s, c, bounds);
    return argmax_tiebreak(bounds, rng);
}

// ---------------------------------------------------------------------------
// Agents

Agent::Agent(const EnvSpec& spec, const Hyperparams& h)
    : q_(spec.n_states, spec.n_actions), h_(h), epsilon_(h.epsilon) {
    h_.validate();
}

ActionId QLearningAgent::select(StateId s, Rng& rng) { return epsilon_greedy(q_.row(s), epsilon_, rng); }

void QLearningAgent::observe(const Transition& t, Rng& /*rng*/) { q_update(q_, t, h_); }

SarsaLambdaAgent::SarsaLambdaAgent(const EnvSpec& spec, const Hyperparams& h)
    : Agent(spec, h), z_(spec.n_states, spec.n_actions) {}

void SarsaLambdaAgent::begin_episode(StateId /*start*/) {
    z_.clear();
    pending_.reset();
}

ActionId SarsaLambdaAgent::select(StateId s, Rng& rng) {
    if (pending_ && pending_->first == s) {
        const ActionId a = pending_->second;
        pending_.reset();
        return a;
    }
    pending_.reset();
    return epsilon_greedy(q_.row(s), epsilon_, rng);
}

void SarsaLambdaAgent::observe(const Transition& t, Rng& rng) {
    std::optional<ActionId> next_action;
    if (!t.terminal) next_action = epsilon_greedy(q_.row(t.next_state), epsilon_, rng);
    sarsa_lambda_update(q_, z_, SarsaStep{t.state, t.action, t.reward, t.next_state, next_action}, h_);
    if (next_action) {
        pending_.emplace(t.next_state, *next_action);
    } else {
        pending_.reset();
    }
}

DynaQAgent::DynaQAgent(const EnvSpec& spec, const Hyperparams& h)
    : Agent(spec, h), model_(spec.n_states, spec.n_actions) {}

ActionId DynaQAgent::select(StateId s, Rng& rng) { return epsilon_greedy(q_.row(s), epsilon_, rng); }

void DynaQAgent::observe(const Transition& t, Rng& rng) { dynaq_observe_and_plan(q_, model_, t, h_, rng); }

StochasticDynaQAgent::StochasticDynaQAgent(const EnvSpec& spec, const Hyperparams& h)
    : Agent(spec, h), model_(spec.n_states, spec.n_actions) {}

ActionId StochasticDynaQAgent::select(StateId s, Rng& rng) { return epsilon_greedy(q_.row(s), epsilon_, rng); }

void StochasticDynaQAgent::observe(const Transition& t, Rng& rng) {
    stochastic_dynaq_observe_and_plan(q_, model_, t, h_, rng);
}

DynaTAgent::DynaTAgent(const EnvSpec& spec, const Hyperparams& h)
    : StochasticDynaQAgent(spec, h), counts_(spec.n_states, spec.n_actions) {}

ActionId DynaTAgent::select(StateId s, Rng& rng) {
    counts_.visit_state(s);
    const ActionId a = uct_select(q_, counts_, s, h_.c_uct, rng);
    counts_.take_action(s, a);
    return a;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> agent_names() {
    static constexpr std::array<std::string_view, 5> names{"qlearning", "sarsa-lambda", "dynaq", "stochastic-dynaq",
                                                           "dynat"};
    return names;
}

std::unique_ptr<Agent> make_agent(std::string_view name, const EnvSpec& spec, const Hyperparams& h) {
    if (name == "qlearning") return std::make_unique<QLearningAgent>(spec, h);
    if (name == "sarsa-lambda") return std::make_unique<SarsaLambdaAgent>(spec, h);
    if (name == "dynaq") return std::make_unique<DynaQAgent>(spec, h);
    if (name == "stochastic-dynaq") return std::make_unique<StochasticDynaQAgent>(spec, h);
    if (name == "dynat") return std::make_unique<DynaTAgent>(spec, h);
    throw ConfigError("unknown agent '" + std::string(name) +
                      "' (expected qlearning, sarsa-lambda, dynaq, stochastic-dynaq or dynat)");
}

}  // namespace dynat
