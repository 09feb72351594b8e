#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dynat/core.hpp"
#include "dynat/envs.hpp"

namespace dynat {

// ---------------------------------------------------------------------------
// Model memories

/// Last-seen (r, s', terminal) per observed (s, a). Re-observing a pair
/// overwrites its entry.
class DeterministicModel {
public:
    struct Entry {
        double reward = 0.0;
        StateId next_state;
        bool terminal = false;
    };

    DeterministicModel(std::size_t n_states, std::size_t n_actions);

    void observe(const Transition& t);
    std::optional<Entry> lookup(StateId s, ActionId a) const;

    /// Observed pairs in first-observation order; each appears once.
    std::span<const std::pair<StateId, ActionId>> keys() const noexcept { return keys_; }
    bool empty() const noexcept { return keys_.empty(); }

    /// Uniformly random observed pair. UsageError if the model is empty.
    std::pair<StateId, ActionId> sample_key(Rng& rng) const;

private:
    std::size_t n_actions_;
    std::vector<std::optional<Entry>> entries_;
    std::vector<std::pair<StateId, ActionId>> keys_;
};

/// Count-based transition estimate: n(s,a), n(s,a,s') and the running mean
/// reward per (s,a,s').
class StochasticModel {
public:
    struct Successor {
        StateId next_state;
        std::size_t count = 0;
        double reward_mean = 0.0;
        bool terminal = false;
    };

    StochasticModel(std::size_t n_states, std::size_t n_actions);

    void observe(const Transition& t);

    std::size_t n_sa(StateId s, ActionId a) const { return n_sa_[index(s, a)]; }
    std::size_t n_sas(StateId s, ActionId a, StateId next) const;
    std::span<const Successor> successors(StateId s, ActionId a) const { return successors_[index(s, a)]; }

    std::span<const std::pair<StateId, ActionId>> keys() const noexcept { return keys_; }
    bool empty() const noexcept { return keys_.empty(); }
    std::pair<StateId, ActionId> sample_key(Rng& rng) const;

private:
    std::size_t index(StateId s, ActionId a) const { return s.index * n_actions_ + a.index; }

    std::size_t n_actions_;
    std::vector<std::size_t> n_sa_;
    std::vector<std::vector<Successor>> successors_;
    std::vector<std::pair<StateId, ActionId>> keys_;
};

/// Accumulating eligibility traces, one per (s, a). Entries stay >= 0.
class EligibilityTable {
public:
    EligibilityTable(std::size_t n_states, std::size_t n_actions);

    double operator()(StateId s, ActionId a) const { return traces_[s.index * n_actions_ + a.index]; }
    void add(StateId s, ActionId a, double amount = 1.0) { traces_[s.index * n_actions_ + a.index] += amount; }
    void scale(double factor);
    void clear();

    std::span<const double> values() const noexcept { return traces_; }

private:
    std::size_t n_actions_;
    std::vector<double> traces_;
};

/// n_s counts states presented for action selection, n_sa the actions then
/// chosen. Only real interaction updates them.
class VisitCounts {
public:
    VisitCounts(std::size_t n_states, std::size_t n_actions);

    std::size_t n_s(StateId s) const { return n_s_[s.index]; }
    std::size_t n_sa(StateId s, ActionId a) const { return n_sa_[s.index * n_actions_ + a.index]; }
    std::size_t n_actions() const noexcept { return n_actions_; }

    void visit_state(StateId s) { ++n_s_[s.index]; }
    void take_action(StateId s, ActionId a) { ++n_sa_[s.index * n_actions_ + a.index]; }

private:
    std::size_t n_actions_;
    std::vector<std::size_t> n_s_;
    std::vector<std::size_t> n_sa_;
};

// ---------------------------------------------------------------------------
// Update rules

/// One-step Q-learning: Q(s,a) += alpha (r + gamma max_a' Q(s',a') - Q(s,a)).
/// The bootstrap term is dropped when t.terminal.
void q_update(QTable& q, const Transition& t, const Hyperparams& h);

/// Inputs to one SARSA(lambda) update. `next_action` is the action actually
/// selected in next_state, or empty when next_state is terminal.
struct SarsaStep {
    StateId state;
    ActionId action;
    double reward = 0.0;
    StateId next_state;
    std::optional<ActionId> next_action;
};

/// Z(s,a) += 1; delta = r + gamma Q(s',a') - Q(s,a); Q += alpha delta Z;
/// then Z is multiplied by lambda (or gamma * lambda, per h.trace_decay).
void sarsa_lambda_update(QTable& q, EligibilityTable& z, const SarsaStep& step, const Hyperparams& h);

/// Dyna-Q step: learn from t, record it in the model, then replay
/// h.planning_steps uniformly sampled observed pairs through q_update.
void dynaq_observe_and_plan(QTable& q, DeterministicModel& model, const Transition& t, const Hyperparams& h,
                            Rng& rng);

/// Expected one-step target under the learned model:
///   sum_s' n(s,a,s')/n(s,a) * (rbar(s,a,s') + gamma max_a' Q(s',a'))
/// with the bootstrap term zero for terminal successors.
/// UsageError when (s, a) has never been observed.
double stochastic_plan_target(const StochasticModel& model, const QTable& q, StateId s, ActionId a, double gamma);

/// Stochastic Dyna-Q step: Q-learning on t, model update, then
/// h.planning_steps expected-target updates on sampled observed pairs.
void stochastic_dynaq_observe_and_plan(QTable& q, StochasticModel& model, const Transition& t,
                                       const Hyperparams& h, Rng& rng);

/// argmax_a Q(s,a) + c sqrt(ln n_s / n_sa), ties broken at random. An action
/// with n_sa = 0 has an infinite bound, as does every action of a state with
/// n_s = 0. With c == 0 the bonus is dropped entirely and the choice is the
/// greedy argmax over Q.
ActionId uct_select(const QTable& q, const VisitCounts& counts, StateId s, double c, Rng& rng);

/// The bounds uct_select maximises, written into `out` (size |A|).
void uct_bounds(const QTable& q, const VisitCounts& counts, StateId s, double c, std::span<double> out);

// ---------------------------------------------------------------------------
// Agents

/// Common agent contract. Per step the harness calls select() for the current
/// state and then observe() with the resulting transition.
class Agent {
public:
    Agent(const EnvSpec& spec, const Hyperparams& h);
    virtual ~Agent() = default;

    virtual std::string_view name() const = 0;

    /// Called after every environment reset.
    virtual void begin_episode(StateId /*start*/) {}
    virtual ActionId select(StateId s, Rng& rng) = 0;
    virtual void observe(const Transition& t, Rng& rng) = 0;

    const QTable& q() const noexcept { return q_; }
    const Hyperparams& hyperparams() const noexcept { return h_; }

    double epsilon() const noexcept { return epsilon_; }
    void set_epsilon(double epsilon) { epsilon_ = epsilon; }

protected:
    QTable q_;
    Hyperparams h_;
    double epsilon_;
};

class QLearningAgent : public Agent {
public:
    using Agent::Agent;
    std::string_view name() const override { return "qlearning"; }
    ActionId select(StateId s, Rng& rng) override;
    void observe(const Transition& t, Rng& rng) override;
};

/// On-policy SARSA(lambda). observe() picks a' in s' and the following
/// select(s') returns it.
class SarsaLambdaAgent : public Agent {
public:
    SarsaLambdaAgent(const EnvSpec& spec, const Hyperparams& h);
    std::string_view name() const override { return "sarsa-lambda"; }
    void begin_episode(StateId start) override;
    ActionId select(StateId s, Rng& rng) override;
    void observe(const Transition& t, Rng& rng) override;

    const EligibilityTable& traces() const noexcept { return z_; }

private:
    EligibilityTable z_;
    std::optional<std::pair<StateId, ActionId>> pending_;
};

class DynaQAgent : public Agent {
public:
    DynaQAgent(const EnvSpec& spec, const Hyperparams& h);
    std::string_view name() const override { return "dynaq"; }
    ActionId select(StateId s, Rng& rng) override;
    void observe(const Transition& t, Rng& rng) override;

    const DeterministicModel& model() const noexcept { return model_; }

private:
    DeterministicModel model_;
};

class StochasticDynaQAgent : public Agent {
public:
    StochasticDynaQAgent(const EnvSpec& spec, const Hyperparams& h);
    std::string_view name() const override { return "stochastic-dynaq"; }
    ActionId select(StateId s, Rng& rng) override;
    void observe(const Transition& t, Rng& rng) override;

    const StochasticModel& model() const noexcept { return model_; }

private:
    StochasticModel model_;
};

/// Stochastic Dyna-Q learning and planning with UCT action selection in
/// place of epsilon-greedy.
class DynaTAgent : public StochasticDynaQAgent {
public:
    DynaTAgent(const EnvSpec& spec, const Hyperparams& h);
    std::string_view name() const override { return "dynat"; }
    ActionId select(StateId s, Rng& rng) override;

    const VisitCounts& counts() const noexcept { return counts_; }

private:
    VisitCounts counts_;
};

/// Registered names: "qlearning", "sarsa-lambda", "dynaq",
/// "stochastic-dynaq", "dynat".
std::span<const std::string_view> agent_names();

/// Throws ConfigError for an unknown name or out-of-range hyperparameters.
std::unique_ptr<Agent> make_agent(std::string_view name, const EnvSpec& spec, const Hyperparams& h);

}  // namespace dynat
