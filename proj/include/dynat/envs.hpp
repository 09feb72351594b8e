#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynat/core.hpp"

namespace dynat {

struct EnvSpec {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    StateId start_state;
    std::size_t max_steps_per_episode = 0;
};

struct StepOutcome {
    StateId next_state;
    double reward = 0.0;
    /// An absorbing state was reached.
    bool terminal = false;
    /// The step cap was hit in a non-absorbing state.
    bool truncated = false;

    bool done() const noexcept { return terminal || truncated; }
};

/// One entry of P(s', r | s, a).
struct Outcome {
    StateId next_state;
    double probability = 0.0;
    double reward = 0.0;
};

/// Full transition distribution of an environment. Consumed by the oracle and
/// by tests only; agents never see it.
struct TrueModel {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    /// Row-major by (s, a). Entries with identical (next_state, reward) are
    /// merged.
    std::vector<std::vector<Outcome>> outcomes;
    std::vector<bool> terminal;

    const std::vector<Outcome>& at(StateId s, ActionId a) const {
        return outcomes[s.index * n_actions + a.index];
    }
};

/// Episodic environment contract shared by all simulators.
///
/// Subclasses describe their dynamics twice: `sample` draws one outcome the
/// way the simulator would, `enumerate` lists the exact distribution. The
/// fidelity tests check that the two agree.
class Environment {
public:
    explicit Environment(EnvSpec spec);
    virtual ~Environment() = default;

    Environment(const Environment&) = delete;
    Environment& operator=(const Environment&) = delete;

    virtual std::string_view name() const = 0;
    virtual bool is_terminal(StateId s) const = 0;

    const EnvSpec& spec() const noexcept { return spec_; }
    StateId state() const noexcept { return state_; }
    std::size_t steps_taken() const noexcept { return steps_; }

    /// Back to the start state with the step counter zeroed.
    StateId reset(Rng& rng);

    /// Throws UsageError on an invalid action or when the episode is over.
    StepOutcome step(ActionId action, Rng& rng);

    TrueModel true_model() const;

    /// One draw from the dynamics at an arbitrary non-terminal state, without
    /// touching the episode state. `truncated` is always false.
    StepOutcome simulate(StateId s, ActionId a, Rng& rng) const;

protected:
    struct Sample {
        StateId next_state;
        double reward = 0.0;
    };

    virtual Sample sample(StateId s, ActionId a, Rng& rng) const = 0;
    virtual std::vector<Outcome> enumerate(StateId s, ActionId a) const = 0;

private:
    EnvSpec spec_;
    StateId state_;
    std::size_t steps_ = 0;
    bool done_ = false;
};

/// 4x12 cliff grid. Row-major states, start (3,0), goal (3,11), cliff
/// (3,1)..(3,10). Every move costs -1; entering the cliff pays -100 and ends
/// the episode; entering the goal ends the episode.
class CliffWalking final : public Environment {
public:
    enum Action : std::size_t { up = 0, down = 1, left = 2, right = 3 };

    static constexpr std::size_t rows = 4;
    static constexpr std::size_t cols = 12;
    static constexpr std::size_t default_max_steps = 200;
    static constexpr double step_reward = -1.0;
    static constexpr double cliff_reward = -100.0;

    explicit CliffWalking(std::size_t max_steps = default_max_steps);

    std::string_view name() const override { return "cliffwalking"; }
    bool is_terminal(StateId s) const override;

    static StateId cell(std::size_t row, std::size_t col) { return StateId{row * cols + col}; }
    static bool is_cliff(StateId s);
    static StateId goal() { return cell(3, 11); }

protected:
    Sample sample(StateId s, ActionId a, Rng& rng) const override;
    std::vector<Outcome> enumerate(StateId s, ActionId a) const override;

private:
    static Sample move(StateId s, ActionId a);
};

/// Five-state chain. Forward advances (reward 0) or, in the last state, stays
/// and pays 10. Back returns to the first state and pays 1. With probability
/// `slip` the opposite action is executed. No absorbing state.
class NChain final : public Environment {
public:
    enum Action : std::size_t { forward = 0, back = 1 };

    static constexpr std::size_t length = 5;
    static constexpr std::size_t default_max_steps = 100;
    static constexpr double default_slip = 0.2;
    static constexpr double back_reward = 1.0;
    static constexpr double end_reward = 10.0;

    explicit NChain(double slip = default_slip, std::size_t max_steps = default_max_steps);

    std::string_view name() const override { return "nchain"; }
    bool is_terminal(StateId) const override { return false; }
    double slip() const noexcept { return slip_; }

protected:
    Sample sample(StateId s, ActionId a, Rng& rng) const override;
    std::vector<Outcome> enumerate(StateId s, ActionId a) const override;

private:
    static Sample move(StateId s, ActionId a);

    double slip_;
};

/// Slippery 4x4 lake. On a frozen cell the intended move and each of its two
/// perpendicular moves happen with probability 1/3. Holes end the episode with
/// reward 0; the goal ends it with reward 1.
class FrozenLake final : public Environment {
public:
    enum Action : std::size_t { up = 0, down = 1, left = 2, right = 3 };

    static constexpr std::size_t default_max_steps = 100;

    explicit FrozenLake(std::size_t max_steps = default_max_steps);

    std::string_view name() const override { return "frozenlake"; }
    bool is_terminal(StateId s) const override;

    static std::span<const std::string_view> map();
    static bool is_hole(StateId s);
    static bool is_goal(StateId s);

protected:
    Sample sample(StateId s, ActionId a, Rng& rng) const override;
    std::vector<Outcome> enumerate(StateId s, ActionId a) const override;

private:
    static Sample move(StateId s, ActionId a);
};

/// Registered names: "cliffwalking", "nchain", "frozenlake".
std::span<const std::string_view> environment_names();

/// Throws ConfigError for an unknown name or a zero step cap.
std::unique_ptr<Environment> make_environment(std::string_view name,
                                              std::optional<std::size_t> max_steps = std::nullopt);

}  // namespace dynat
