#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynat/rng.hpp"

namespace dynat {

// Error categories. Usage errors are caller bugs (bad arguments, calls out of
// order); configuration errors come from user input; computational errors are
// numerical failures such as non-convergence.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StateId {
    std::size_t index = 0;
    friend auto operator<=>(const StateId&, const StateId&) = default;
};

struct ActionId {
    std::size_t index = 0;
    friend auto operator<=>(const ActionId&, const ActionId&) = default;
};

/// One environment step: (s, a, r, s', terminal).
///
/// `terminal` marks an absorbing next state. A step-cap truncation is not
/// terminal and must still be bootstrapped through.
struct Transition {
    StateId state;
    ActionId action;
    double reward = 0.0;
    StateId next_state;
    bool terminal = false;
};

/// How SARSA(lambda) decays its eligibility traces after each update.
enum class TraceDecay {
    lambda,        // Z <- lambda * Z
    gamma_lambda,  // Z <- gamma * lambda * Z (textbook form)
};

struct Hyperparams {
    double alpha = 0.1;
    double gamma = 0.99;
    double epsilon = 0.1;
    double lambda = 0.9;
    double c_uct = 2.0;
    std::size_t planning_steps = 10;
    TraceDecay trace_decay = TraceDecay::lambda;

    /// Throws ConfigError naming the first field out of range.
    void validate() const;
};

/// Dense |S| x |A| action-value table, zero-initialised.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t n_states, std::size_t n_actions);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }

    double& operator()(StateId s, ActionId a) { return values_[offset(s, a)]; }
    double operator()(StateId s, ActionId a) const { return values_[offset(s, a)]; }

    std::span<double> row(StateId s);
    std::span<const double> row(StateId s) const;

    /// max_a Q(s, a).
    double max(StateId s) const;

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t offset(StateId s, ActionId a) const { return s.index * n_actions_ + a.index; }

    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> values_;
};

/// Index of a maximal entry; ties broken uniformly at random. +inf entries
/// compare equal to each other and dominate everything finite. The generator
/// is only consumed when there is more than one maximal entry.
ActionId argmax_tiebreak(std::span<const double> row, Rng& rng);

/// With probability epsilon a uniformly random action, otherwise
/// argmax_tiebreak(q_row). No coin is drawn when epsilon == 0.
ActionId epsilon_greedy(std::span<const double> q_row, double epsilon, Rng& rng);

}  // namespace dynat
