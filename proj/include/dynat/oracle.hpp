#pragma once

#include <cstddef>
#include <vector>

#include "dynat/core.hpp"
#include "dynat/envs.hpp"

namespace dynat {

/// Optimal state values from value iteration. Terminal states hold 0.
struct ValueTable {
    std::vector<double> values;
    /// Number of sweeps performed.
    std::size_t sweeps = 0;
    /// Max-norm change of each sweep, in order.
    std::vector<double> sweep_deltas;
};

inline constexpr double default_oracle_tol = 1e-9;
inline constexpr std::size_t default_oracle_max_sweeps = 1'000'000;

/// Synchronous value iteration
///   U(s) <- max_a sum_s' P(s'|s,a) (r + gamma U(s'))
/// stopping once a sweep changes no value by `tol` or more.
///
/// gamma = 1 is accepted for episodic models where every policy that matters
/// terminates (e.g. CliffWalking); if the iteration does not settle within
/// `max_sweeps`, ComputationError is thrown.
ValueTable value_iteration(const TrueModel& model, double gamma, double tol = default_oracle_tol,
                           std::size_t max_sweeps = default_oracle_max_sweeps);

/// One-step lookahead value of (s, a) under `values`.
double lookahead(const TrueModel& model, std::span<const double> values, StateId s, ActionId a, double gamma);

/// Greedy action per state. Ties go to the lowest action index so the result
/// is a stable fixture; terminal states get action 0.
std::vector<ActionId> greedy_policy(const TrueModel& model, const ValueTable& u, double gamma);

/// max_s |max_a lookahead(s, a) - U(s)| over non-terminal states.
double bellman_residual(const TrueModel& model, const ValueTable& u, double gamma);

}  // namespace dynat
