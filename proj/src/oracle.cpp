#include "dynat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dynat {

double lookahead(const TrueModel& model, std::span<const double> values, StateId s, ActionId a, double gamma) {
    double q = 0.0;
    for (const auto& o : model.at(s, a)) {
        q += o.probability * (o.reward + gamma * values[o.next_state.index]);
    }
    return q;
}

namespace {

double best_lookahead(const TrueModel& model, std::span<const double> values, StateId s, double gamma) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < model.n_actions; ++a) {
        best = std::max(best, lookahead(model, values, s, ActionId{a}, gamma));
    }
    return best;
}

}  // namespace

ValueTable value_iteration(const TrueModel& model, double gamma, double tol, std::size_t max_sweeps) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("value_iteration: gamma must lie in [0, 1]");
    if (!(tol > 0.0)) throw UsageError("value_iteration: tol must be positive");

    ValueTable u;
    u.values.assign(model.n_states, 0.0);
    std::vector<double> next(model.n_states, 0.0);

    while (u.sweeps < max_sweeps) {
        double delta = 0.0;
        for (std::size_t s = 0; s < model.n_states; ++s) {
            next[s] = model.terminal[s] ? 0.0 : best_lookahead(model, u.values, StateId{s}, gamma);
            delta = std::max(delta, std::abs(next[s] - u.values[s]));
        }
        u.values.swap(next);
        ++u.sweeps;
        u.sweep_deltas.push_back(delta);
        if (!std::isfinite(delta)) break;
        if (delta < tol) return u;
    }
    throw ComputationError("value_iteration did not converge within " + std::to_string(u.sweeps) + " sweeps");
}

std::vector<ActionId> greedy_policy(const TrueModel& model, const ValueTable& u, double gamma) {
    std::vector<ActionId> policy(model.n_states, ActionId{0});
    for (std::size_t s = 0; s < model.n_states; ++s) {
        if (model.terminal[s]) continue;
        double best = lookahead(model, u.values, StateId{s}, ActionId{0}, gamma);
        for (std::size_t a = 1; a < model.n_actions; ++a) {
            const double q = lookahead(model, u.values, StateId{s}, ActionId{a}, gamma);
            // Values within rounding of each other count as tied.
            if (q > best + 1e-12 * std::max(1.0, std::abs(best))) {
                best = q;
                policy[s] = ActionId{a};
            }
        }
    }
    return policy;
}

double bellman_residual(const TrueModel& model, const ValueTable& u, double gamma) {
    double residual = 0.0;
    for (std::size_t s = 0; s < model.n_states; ++s) {
        if (model.terminal[s]) continue;
        residual = std::max(residual, std::abs(best_lookahead(model, u.values, StateId{s}, gamma) - u.values[s]));
    }
    return residual;
}

}  // namespace dynat
