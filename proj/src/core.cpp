#include "dynat/core.hpp"

#include <algorithm>
#include <cmath>

namespace dynat {

namespace {

void check_unit_interval(const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
    }
}

}  // namespace

void Hyperparams::validate() const {
    check_unit_interval("alpha", alpha);
    check_unit_interval("gamma", gamma);
    check_unit_interval("epsilon", epsilon);
    check_unit_interval("lambda", lambda);
    if (!(c_uct >= 0.0) || !std::isfinite(c_uct)) {
        throw ConfigError("c_uct must be finite and >= 0, got " + std::to_string(c_uct));
    }
}

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, 0.0) {
    if (n_states == 0 || n_actions == 0) throw UsageError("QTable: empty shape");
}

std::span<double> QTable::row(StateId s) {
    return std::span<double>(values_).subspan(s.index * n_actions_, n_actions_);
}

std::span<const double> QTable::row(StateId s) const {
    return std::span<const double>(values_).subspan(s.index * n_actions_, n_actions_);
}

double QTable::max(StateId s) const {
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

ActionId argmax_tiebreak(std::span<const double> row, Rng& rng) {
    if (row.empty()) throw UsageError("argmax_tiebreak: empty row");

    double best = row[0];
    std::size_t ties = 1;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] > best) {
            best = row[i];
            ties = 1;
        } else if (row[i] == best) {
            ++ties;
        }
    }
    if (ties == 1) {
        return ActionId{static_cast<std::size_t>(std::find(row.begin(), row.end(), best) - row.begin())};
    }

    auto pick = rng.uniform_int(ties);
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == best && pick-- == 0) return ActionId{i};
    }
    return ActionId{0};  // unreachable
}

ActionId epsilon_greedy(std::span<const double> q_row, double epsilon, Rng& rng) {
    if (q_row.empty()) throw UsageError("epsilon_greedy: empty row");
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        return ActionId{static_cast<std::size_t>(rng.uniform_int(q_row.size()))};
    }
    return argmax_tiebreak(q_row, rng);
}

}  // namespace dynat
