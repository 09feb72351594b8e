#include "dynat/envs.hpp"

#include <array>
#include <utility>

namespace dynat {

namespace {

struct GridPos {
    std::size_t row;
    std::size_t col;
};

// Up, Down, Left, Right with off-grid moves clamped in place.
GridPos grid_step(GridPos p, std::size_t action, std::size_t rows, std::size_t cols) {
    switch (action) {
        case 0:
            if (p.row > 0) --p.row;
            break;
        case 1:
            if (p.row + 1 < rows) ++p.row;
            break;
        case 2:
            if (p.col > 0) --p.col;
            break;
        case 3:
            if (p.col + 1 < cols) ++p.col;
            break;
        default:
            throw UsageError("grid_step: bad action");
    }
    return p;
}

void add_outcome(std::vector<Outcome>& out, StateId next, double p, double reward) {
    for (auto& o : out) {
        if (o.next_state == next && o.reward == reward) {
            o.probability += p;
            return;
        }
    }
    out.push_back(Outcome{next, p, reward});
}

}  // namespace

// ---------------------------------------------------------------------------
// Environment

Environment::Environment(EnvSpec spec) : spec_(spec), state_(spec.start_state) {
    if (spec_.n_states == 0 || spec_.n_actions == 0) throw UsageError("EnvSpec: empty state or action set");
    if (spec_.start_state.index >= spec_.n_states) throw UsageError("EnvSpec: start state out of range");
    if (spec_.max_steps_per_episode == 0) throw ConfigError("max_steps_per_episode must be positive");
}

StateId Environment::reset(Rng& /*rng*/) {
    state_ = spec_.start_state;
    steps_ = 0;
    done_ = false;
    return state_;
}

StepOutcome Environment::step(ActionId action, Rng& rng) {
    if (done_) throw UsageError(std::string(name()) + ": step() after the episode ended");
    if (action.index >= spec_.n_actions) throw UsageError(std::string(name()) + ": action out of range");

    const Sample s = sample(state_, action, rng);
    ++steps_;
    StepOutcome out;
    out.next_state = s.next_state;
    out.reward = s.reward;
    out.terminal = is_terminal(s.next_state);
    out.truncated = !out.terminal && steps_ >= spec_.max_steps_per_episode;
    state_ = s.next_state;
    done_ = out.done();
    return out;
}

StepOutcome Environment::simulate(StateId s, ActionId a, Rng& rng) const {
    if (s.index >= spec_.n_states) throw UsageError(std::string(name()) + ": state out of range");
    if (a.index >= spec_.n_actions) throw UsageError(std::string(name()) + ": action out of range");
    if (is_terminal(s)) throw UsageError(std::string(name()) + ": simulate() from a terminal state");
    const Sample x = sample(s, a, rng);
    return StepOutcome{x.next_state, x.reward, is_terminal(x.next_state), false};
}

TrueModel Environment::true_model() const {
    TrueModel m;
    m.n_states = spec_.n_states;
    m.n_actions = spec_.n_actions;
    m.outcomes.reserve(m.n_states * m.n_actions);
    m.terminal.resize(m.n_states);
    for (std::size_t s = 0; s < m.n_states; ++s) {
        m.terminal[s] = is_terminal(StateId{s});
        for (std::size_t a = 0; a < m.n_actions; ++a) {
            if (m.terminal[s]) {
                m.outcomes.push_back({Outcome{StateId{s}, 1.0, 0.0}});
            } else {
                m.outcomes.push_back(enumerate(StateId{s}, ActionId{a}));
            }
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// CliffWalking

CliffWalking::CliffWalking(std::size_t max_steps)
    : Environment(EnvSpec{rows * cols, 4, cell(3, 0), max_steps}) {}

bool CliffWalking::is_cliff(StateId s) {
    const std::size_t r = s.index / cols;
    const std::size_t c = s.index % cols;
    return r == rows - 1 && c >= 1 && c + 1 < cols;
}

bool CliffWalking::is_terminal(StateId s) const { return is_cliff(s) || s == goal(); }

CliffWalking::Sample CliffWalking::move(StateId s, ActionId a) {
    const GridPos p = grid_step({s.index / cols, s.index % cols}, a.index, rows, cols);
    const StateId next = cell(p.row, p.col);
    return Sample{next, is_cliff(next) ? cliff_reward : step_reward};
}

CliffWalking::Sample CliffWalking::sample(StateId s, ActionId a, Rng& /*rng*/) const { return move(s, a); }

std::vector<Outcome> CliffWalking::enumerate(StateId s, ActionId a) const {
    const Sample m = move(s, a);
    return {Outcome{m.next_state, 1.0, m.reward}};
}

// ---------------------------------------------------------------------------
// NChain

NChain::NChain(double slip, std::size_t max_steps)
    : Environment(EnvSpec{length, 2, StateId{0}, max_steps}), slip_(slip) {
    if (!(slip >= 0.0 && slip <= 1.0)) throw ConfigError("nchain slip must lie in [0, 1]");
}

NChain::Sample NChain::move(StateId s, ActionId a) {
    if (a.index == back) return Sample{StateId{0}, back_reward};
    if (s.index + 1 < length) return Sample{StateId{s.index + 1}, 0.0};
    return Sample{s, end_reward};
}

NChain::Sample NChain::sample(StateId s, ActionId a, Rng& rng) const {
    ActionId executed = a;
    if (slip_ > 0.0 && rng.uniform01() < slip_) executed = ActionId{a.index == forward ? back : forward};
    return move(s, executed);
}

std::vector<Outcome> NChain::enumerate(StateId s, ActionId a) const {
    std::vector<Outcome> out;
    const ActionId flipped{a.index == forward ? back : forward};
    if (slip_ < 1.0) {
        const Sample m = move(s, a);
        add_outcome(out, m.next_state, 1.0 - slip_, m.reward);
    }
    if (slip_ > 0.0) {
        const Sample m = move(s, flipped);
        add_outcome(out, m.next_state, slip_, m.reward);
    }
    return out;
}

// ---------------------------------------------------------------------------
// FrozenLake

namespace {

constexpr std::size_t lake_size = 4;
constexpr std::array<std::string_view, lake_size> lake_map{"SFFF", "FHFH", "FFFH", "HFFG"};

char lake_tile(StateId s) { return lake_map[s.index / lake_size][s.index % lake_size]; }

// The two moves perpendicular to `a` (Up/Down <-> Left/Right).
std::array<std::size_t, 3> slip_directions(std::size_t a) {
    if (a == FrozenLake::up || a == FrozenLake::down) return {a, FrozenLake::left, FrozenLake::right};
    return {a, FrozenLake::up, FrozenLake::down};
}

}  // namespace

FrozenLake::FrozenLake(std::size_t max_steps)
    : Environment(EnvSpec{lake_size * lake_size, 4, StateId{0}, max_steps}) {}

std::span<const std::string_view> FrozenLake::map() { return lake_map; }

bool FrozenLake::is_hole(StateId s) { return lake_tile(s) == 'H'; }
bool FrozenLake::is_goal(StateId s) { return lake_tile(s) == 'G'; }
bool FrozenLake::is_terminal(StateId s) const { return is_hole(s) || is_goal(s); }

FrozenLake::Sample FrozenLake::move(StateId s, ActionId a) {
    const GridPos p = grid_step({s.index / lake_size, s.index % lake_size}, a.index, lake_size, lake_size);
    const StateId next{p.row * lake_size + p.col};
    return Sample{next, is_goal(next) ? 1.0 : 0.0};
}

FrozenLake::Sample FrozenLake::sample(StateId s, ActionId a, Rng& rng) const {
    const auto dirs = slip_directions(a.index);
    return move(s, ActionId{dirs[rng.uniform_int(dirs.size())]});
}

std::vector<Outcome> FrozenLake::enumerate(StateId s, ActionId a) const {
    std::vector<Outcome> out;
    for (std::size_t d : slip_directions(a.index)) {
        const Sample m = move(s, ActionId{d});
        add_outcome(out, m.next_state, 1.0 / 3.0, m.reward);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> environment_names() {
    static constexpr std::array<std::string_view, 3> names{"cliffwalking", "nchain", "frozenlake"};
    return names;
}

std::unique_ptr<Environment> make_environment(std::string_view name, std::optional<std::size_t> max_steps) {
    if (max_steps && *max_steps == 0) throw ConfigError("max_steps must be positive");
    if (name == "cliffwalking") return std::make_unique<CliffWalking>(max_steps.value_or(CliffWalking::default_max_steps));
    if (name == "nchain") return std::make_unique<NChain>(NChain::default_slip, max_steps.value_or(NChain::default_max_steps));
    if (name == "frozenlake") return std::make_unique<FrozenLake>(max_steps.value_or(FrozenLake::default_max_steps));
    throw ConfigError("unknown environment '" + std::string(name) + "' (expected cliffwalking, nchain or frozenlake)");
}

}  // namespace dynat
