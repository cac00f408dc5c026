#include "stepprove/env.hpp"

#include <cctype>

namespace stepprove {

EnvGoal to_env_goal(const Goal& goal) {
    EnvGoal g;
    g.hyps.reserve(goal.hyps.size());
    for (const auto& h : goal.hyps) g.hyps.emplace_back(h.name, h.formula.to_string());
    g.target = goal.target.to_string();
    return g;
}

EnvState to_env_state(const ProofState& state) {
    EnvState s;
    s.id = state.id;
    s.depth = state.depth;
    s.goals.reserve(state.goals.size());
    for (const auto& g : state.goals) s.goals.push_back(to_env_goal(g));
    return s;
}

std::string render_env_goal(const EnvGoal& goal) {
    std::string out;
    for (const auto& [name, formula] : goal.hyps) {
        out += name;
        out += " : ";
        out += formula;
        out += '\n';
    }
    out += "⊢ ";
    out += goal.target;
    return out;
}

std::string render_env_state(const EnvState& state) {
    if (state.goals.empty()) return "no goals";
    std::string out;
    for (std::size_t i = 0; i < state.goals.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += render_env_goal(state.goals[i]);
    }
    return out;
}

// ---------- KernelSession ----------

std::string KernelSession::register_state(ProofState s) {
    s.id = "s" + std::to_string(states_.size());
    states_.push_back(std::move(s));
    return states_.back().id;
}

ApplyResult KernelSession::init(const std::string& statement_text) {
    try {
        ProofState root = init_state(parse_formula(statement_text));
        register_state(std::move(root));
        return ApplyResult::success(states_.back());
    } catch (const ParseError& e) {
        return ApplyResult::failure(ErrorClass::ParseError,
                                    std::string(e.what()) + " at position " +
                                        std::to_string(e.position));
    }
}

ApplyResult KernelSession::apply(const std::string& state_id, const std::string& tactic) {
    const ProofState* parent = find(state_id);
    if (!parent)
        return ApplyResult::failure(ErrorClass::UnknownState,
                                    "unknown state id '" + state_id + "'");
    ApplyResult r = apply_tactic(*parent, tactic);
    if (!r.ok()) return r;
    register_state(std::move(r.state()));
    return ApplyResult::success(states_.back());
}

const ProofState* KernelSession::find(const std::string& state_id) const {
    if (state_id.size() < 2 || state_id[0] != 's') return nullptr;
    for (std::size_t i = 1; i < state_id.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(state_id[i]))) return nullptr;
    std::size_t index = std::stoull(state_id.substr(1));
    if (index >= states_.size()) return nullptr;
    return &states_[index];
}

// ---------- KernelEnvironment ----------

EnvResult KernelEnvironment::init(const std::string& statement) {
    ApplyResult r = session_.init(statement);
    if (!r.ok()) return EnvResult::failure(r.error().cls, r.error().message);
    return EnvResult::success(to_env_state(r.state()));
}

EnvResult KernelEnvironment::apply(const std::string& state_id, const std::string& tactic) {
    ApplyResult r = session_.apply(state_id, tactic);
    if (!r.ok()) return EnvResult::failure(r.error().cls, r.error().message);
    return EnvResult::success(to_env_state(r.state()));
}

}  // namespace stepprove
