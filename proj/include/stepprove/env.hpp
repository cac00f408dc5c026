#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stepprove/kernel.hpp"

namespace stepprove {

// Protocol-level goal: hypothesis (name, formula text) pairs plus target
// text. The prover side never needs typed formulas, which lets the same
// search loop drive an external prover whose goal language we cannot parse.
struct EnvGoal {
    std::vector<std::pair<std::string, std::string>> hyps;
    std::string target;
    bool operator==(const EnvGoal& o) const { return hyps == o.hyps && target == o.target; }
};

struct EnvState {
    std::string id;
    std::vector<EnvGoal> goals;
    int depth = 0;
    bool complete() const { return goals.empty(); }
    bool same_goals(const EnvState& o) const { return goals == o.goals; }
};

class EnvResult {
public:
    static EnvResult success(EnvState s) {
        EnvResult r;
        r.state_ = std::move(s);
        return r;
    }
    static EnvResult failure(ErrorClass cls, std::string message) {
        EnvResult r;
        r.error_ = ApplyError{cls, std::move(message)};
        return r;
    }

    bool ok() const { return state_.has_value(); }
    bool complete() const { return ok() && state_->complete(); }
    const EnvState& state() const { return *state_; }
    const ApplyError& error() const { return *error_; }

private:
    std::optional<EnvState> state_;
    std::optional<ApplyError> error_;
};

EnvGoal to_env_goal(const Goal& goal);
EnvState to_env_state(const ProofState& state);
std::string render_env_goal(const EnvGoal& goal);
std::string render_env_state(const EnvState& state);

// Prover-compiler contract: initialize a statement, apply tactics by state
// id, receive updated states or classified errors.
class Environment {
public:
    virtual ~Environment() = default;
    virtual EnvResult init(const std::string& statement) = 0;
    virtual EnvResult apply(const std::string& state_id, const std::string& tactic) = 0;
};

// In-process session over the bundled kernel. State ids are dense integers
// ("s0", "s1", ...) assigned in creation order and never reused.
class KernelSession {
public:
    ApplyResult init(const std::string& statement_text);
    ApplyResult apply(const std::string& state_id, const std::string& tactic);
    const ProofState* find(const std::string& state_id) const;
    std::size_t size() const { return states_.size(); }

private:
    std::string register_state(ProofState s);
    std::vector<ProofState> states_;
};

class KernelEnvironment : public Environment {
public:
    EnvResult init(const std::string& statement) override;
    EnvResult apply(const std::string& state_id, const std::string& tactic) override;

private:
    KernelSession session_;
};

using EnvironmentFactory = std::function<std::unique_ptr<Environment>()>;

}  // namespace stepprove
