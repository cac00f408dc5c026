#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stepprove/formula.hpp"

namespace stepprove {

struct Hypothesis {
    std::string name;
    Formula formula;
    bool operator==(const Hypothesis& o) const { return name == o.name && formula == o.formula; }
};

struct Goal {
    std::vector<Hypothesis> hyps;
    Formula target;
    bool operator==(const Goal& o) const { return hyps == o.hyps && target == o.target; }
    const Hypothesis* find_hyp(std::string_view name) const;
};

// Open goals plus the tactic distance from the root. Complete iff no goals.
struct ProofState {
    std::string id;  // opaque session token, e.g. "s3"; empty until registered
    std::vector<Goal> goals;
    int depth = 0;
    bool complete() const { return goals.empty(); }
};

enum class ErrorClass { ParseError, Inapplicable, NoProgress, UnknownState, Transport };

std::string error_class_name(ErrorClass c);
std::optional<ErrorClass> error_class_from_name(std::string_view name);

struct ApplyError {
    ErrorClass cls;
    std::string message;
};

// Exactly one of state/error is populated.
class ApplyResult {
public:
    static ApplyResult success(ProofState s) {
        ApplyResult r;
        r.state_ = std::move(s);
        return r;
    }
    static ApplyResult failure(ErrorClass cls, std::string message) {
        ApplyResult r;
        r.error_ = ApplyError{cls, std::move(message)};
        return r;
    }

    bool ok() const { return state_.has_value(); }
    bool complete() const { return ok() && state_->complete(); }
    const ProofState& state() const { return *state_; }
    ProofState& state() { return *state_; }
    const ApplyError& error() const { return *error_; }

private:
    std::optional<ProofState> state_;
    std::optional<ApplyError> error_;
};

// One goal with empty context targeting the statement; depth 0.
ProofState init_state(const Formula& statement);

// Applies a tactic to the first goal. Tactic language:
//   intro <h> | exact <h> | apply <h> | split | left | right |
//   cases <h> | destruct <h> | absurd <h> | trivial | assumption
// Subgoals replace the first goal in order; remaining goals follow.
// A result whose goal list equals the input's is a no-progress error.
ApplyResult apply_tactic(const ProofState& state, std::string_view tactic);

// Tactic candidates that succeed on this goal, in canonical enumeration
// order. Every returned option applies without error except for no-progress
// loops (e.g. `apply h` with h : A -> A on target A).
struct TacticOption {
    std::string text;      // e.g. "cases h2"
    std::string template_name;  // e.g. "cases"
};
std::vector<TacticOption> applicable_tactics(const Goal& goal);

// Canonical intro name: "h", then "h1", "h2", ... first one not in context.
std::string fresh_hyp_name(const Goal& goal);

const std::vector<std::string>& tactic_template_names();

// ---------- rendering ----------

std::string render_goal(const Goal& goal);
std::string render_state(const ProofState& state);

// ---------- brute-force oracle ----------

struct OracleResult {
    bool provable = false;
    std::vector<std::string> script;  // shortest, empty unless provable
};

// Exhaustive iterative-deepening search over applicable tactics with the
// canonical fresh-name scheme. Returns a shortest script within max_depth
// applications if one exists.
OracleResult oracle_provable(const Formula& statement, int max_depth);

}  // namespace stepprove
