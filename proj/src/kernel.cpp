#include "stepprove/kernel.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace stepprove {

const Hypothesis* Goal::find_hyp(std::string_view name) const {
    for (const auto& h : hyps)
        if (h.name == name) return &h;
    return nullptr;
}

std::string error_class_name(ErrorClass c) {
    switch (c) {
        case ErrorClass::ParseError: return "parse-error";
        case ErrorClass::Inapplicable: return "inapplicable";
        case ErrorClass::NoProgress: return "no-progress";
        case ErrorClass::UnknownState: return "unknown-state";
        case ErrorClass::Transport: return "transport";
    }
    return "unknown";
}

std::optional<ErrorClass> error_class_from_name(std::string_view name) {
    if (name == "parse-error") return ErrorClass::ParseError;
    if (name == "inapplicable") return ErrorClass::Inapplicable;
    if (name == "no-progress") return ErrorClass::NoProgress;
    if (name == "unknown-state") return ErrorClass::UnknownState;
    if (name == "transport") return ErrorClass::Transport;
    return std::nullopt;
}

ProofState init_state(const Formula& statement) {
    ProofState s;
    s.goals.push_back(Goal{{}, statement});
    s.depth = 0;
    return s;
}

// ---------- tactic parsing ----------

namespace {

struct ParsedTactic {
    std::string name;
    std::optional<std::string> arg;
};

bool tactic_takes_arg(std::string_view name) {
    return name == "intro" || name == "exact" || name == "apply" || name == "cases" ||
           name == "destruct" || name == "absurd";
}

bool tactic_known(std::string_view name) {
    return tactic_takes_arg(name) || name == "split" || name == "left" || name == "right" ||
           name == "trivial" || name == "assumption";
}

std::optional<ParsedTactic> parse_tactic(std::string_view text, std::string& err) {
    std::istringstream in{std::string(text)};
    std::string name, arg, extra;
    if (!(in >> name)) {
        err = "empty tactic";
        return std::nullopt;
    }
    if (!tactic_known(name)) {
        err = "unknown tactic '" + name + "'";
        return std::nullopt;
    }
    if (tactic_takes_arg(name)) {
        if (!(in >> arg)) {
            err = "tactic '" + name + "' expects a hypothesis name";
            return std::nullopt;
        }
        if (in >> extra) {
            err = "trailing text after tactic argument";
            return std::nullopt;
        }
        return ParsedTactic{name, arg};
    }
    if (in >> extra) {
        err = "tactic '" + name + "' takes no argument";
        return std::nullopt;
    }
    return ParsedTactic{name, std::nullopt};
}

ApplyResult inapplicable(std::string message) {
    return ApplyResult::failure(ErrorClass::Inapplicable, std::move(message));
}

// Applies a parsed tactic to one goal; on success fills `subgoals` with the
// goals that replace it (possibly empty when the goal closes).
bool apply_to_goal(const Goal& goal, const ParsedTactic& t, std::vector<Goal>& subgoals,
                   ApplyResult& failure) {
    const Formula& target = goal.target;
    auto fail = [&](std::string msg) {
        failure = inapplicable(std::move(msg));
        return false;
    };
    auto need_hyp = [&](const std::string& name) -> const Hypothesis* {
        const Hypothesis* h = goal.find_hyp(name);
        if (!h) failure = inapplicable("no hypothesis named '" + name + "'");
        return h;
    };

    if (t.name == "intro") {
        if (!target.is(Formula::Kind::Implies)) return fail("intro: target is not an implication");
        if (goal.find_hyp(*t.arg)) return fail("intro: hypothesis name '" + *t.arg + "' already in scope");
        Goal g = goal;
        g.hyps.push_back(Hypothesis{*t.arg, target.lhs()});
        g.target = target.rhs();
        subgoals.push_back(std::move(g));
        return true;
    }
    if (t.name == "exact") {
        const Hypothesis* h = need_hyp(*t.arg);
        if (!h) return false;
        if (h->formula != target) return fail("exact: hypothesis '" + *t.arg + "' does not match the target");
        return true;  // goal closed
    }
    if (t.name == "apply") {
        const Hypothesis* h = need_hyp(*t.arg);
        if (!h) return false;
        if (!h->formula.is(Formula::Kind::Implies))
            return fail("apply: hypothesis '" + *t.arg + "' is not an implication");
        if (h->formula.rhs() != target)
            return fail("apply: conclusion of '" + *t.arg + "' does not match the target");
        Goal g = goal;
        g.target = h->formula.lhs();
        subgoals.push_back(std::move(g));
        return true;
    }
    if (t.name == "split") {
        if (!target.is(Formula::Kind::And)) return fail("split: target is not a conjunction");
        Goal left = goal, right = goal;
        left.target = target.lhs();
        right.target = target.rhs();
        subgoals.push_back(std::move(left));
        subgoals.push_back(std::move(right));
        return true;
    }
    if (t.name == "left" || t.name == "right") {
        if (!target.is(Formula::Kind::Or)) return fail(t.name + ": target is not a disjunction");
        Goal g = goal;
        g.target = t.name == "left" ? target.lhs() : target.rhs();
        subgoals.push_back(std::move(g));
        return true;
    }
    if (t.name == "cases") {
        const Hypothesis* h = need_hyp(*t.arg);
        if (!h) return false;
        if (!h->formula.is(Formula::Kind::Or))
            return fail("cases: hypothesis '" + *t.arg + "' is not a disjunction");
        Goal left = goal, right = goal;
        for (auto& hyp : left.hyps)
            if (hyp.name == *t.arg) hyp.formula = h->formula.lhs();
        for (auto& hyp : right.hyps)
            if (hyp.name == *t.arg) hyp.formula = h->formula.rhs();
        subgoals.push_back(std::move(left));
        subgoals.push_back(std::move(right));
        return true;
    }
    if (t.name == "destruct") {
        const Hypothesis* h = need_hyp(*t.arg);
        if (!h) return false;
        if (!h->formula.is(Formula::Kind::And))
            return fail("destruct: hypothesis '" + *t.arg + "' is not a conjunction");
        std::string n1 = *t.arg + "_1", n2 = *t.arg + "_2";
        if (goal.find_hyp(n1) || goal.find_hyp(n2))
            return fail("destruct: name '" + n1 + "' or '" + n2 + "' already in scope");
        Goal g{{}, goal.target};
        for (const auto& hyp : goal.hyps) {
            if (hyp.name == *t.arg) {
                g.hyps.push_back(Hypothesis{n1, h->formula.lhs()});
                g.hyps.push_back(Hypothesis{n2, h->formula.rhs()});
            } else {
                g.hyps.push_back(hyp);
            }
        }
        subgoals.push_back(std::move(g));
        return true;
    }
    if (t.name == "absurd") {
        const Hypothesis* h = need_hyp(*t.arg);
        if (!h) return false;
        if (!h->formula.is(Formula::Kind::Bottom))
            return fail("absurd: hypothesis '" + *t.arg + "' is not ⊥");
        return true;  // goal closed
    }
    if (t.name == "trivial") {
        if (!target.is(Formula::Kind::Top)) return fail("trivial: target is not ⊤");
        return true;  // goal closed
    }
    if (t.name == "assumption") {
        for (const auto& hyp : goal.hyps)
            if (hyp.formula == target) return true;  // goal closed
        return fail("assumption: no hypothesis matches the target");
    }
    failure = inapplicable("unhandled tactic '" + t.name + "'");
    return false;
}

}  // namespace

ApplyResult apply_tactic(const ProofState& state, std::string_view tactic) {
    std::string err;
    auto parsed = parse_tactic(tactic, err);
    if (!parsed) return ApplyResult::failure(ErrorClass::ParseError, err);
    if (state.goals.empty())
        return ApplyResult::failure(ErrorClass::Inapplicable, "state is already complete");

    std::vector<Goal> subgoals;
    ApplyResult failure = ApplyResult::failure(ErrorClass::Inapplicable, "");
    if (!apply_to_goal(state.goals.front(), *parsed, subgoals, failure)) return failure;

    ProofState next;
    next.goals = std::move(subgoals);
    next.goals.insert(next.goals.end(), state.goals.begin() + 1, state.goals.end());
    next.depth = state.depth + 1;
    if (next.goals == state.goals)
        return ApplyResult::failure(ErrorClass::NoProgress,
                                    "tactic left the goal list unchanged");
    return ApplyResult::success(std::move(next));
}

std::string fresh_hyp_name(const Goal& goal) {
    if (!goal.find_hyp("h")) return "h";
    for (int i = 1;; ++i) {
        std::string name = "h" + std::to_string(i);
        if (!goal.find_hyp(name)) return name;
    }
}

const std::vector<std::string>& tactic_template_names() {
    static const std::vector<std::string> names = {
        "exact", "assumption", "trivial", "absurd", "intro", "apply",
        "split", "left",       "right",   "cases",  "destruct",
    };
    return names;
}

std::vector<TacticOption> applicable_tactics(const Goal& goal) {
    std::vector<TacticOption> out;
    const Formula& target = goal.target;

    for (const auto& h : goal.hyps)
        if (h.formula == target) out.push_back({"exact " + h.name, "exact"});
    for (const auto& h : goal.hyps)
        if (h.formula == target) {
            out.push_back({"assumption", "assumption"});
            break;
        }
    if (target.is(Formula::Kind::Top)) out.push_back({"trivial", "trivial"});
    for (const auto& h : goal.hyps)
        if (h.formula.is(Formula::Kind::Bottom)) out.push_back({"absurd " + h.name, "absurd"});
    if (target.is(Formula::Kind::Implies))
        out.push_back({"intro " + fresh_hyp_name(goal), "intro"});
    for (const auto& h : goal.hyps)
        if (h.formula.is(Formula::Kind::Implies) && h.formula.rhs() == target)
            out.push_back({"apply " + h.name, "apply"});
    if (target.is(Formula::Kind::And)) out.push_back({"split", "split"});
    if (target.is(Formula::Kind::Or)) {
        out.push_back({"left", "left"});
        out.push_back({"right", "right"});
    }
    for (const auto& h : goal.hyps)
        if (h.formula.is(Formula::Kind::Or)) out.push_back({"cases " + h.name, "cases"});
    for (const auto& h : goal.hyps)
        if (h.formula.is(Formula::Kind::And) && !goal.find_hyp(h.name + "_1") &&
            !goal.find_hyp(h.name + "_2"))
            out.push_back({"destruct " + h.name, "destruct"});
    return out;
}

// ---------- rendering ----------

std::string render_goal(const Goal& goal) {
    std::string out;
    for (const auto& h : goal.hyps) {
        out += h.name;
        out += " : ";
        out += h.formula.to_string();
        out += '\n';
    }
    out += "⊢ ";
    out += goal.target.to_string();
    return out;
}

std::string render_state(const ProofState& state) {
    if (state.goals.empty()) return "no goals";
    std::string out;
    for (std::size_t i = 0; i < state.goals.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += render_goal(state.goals[i]);
    }
    return out;
}

// ---------- oracle ----------

namespace {

std::string state_key(const ProofState& s) { return render_state(s); }

struct OracleSearch {
    // state key -> largest remaining depth exhaustively shown to fail
    std::unordered_map<std::string, int> failed;

    bool dfs(const ProofState& state, int remaining, std::vector<std::string>& script) {
        if (state.complete()) return true;
        if (remaining == 0) return false;
        std::string key = state_key(state);
        auto it = failed.find(key);
        if (it != failed.end() && it->second >= remaining) return false;

        for (const auto& opt : applicable_tactics(state.goals.front())) {
            ApplyResult r = apply_tactic(state, opt.text);
            if (!r.ok()) continue;  // no-progress loops land here
            script.push_back(opt.text);
            if (dfs(r.state(), remaining - 1, script)) return true;
            script.pop_back();
        }
        int& depth = failed[key];
        depth = std::max(depth, remaining);
        return false;
    }
};

}  // namespace

OracleResult oracle_provable(const Formula& statement, int max_depth) {
    if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
    ProofState root = init_state(statement);
    OracleSearch search;
    for (int depth = 0; depth <= max_depth; ++depth) {
        std::vector<std::string> script;
        if (search.dfs(root, depth, script)) return {true, std::move(script)};
    }
    return {false, {}};
}

}  // namespace stepprove
