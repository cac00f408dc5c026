#include "stepprove/generator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "stepprove/rng.hpp"

namespace stepprove {

using json = nlohmann::json;

// ---------- prompt assembly ----------

std::string assemble_prompt(const PromptContext& ctx) {
    std::string out;
    out +=
        "A tactic transforms the current proof state, closing the goal or "
        "reducing it to subgoals; the proof is complete when no goals remain.\n\n";
    out += "Here is the FORMAL PROOF before the current state:\n";
    out += ctx.proof_prefix;
    out += "\n\n";
    out += "Here is the current STATE:\n";
    out += ctx.state_rendering;
    out += "\n\n";
    out += "Please generate a tactic in lean4 to solve the state.\n";
    if (!ctx.premises.empty()) {
        out += "\nAnd here're some theorems that may be helpful:\n";
        for (std::size_t i = 0; i < ctx.premises.size(); ++i) {
            const Premise& p = ctx.premises[i];
            out += "\nID:" + std::to_string(i) + "\n";
            out += "Formal name: " + p.formal_name + "\n";
            out += "Informal name: " + p.informal_name + "\n";
            out += "Formal statement: " + p.formal_statement + "\n";
        }
    }
    return out;
}

// ---------- policy ----------

GeneratorPolicy GeneratorPolicy::uniform(double epsilon) {
    GeneratorPolicy policy;
    policy.epsilon = epsilon;
    for (const auto& name : tactic_template_names()) policy.weights[name] = 1.0;
    return policy;
}

double GeneratorPolicy::weight_of(const std::string& template_name) const {
    auto it = weights.find(template_name);
    return it == weights.end() ? epsilon : it->second;
}

GeneratorPolicy policy_update(const GeneratorPolicy& policy,
                              const std::vector<StateTacticPair>& pairs) {
    std::map<std::string, int> counts;
    for (const auto& pair : pairs) {
        std::size_t space = pair.tactic.find(' ');
        counts[pair.tactic.substr(0, space)] += 1;
    }
    GeneratorPolicy updated;
    updated.epsilon = policy.epsilon;
    for (const auto& name : tactic_template_names()) {
        auto it = counts.find(name);
        updated.weights[name] = policy.epsilon + (it == counts.end() ? 0 : it->second);
    }
    return updated;
}

std::string save_policy_json(const GeneratorPolicy& policy) {
    return json{{"epsilon", policy.epsilon}, {"weights", policy.weights}}.dump();
}

GeneratorPolicy load_policy_json(const std::string& text) {
    json j = json::parse(text);
    GeneratorPolicy policy;
    policy.epsilon = j.at("epsilon").get<double>();
    for (const auto& [k, v] : j.at("weights").items()) policy.weights[k] = v.get<double>();
    return policy;
}

// ---------- toy policy generator ----------

namespace {

// The toy generator works on goal texts, so it only makes sense against the
// bundled kernel's grammar.
Goal parse_env_goal(const EnvGoal& g) {
    Goal goal{{}, parse_formula(g.target)};
    for (const auto& [name, text] : g.hyps) goal.hyps.push_back({name, parse_formula(text)});
    return goal;
}

}  // namespace

std::vector<TacticCandidate> ToyPolicyGenerator::generate(const EnvState& state,
                                                          const PromptContext& ctx, int n,
                                                          double temperature, std::uint64_t seed) {
    (void)ctx;
    (void)temperature;  // the toy policy is deterministic given the seed
    if (n < 1) throw GeneratorError("candidate count must be >= 1");
    if (state.goals.empty()) return {};

    Goal goal = [&] {
        try {
            return parse_env_goal(state.goals.front());
        } catch (const ParseError& e) {
            throw GeneratorError(std::string("toy generator cannot parse the goal: ") + e.what());
        }
    }();

    std::vector<TacticOption> options = applicable_tactics(goal);
    if (options.empty()) return {};

    std::vector<double> weights(options.size());
    double total = 0.0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        weights[i] = policy_.weight_of(options[i].template_name);
        total += weights[i];
    }

    std::vector<TacticCandidate> out;
    auto candidate_at = [&](std::size_t i) {
        return TacticCandidate{options[i].text, std::log(weights[i] / total)};
    };

    if (mode_ == Mode::Exhaustive) {
        std::size_t take = std::min<std::size_t>(options.size(), static_cast<std::size_t>(n));
        out.reserve(take);
        for (std::size_t i = 0; i < take; ++i) out.push_back(candidate_at(i));
        return out;
    }

    // sample n with replacement, then dedupe keeping first-draw order
    Rng rng(seed);
    std::set<std::size_t> seen;
    for (int draw = 0; draw < n; ++draw) {
        double u = rng.next_double() * total;
        std::size_t pick = options.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < options.size(); ++i) {
            acc += weights[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        if (seen.insert(pick).second) out.push_back(candidate_at(pick));
    }
    return out;
}

// ---------- remote generator ----------

RemoteGenerator::RemoteGenerator(std::string url, int max_tokens, double timeout_seconds)
    : max_tokens_(max_tokens), timeout_seconds_(timeout_seconds) {
    // split scheme://host:port from the request path
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw GeneratorError("generator URL must include a scheme");
    std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        host_ = url;
        path_ = "/generate";
    } else {
        host_ = url.substr(0, slash);
        path_ = url.substr(slash);
    }
}

std::vector<TacticCandidate> RemoteGenerator::generate(const EnvState& state,
                                                       const PromptContext& ctx, int n,
                                                       double temperature, std::uint64_t seed) {
    (void)state;
    (void)seed;  // sampling happens server-side
    if (n < 1) throw GeneratorError("candidate count must be >= 1");

    json request{{"prompt", assemble_prompt(ctx)},
                 {"n", n},
                 {"temperature", temperature},
                 {"max_tokens", max_tokens_}};

    httplib::Client client(host_);
    client.set_connection_timeout(static_cast<time_t>(timeout_seconds_));
    client.set_read_timeout(static_cast<time_t>(timeout_seconds_), 0);
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) throw GeneratorError("generation endpoint unreachable: " + host_ + path_);
    if (res->status != 200)
        throw GeneratorError("generation endpoint returned HTTP " + std::to_string(res->status));

    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("completions") || !body["completions"].is_array())
        throw GeneratorError("malformed generation response");

    std::vector<TacticCandidate> out;
    std::size_t rank = 0;
    for (const auto& completion : body["completions"]) {
        if (!completion.is_object() || !completion.contains("text")) continue;
        std::string text = completion["text"].get<std::string>();
        // one tactic per step: truncate at the first newline
        std::size_t nl = text.find('\n');
        if (nl != std::string::npos) text.resize(nl);
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();
        std::size_t start = text.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        text.erase(0, start);

        double logprob;
        if (completion.contains("logprob") && completion["logprob"].is_number()) {
            logprob = std::min(0.0, completion["logprob"].get<double>());
        } else {
            logprob = std::log(1.0 / static_cast<double>(rank + 1));
            std::cerr << "warning: completion without logprob; using rank-based fallback\n";
        }
        out.push_back(TacticCandidate{std::move(text), logprob});
        ++rank;
        if (out.size() >= static_cast<std::size_t>(n)) break;
    }
    return out;
}

}  // namespace stepprove
