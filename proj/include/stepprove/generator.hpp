#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepprove/dataset.hpp"
#include "stepprove/env.hpp"
#include "stepprove/retrieval.hpp"

namespace stepprove {

struct TacticCandidate {
    std::string text;
    double logprob = 0.0;  // <= 0
};

struct PromptContext {
    std::optional<std::string> nl_description;
    std::string proof_prefix;     // header + statement + tactics so far
    std::string state_rendering;  // non-empty
    std::vector<Premise> premises;
};

// Fixed section order: preamble, proof prefix, current state, instruction,
// then one block per premise with ID / Formal name / Informal name /
// Formal statement fields. Byte-deterministic in the context.
std::string assemble_prompt(const PromptContext& ctx);

class TacticGenerator {
public:
    virtual ~TacticGenerator() = default;
    // Up to n candidates with log-probabilities; deterministic under seed.
    virtual std::vector<TacticCandidate> generate(const EnvState& state, const PromptContext& ctx,
                                                  int n, double temperature, std::uint64_t seed) = 0;
};

struct GeneratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-template weights over the toy tactic language. Candidate probability
// is weight(template) normalized over the applicable candidates.
struct GeneratorPolicy {
    std::map<std::string, double> weights;
    double epsilon = 0.1;

    static GeneratorPolicy uniform(double epsilon = 0.1);
    double weight_of(const std::string& template_name) const;
};

// weight(template) <- epsilon + count of template among the pairs' tactics;
// the epsilon floor keeps every applicable tactic reachable.
GeneratorPolicy policy_update(const GeneratorPolicy& policy,
                              const std::vector<StateTacticPair>& pairs);

std::string save_policy_json(const GeneratorPolicy& policy);
GeneratorPolicy load_policy_json(const std::string& text);

// Desk-scale generator over the toy kernel's statically-applicable tactics.
// Sample mode draws n candidates with replacement and dedupes; exhaustive
// mode returns every applicable candidate (first min(n, count) in canonical
// order). Temperature is ignored; probabilities come from the policy.
class ToyPolicyGenerator : public TacticGenerator {
public:
    enum class Mode { Sample, Exhaustive };

    explicit ToyPolicyGenerator(GeneratorPolicy policy, Mode mode = Mode::Exhaustive)
        : policy_(std::move(policy)), mode_(mode) {}

    std::vector<TacticCandidate> generate(const EnvState& state, const PromptContext& ctx, int n,
                                          double temperature, std::uint64_t seed) override;

    const GeneratorPolicy& policy() const { return policy_; }
    void set_policy(GeneratorPolicy policy) { policy_ = std::move(policy); }

private:
    GeneratorPolicy policy_;
    Mode mode_;
};

// HTTP client for a text-generation endpoint:
//   POST {"prompt": str, "n": int, "temperature": float, "max_tokens": int}
//   ->   {"completions":[{"text": str, "logprob": float}]}
// Candidates are truncated at the first newline; a missing logprob falls
// back to ln(1/(rank+1)) with a warning on stderr.
class RemoteGenerator : public TacticGenerator {
public:
    explicit RemoteGenerator(std::string url, int max_tokens = 128, double timeout_seconds = 30.0);

    std::vector<TacticCandidate> generate(const EnvState& state, const PromptContext& ctx, int n,
                                          double temperature, std::uint64_t seed) override;

private:
    std::string host_;  // scheme://host:port
    std::string path_;
    int max_tokens_;
    double timeout_seconds_;
};

}  // namespace stepprove
