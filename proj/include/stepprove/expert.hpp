#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stepprove/dataset.hpp"
#include "stepprove/search.hpp"

namespace stepprove {

// One pair per proof step, premises recomputed against the current
// retriever. Requires a solved result; replays the script from a fresh
// session and fails hard if any step rejects.
std::vector<StateTacticPair> extract_pairs(const std::vector<std::string>& script,
                                           const std::string& statement_text,
                                           const std::string& statement_id,
                                           const std::optional<std::string>& nl_description,
                                           Environment& environment, const Retriever* retriever,
                                           int top_k, int round);

std::vector<StateTacticPair> extract_pairs(const ProveResult& result,
                                           const std::string& statement_text,
                                           const std::string& statement_id,
                                           const std::optional<std::string>& nl_description,
                                           Environment& environment, const Retriever* retriever,
                                           int top_k, int round);

struct PoolStatement {
    std::string id;
    std::string statement;
    std::optional<std::string> nl;
};

// One statement per line (lines starting with '#' are skipped), or JSONL
// objects {"id", "statement", "nl"}.
std::vector<PoolStatement> load_statement_pool(const std::string& path);

struct IterationConfig {
    int rounds = 3;
    ProveConfig prove{};
    int retrieval_top_k = 0;
    bool reattempt_solved = false;  // default: attack only unsolved statements
    std::string dataset_path;       // cumulative state-tactic dataset (JSONL)
    std::uint64_t master_seed = 0;
    std::string config_digest;  // stamped into the ledger and dataset
    int jobs = 1;               // concurrent attempts within a round
};

struct IterationRound {
    int round = 0;
    std::string pool_ref;
    std::vector<std::string> solved_ids;  // newly solved this round
    std::size_t cumulative_solved = 0;
    std::size_t new_pairs = 0;
    std::size_t duplicate_pairs = 0;
    std::string dataset_digest;  // hex digest of the cumulative dataset
    std::string policy_json;     // policy snapshot after the round's update
};

std::string round_to_jsonl(const IterationRound& round);

// Fig-1(b) loop at desk scale: attempt unsolved statements, harvest pairs
// from successes, merge into the dataset, and refresh the policy weights.
// The round ledger is appended to `ledger_path` (when non-empty) as each
// round completes, so a failed round leaves earlier rounds on disk.
std::vector<IterationRound> run_iteration(const std::vector<PoolStatement>& pool,
                                          const IterationConfig& config,
                                          GeneratorPolicy& policy,
                                          const EnvironmentFactory& environment_factory,
                                          const Retriever* retriever,
                                          const std::string& pool_ref = "",
                                          const std::string& ledger_path = "");

// per-round pass seed base: master ^ (round << 16), then per-statement by a
// stable hash of the statement id
std::uint64_t round_seed(std::uint64_t master, int round);
std::uint64_t statement_seed(std::uint64_t round_seed_value, const std::string& statement_id);

}  // namespace stepprove
