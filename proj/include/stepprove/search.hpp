#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stepprove/env.hpp"
#include "stepprove/generator.hpp"
#include "stepprove/retrieval.hpp"

namespace stepprove {

struct ScoreParams {
    double alpha = 0.5;  // in [0, 1]
};

// score = cumulative log-probability / L^alpha, L >= 1. The root (L = 0) is
// never scored.
double score_node(double cumulative_logprob, int path_length, double alpha);

enum class NodeStatus { Open, Expanded, TerminalComplete, Dead };
std::string node_status_name(NodeStatus s);

struct SearchNode {
    int id = 0;
    int parent = -1;  // -1 for the root
    EnvState state;
    std::string tactic;  // empty for the root
    double step_logprob = 0.0;
    double cumulative_logprob = 0.0;
    int depth = 0;  // L: path length from the root
    double score = 0.0;
    NodeStatus status = NodeStatus::Open;
};

// Index of the best open node: maximum score, ties broken by creation order.
// Returns -1 when no node is open.
int select_best(const std::vector<SearchNode>& nodes);

struct PassConfig {
    int samples_per_step = 64;  // N
    int max_expansions = 100;   // E
    ScoreParams score{};
    double temperature = 1.5;
    int retrieval_top_k = 0;
    std::uint64_t seed = 0;
    std::optional<double> wall_limit_seconds;
};

struct PassCounters {
    int expansions = 0;
    int generator_calls = 0;
    int max_candidates_per_call = 0;
    int max_children_per_expansion = 0;
    long tactics_attempted = 0;
    long tactics_valid = 0;
    long tactics_invalid = 0;
};

struct PassResult {
    bool solved = false;
    bool timed_out = false;
    std::vector<std::string> script;  // root-to-leaf tactics when solved
    PassCounters counters;
    std::vector<SearchNode> tree;  // search-tree snapshot
};

struct SearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One best-first pass: the root is expanded unconditionally, then
// {select_best; expand} until a complete node appears, the frontier
// empties, or max_expansions is reached.
PassResult run_pass(const std::string& statement, TacticGenerator& generator,
                    Environment& environment, const Retriever* retriever, const PassConfig& config,
                    const std::optional<std::string>& nl_description = std::nullopt);

struct ProveConfig {
    int passes = 64;  // M
    PassConfig pass{};
    std::uint64_t master_seed = 0;
};

struct ProveResult {
    bool solved = false;
    std::vector<std::string> script;
    int passes_run = 0;
    int solved_pass = -1;
    std::vector<PassResult> pass_results;
    std::string budget;  // "M × N"
};

std::string budget_string(int passes, int samples_per_step);

// Up to M independent passes with per-pass seeds master ^ i; stops at the
// first solved pass.
ProveResult run_prove(const std::string& statement, TacticGenerator& generator,
                      const EnvironmentFactory& environment_factory, const Retriever* retriever,
                      const ProveConfig& config,
                      const std::optional<std::string>& nl_description = std::nullopt);

// JSONL snapshot: a meta line with config digest and seed, then one node per
// line with (id, parent, tactic, step_logprob, cumulative, depth, score,
// status, goals).
std::string snapshot_to_jsonl(const PassResult& result, const std::string& config_digest,
                              std::uint64_t seed);
void write_snapshot(const std::string& path, const PassResult& result,
                    const std::string& config_digest, std::uint64_t seed);

std::string render_proof_prefix(const std::string& statement,
                                const std::vector<std::string>& tactics,
                                const std::optional<std::string>& nl_description);

}  // namespace stepprove
