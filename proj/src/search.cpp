#include "stepprove/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <unordered_map>

#include <json.hpp>

#include "stepprove/rng.hpp"

namespace stepprove {

using json = nlohmann::ordered_json;

double score_node(double cumulative_logprob, int path_length, double alpha) {
    if (path_length < 1) throw std::invalid_argument("score is undefined for L < 1");
    if (cumulative_logprob > 0) throw std::invalid_argument("cumulative log-probability must be <= 0");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
    return cumulative_logprob / std::pow(static_cast<double>(path_length), alpha);
}

std::string node_status_name(NodeStatus s) {
    switch (s) {
        case NodeStatus::Open: return "open";
        case NodeStatus::Expanded: return "expanded";
        case NodeStatus::TerminalComplete: return "terminal-complete";
        case NodeStatus::Dead: return "dead";
    }
    return "unknown";
}

int select_best(const std::vector<SearchNode>& nodes) {
    int best = -1;
    for (const auto& node : nodes) {
        if (node.status != NodeStatus::Open) continue;
        if (best < 0 || node.score > nodes[static_cast<std::size_t>(best)].score) best = node.id;
    }
    return best;
}

std::string render_proof_prefix(const std::string& statement,
                                const std::vector<std::string>& tactics,
                                const std::optional<std::string>& nl_description) {
    std::string out;
    if (nl_description) out += "-- " + *nl_description + "\n";
    out += "theorem : " + statement + " := by";
    for (const auto& t : tactics) out += "\n  " + t;
    return out;
}

namespace {

struct PassRunner {
    TacticGenerator& generator;
    Environment& environment;
    const Retriever* retriever;
    const PassConfig& config;
    const std::string& statement;
    const std::optional<std::string>& nl_description;

    PassResult result;
    std::chrono::steady_clock::time_point start_time = std::chrono::steady_clock::now();

    bool out_of_time() const {
        if (!config.wall_limit_seconds) return false;
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       start_time)
                             .count();
        return elapsed > *config.wall_limit_seconds;
    }

    std::vector<std::string> path_tactics(int node_id) const {
        std::vector<std::string> tactics;
        for (int cur = node_id; cur > 0; cur = result.tree[static_cast<std::size_t>(cur)].parent)
            tactics.push_back(result.tree[static_cast<std::size_t>(cur)].tactic);
        std::reverse(tactics.begin(), tactics.end());
        return tactics;
    }

    // a child whose goals match any ancestor on its own path is a cycle
    bool cycles(int parent_id, const EnvState& child_state) const {
        for (int cur = parent_id; cur >= 0; cur = result.tree[static_cast<std::size_t>(cur)].parent)
            if (result.tree[static_cast<std::size_t>(cur)].state.same_goals(child_state))
                return true;
        return false;
    }

    // returns the id of a terminal-complete child, or -1
    int expand(int node_id) {
        // copies: growing the tree below invalidates references into it
        const EnvState parent_state = result.tree[static_cast<std::size_t>(node_id)].state;
        const double parent_cumulative =
            result.tree[static_cast<std::size_t>(node_id)].cumulative_logprob;
        const int parent_depth = result.tree[static_cast<std::size_t>(node_id)].depth;

        PromptContext ctx;
        ctx.nl_description = nl_description;
        ctx.proof_prefix = render_proof_prefix(statement, path_tactics(node_id), nl_description);
        ctx.state_rendering = render_env_state(parent_state);
        if (retriever && config.retrieval_top_k > 0)
            ctx.premises = retriever->premises_for_state(ctx.state_rendering, config.retrieval_top_k);

        std::uint64_t call_seed =
            mix_seed(config.seed, static_cast<std::uint64_t>(result.counters.generator_calls));
        std::vector<TacticCandidate> candidates = generator.generate(
            parent_state, ctx, config.samples_per_step, config.temperature, call_seed);
        result.counters.generator_calls += 1;
        result.counters.max_candidates_per_call = std::max(
            result.counters.max_candidates_per_call, static_cast<int>(candidates.size()));

        // dedupe identical tactic strings keeping the best log-probability
        std::vector<TacticCandidate> unique;
        std::unordered_map<std::string, std::size_t> first_slot;
        for (auto& c : candidates) {
            auto [it, inserted] = first_slot.emplace(c.text, unique.size());
            if (inserted)
                unique.push_back(std::move(c));
            else
                unique[it->second].logprob = std::max(unique[it->second].logprob, c.logprob);
        }

        int complete_id = -1;
        int children = 0;
        for (const auto& candidate : unique) {
            result.counters.tactics_attempted += 1;
            EnvResult applied = environment.apply(parent_state.id, candidate.text);
            if (!applied.ok()) {
                if (applied.error().cls == ErrorClass::Transport)
                    throw SearchError("environment transport failure: " + applied.error().message);
                result.counters.tactics_invalid += 1;  // invalid tactics are discarded
                continue;
            }
            result.counters.tactics_valid += 1;

            SearchNode child;
            child.id = static_cast<int>(result.tree.size());
            child.parent = node_id;
            child.state = applied.state();
            child.tactic = candidate.text;
            child.step_logprob = candidate.logprob;
            child.cumulative_logprob = parent_cumulative + candidate.logprob;
            child.depth = parent_depth + 1;
            child.score = score_node(child.cumulative_logprob, child.depth, config.score.alpha);

            if (applied.state().complete()) {
                child.status = NodeStatus::TerminalComplete;
            } else if (cycles(node_id, applied.state())) {
                child.status = NodeStatus::Dead;  // kept in the snapshot, never expanded
            } else {
                child.status = NodeStatus::Open;
            }
            bool completed = child.status == NodeStatus::TerminalComplete;
            int child_id = child.id;
            result.tree.push_back(std::move(child));
            ++children;
            if (completed) {
                complete_id = child_id;
                break;
            }
        }
        result.counters.max_children_per_expansion =
            std::max(result.counters.max_children_per_expansion, children);
        result.tree[static_cast<std::size_t>(node_id)].status = NodeStatus::Expanded;
        result.counters.expansions += 1;
        return complete_id;
    }
};

}  // namespace

PassResult run_pass(const std::string& statement, TacticGenerator& generator,
                    Environment& environment, const Retriever* retriever, const PassConfig& config,
                    const std::optional<std::string>& nl_description) {
    if (config.samples_per_step < 1) throw SearchError("samples_per_step must be >= 1");
    if (config.max_expansions < 1) throw SearchError("max_expansions must be >= 1");
    if (config.temperature <= 0) throw SearchError("temperature must be > 0");

    PassRunner runner{generator, environment, retriever, config, statement, nl_description, {}};

    EnvResult root = environment.init(statement);
    if (!root.ok())
        throw SearchError("environment rejected the statement: " + root.error().message);

    SearchNode root_node;
    root_node.id = 0;
    root_node.state = root.state();
    root_node.status = root.state().complete() ? NodeStatus::TerminalComplete : NodeStatus::Open;
    runner.result.tree.push_back(std::move(root_node));

    if (runner.result.tree[0].status == NodeStatus::TerminalComplete) {
        runner.result.solved = true;  // degenerate: the peer closed it at init
        return std::move(runner.result);
    }

    // the root is expanded unconditionally and never scored
    int complete_id = runner.expand(0);
    while (complete_id < 0 && runner.result.counters.expansions < config.max_expansions) {
        if (runner.out_of_time()) {
            runner.result.timed_out = true;
            break;
        }
        int best = select_best(runner.result.tree);
        if (best < 0) break;  // frontier exhausted
        complete_id = runner.expand(best);
    }

    if (complete_id >= 0) {
        runner.result.solved = true;
        runner.result.script = runner.path_tactics(complete_id);
    }
    return std::move(runner.result);
}

std::string budget_string(int passes, int samples_per_step) {
    return std::to_string(passes) + " × " + std::to_string(samples_per_step);
}

ProveResult run_prove(const std::string& statement, TacticGenerator& generator,
                      const EnvironmentFactory& environment_factory, const Retriever* retriever,
                      const ProveConfig& config, const std::optional<std::string>& nl_description) {
    if (config.passes < 1) throw SearchError("passes must be >= 1");

    ProveResult result;
    result.budget = budget_string(config.passes, config.pass.samples_per_step);
    for (int i = 0; i < config.passes; ++i) {
        PassConfig pass_config = config.pass;
        pass_config.seed = config.master_seed ^ static_cast<std::uint64_t>(i);
        std::unique_ptr<Environment> env = environment_factory();
        PassResult pass =
            run_pass(statement, generator, *env, retriever, pass_config, nl_description);
        result.passes_run += 1;
        bool solved = pass.solved;
        if (solved) {
            result.script = pass.script;
            result.solved = true;
            result.solved_pass = i;
        }
        result.pass_results.push_back(std::move(pass));
        if (solved) break;  // pass@K needs only one witness
    }
    return result;
}

std::string snapshot_to_jsonl(const PassResult& result, const std::string& config_digest,
                              std::uint64_t seed) {
    std::string out;
    json meta{{"meta", {{"config_digest", config_digest}, {"seed", seed}}}};
    out += meta.dump();
    out += '\n';
    for (const auto& node : result.tree) {
        json j{{"id", node.id},
               {"parent", node.parent < 0 ? json(nullptr) : json(node.parent)},
               {"tactic", node.tactic.empty() ? json(nullptr) : json(node.tactic)},
               {"step_logprob", node.step_logprob},
               {"cumulative", node.cumulative_logprob},
               {"depth", node.depth},
               {"score", node.score},
               {"status", node_status_name(node.status)},
               {"goals", render_env_state(node.state)}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_snapshot(const std::string& path, const PassResult& result,
                    const std::string& config_digest, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << snapshot_to_jsonl(result, config_digest, seed);
}

}  // namespace stepprove
