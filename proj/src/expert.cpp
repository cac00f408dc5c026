#include "stepprove/expert.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "stepprove/generator.hpp"
#include "stepprove/rng.hpp"

namespace stepprove {

using json = nlohmann::json;

std::vector<StateTacticPair> extract_pairs(const std::vector<std::string>& script,
                                           const std::string& statement_text,
                                           const std::string& statement_id,
                                           const std::optional<std::string>& nl_description,
                                           Environment& environment, const Retriever* retriever,
                                           int top_k, int round) {
    EnvResult state = environment.init(statement_text);
    if (!state.ok())
        throw std::runtime_error("extract_pairs: statement rejected: " + state.error().message);

    std::vector<StateTacticPair> pairs;
    std::vector<std::string> prefix;
    for (const auto& tactic : script) {
        StateTacticPair pair;
        pair.nl_description = nl_description;
        pair.prefix = prefix;
        pair.state = render_env_state(state.state());
        if (retriever && top_k > 0) {
            for (const auto& premise : retriever->premises_for_state(pair.state, top_k))
                pair.premises.push_back(
                    PairPremise{premise.id, premise.formal_name, premise.formal_statement});
        }
        pair.tactic = tactic;
        pair.statement_id = statement_id;
        pair.round = round;
        pairs.push_back(std::move(pair));

        state = environment.apply(state.state().id, tactic);
        if (!state.ok())
            throw std::runtime_error("extract_pairs: replay failed at '" + tactic +
                                     "': " + state.error().message);
        prefix.push_back(tactic);
    }
    if (!state.state().complete())
        throw std::runtime_error("extract_pairs: script does not close the proof");
    return pairs;
}

std::vector<StateTacticPair> extract_pairs(const ProveResult& result,
                                           const std::string& statement_text,
                                           const std::string& statement_id,
                                           const std::optional<std::string>& nl_description,
                                           Environment& environment, const Retriever* retriever,
                                           int top_k, int round) {
    if (!result.solved)
        throw std::invalid_argument("extract_pairs requires a solved result");
    return extract_pairs(result.script, statement_text, statement_id, nl_description, environment,
                         retriever, top_k, round);
}

std::vector<PoolStatement> load_statement_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<PoolStatement> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '{') {
            json j = json::parse(line);
            PoolStatement s;
            s.id = j.at("id").get<std::string>();
            s.statement = j.at("statement").get<std::string>();
            if (j.contains("nl") && !j["nl"].is_null()) s.nl = j["nl"].get<std::string>();
            out.push_back(std::move(s));
        } else {
            char id[32];
            std::snprintf(id, sizeof id, "t%03d", line_no);
            out.push_back(PoolStatement{id, line, std::nullopt});
        }
    }
    return out;
}

std::uint64_t round_seed(std::uint64_t master, int round) {
    return master ^ (static_cast<std::uint64_t>(round) << 16);
}

std::uint64_t statement_seed(std::uint64_t round_seed_value, const std::string& statement_id) {
    return round_seed_value ^ fnv1a64(statement_id);
}

std::string round_to_jsonl(const IterationRound& round) {
    return json{{"round", round.round},
                {"pool", round.pool_ref},
                {"solved_ids", round.solved_ids},
                {"cumulative_solved", round.cumulative_solved},
                {"new_pairs", round.new_pairs},
                {"duplicate_pairs", round.duplicate_pairs},
                {"dataset_digest", round.dataset_digest},
                {"policy", json::parse(round.policy_json)}}
        .dump();
}

namespace {

std::string digest_hex(std::uint64_t digest) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

}  // namespace

std::vector<IterationRound> run_iteration(const std::vector<PoolStatement>& pool,
                                          const IterationConfig& config,
                                          GeneratorPolicy& policy,
                                          const EnvironmentFactory& environment_factory,
                                          const Retriever* retriever, const std::string& pool_ref,
                                          const std::string& ledger_path) {
    if (config.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (pool.empty()) throw std::invalid_argument("statement pool is empty");
    if (config.dataset_path.empty()) throw std::invalid_argument("dataset_path is required");

    std::ofstream ledger;
    if (!ledger_path.empty()) {
        ledger.open(ledger_path);
        if (!ledger) throw std::runtime_error("cannot create " + ledger_path);
        ledger << json{{"meta",
                        {{"config_digest", config.config_digest},
                         {"seed", config.master_seed}}}}
                      .dump()
               << '\n';
    }

    std::set<std::string> solved;
    std::vector<IterationRound> rounds;
    for (int round = 1; round <= config.rounds; ++round) {
        IterationRound record;
        record.round = round;
        record.pool_ref = pool_ref;

        std::vector<const PoolStatement*> attempts;
        for (const auto& statement : pool)
            if (config.reattempt_solved || !solved.count(statement.id))
                attempts.push_back(&statement);

        // attempts are independent and seeded per statement; the merge and
        // policy update below are the round's serialization barrier
        std::uint64_t seed_base = round_seed(config.master_seed, round);
        std::vector<std::vector<StateTacticPair>> results(attempts.size());
        std::vector<char> attempt_solved(attempts.size(), 0);
        auto attempt = [&](std::size_t i) {
            const PoolStatement& statement = *attempts[i];
            ToyPolicyGenerator generator(policy);
            ProveConfig prove_config = config.prove;
            prove_config.master_seed = statement_seed(seed_base, statement.id);
            ProveResult result = run_prove(statement.statement, generator, environment_factory,
                                           retriever, prove_config, statement.nl);
            if (!result.solved) return;
            std::unique_ptr<Environment> replay_env = environment_factory();
            results[i] = extract_pairs(result, statement.statement, statement.id, statement.nl,
                                       *replay_env, retriever, config.retrieval_top_k, round);
            attempt_solved[i] = 1;
        };
        if (config.jobs <= 1) {
            for (std::size_t i = 0; i < attempts.size(); ++i) attempt(i);
        } else {
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= attempts.size()) return;
                    attempt(i);
                }
            };
            std::vector<std::thread> threads;
            for (int t = 0; t < config.jobs; ++t) threads.emplace_back(worker);
            for (auto& t : threads) t.join();
        }

        std::vector<StateTacticPair> harvested;
        for (std::size_t i = 0; i < attempts.size(); ++i) {
            if (!attempt_solved[i]) continue;
            if (!solved.count(attempts[i]->id)) record.solved_ids.push_back(attempts[i]->id);
            solved.insert(attempts[i]->id);
            harvested.insert(harvested.end(), results[i].begin(), results[i].end());
        }

        std::string meta = "config=" + config.config_digest + " seed=" +
                           std::to_string(config.master_seed);
        MergeStats stats = merge_dataset(config.dataset_path, harvested, false,
                                         config.config_digest.empty() ? "" : meta);
        record.cumulative_solved = solved.size();
        record.new_pairs = stats.added;
        record.duplicate_pairs = stats.duplicates;
        record.dataset_digest = digest_hex(dataset_digest(config.dataset_path));

        // retrain on the full cumulative dataset, as an SFT pass would
        std::vector<StateTacticPair> dataset = load_pairs_dataset(config.dataset_path);
        policy = policy_update(policy, dataset);
        record.policy_json = save_policy_json(policy);

        if (ledger.is_open()) ledger << round_to_jsonl(record) << '\n' << std::flush;
        rounds.push_back(std::move(record));
    }
    return rounds;
}

}  // namespace stepprove
