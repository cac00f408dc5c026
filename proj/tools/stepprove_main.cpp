#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stepprove/eval.hpp"
#include "stepprove/expert.hpp"
#include "stepprove/generator.hpp"
#include "stepprove/herald.hpp"
#include "stepprove/retrieval.hpp"
#include "stepprove/rng.hpp"
#include "stepprove/search.hpp"
#include "stepprove/wire.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using namespace stepprove;

namespace {

// Effective knobs shared by prove / iterate / eval; file values are applied
// by CLI11's config support, flags override.
struct ProverOptions {
    std::string statement;
    std::string statement_file;
    int passes = 64;            // M (K for eval)
    int samples = 64;           // N
    int expansions = 100;       // E
    double alpha = 0.5;
    double temperature = 1.5;
    int top_k = 6;
    std::uint64_t seed = 0;
    std::string generator = "toy";  // toy | toy-sample | remote
    std::string generator_url;
    std::string policy_path;
    std::string environment = "builtin";  // builtin | external
    std::vector<std::string> env_command;
    std::string embedder_path;
    std::string index_path;
    int jobs = 1;
};

void add_prover_options(CLI::App* cmd, ProverOptions& opt) {
    cmd->add_option("--passes", opt.passes, "independent search passes (M)")
        ->capture_default_str();
    cmd->add_option("--samples", opt.samples, "tactic candidates per expansion step (N)")
        ->capture_default_str();
    cmd->add_option("--expansions", opt.expansions, "max expansions per pass (E)")
        ->capture_default_str();
    cmd->add_option("--alpha", opt.alpha, "score exponent in [0,1]")->capture_default_str();
    cmd->add_option("--temperature", opt.temperature, "remote sampling temperature")
        ->capture_default_str();
    cmd->add_option("--top-k", opt.top_k, "retrieved premises per prompt")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "master random seed")->capture_default_str();
    cmd->add_option("--gen", opt.generator, "tactic generator: toy, toy-sample or remote")
        ->capture_default_str();
    cmd->add_option("--gen-url", opt.generator_url,
                    "remote generation endpoint (or STEPPROVE_GEN_URL)");
    cmd->add_option("--policy", opt.policy_path, "toy policy weights JSON file");
    cmd->add_option("--env", opt.environment, "proof environment: builtin or external")
        ->capture_default_str();
    cmd->add_option("--env-cmd", opt.env_command,
                    "external environment command line (repeat per argument)");
    cmd->add_option("--embedder", opt.embedder_path, "embedder checkpoint for retrieval");
    cmd->add_option("--index", opt.index_path, "premise index for retrieval");
    cmd->add_option("--jobs", opt.jobs, "statement-level parallelism")->capture_default_str();
}

std::string config_digest_of(const ProverOptions& opt) {
    nlohmann::ordered_json j{{"passes", opt.passes},
                             {"samples", opt.samples},
                             {"expansions", opt.expansions},
                             {"alpha", opt.alpha},
                             {"temperature", opt.temperature},
                             {"top_k", opt.top_k},
                             {"seed", opt.seed},
                             {"generator", opt.generator},
                             {"environment", opt.environment},
                             {"embedder", opt.embedder_path},
                             {"index", opt.index_path}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

GeneratorPolicy load_policy_or_uniform(const std::string& path) {
    if (path.empty()) return GeneratorPolicy::uniform();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_policy_json(text);
}

std::string resolve_generator_url(const ProverOptions& opt) {
    if (!opt.generator_url.empty()) return opt.generator_url;
    const char* env = std::getenv("STEPPROVE_GEN_URL");
    if (env && *env) return env;
    throw std::runtime_error("remote generator needs --gen-url or STEPPROVE_GEN_URL");
}

GeneratorFactory make_generator_factory(const ProverOptions& opt) {
    if (opt.generator == "toy" || opt.generator == "toy-sample") {
        GeneratorPolicy policy = load_policy_or_uniform(opt.policy_path);
        auto mode = opt.generator == "toy" ? ToyPolicyGenerator::Mode::Exhaustive
                                           : ToyPolicyGenerator::Mode::Sample;
        return [policy, mode] { return std::make_unique<ToyPolicyGenerator>(policy, mode); };
    }
    if (opt.generator == "remote") {
        std::string url = resolve_generator_url(opt);
        return [url] { return std::make_unique<RemoteGenerator>(url); };
    }
    throw std::runtime_error("unknown generator '" + opt.generator + "'");
}

EnvironmentFactory make_environment_factory(const ProverOptions& opt) {
    if (opt.environment == "builtin")
        return [] { return std::make_unique<KernelEnvironment>(); };
    if (opt.environment == "external") {
        if (opt.env_command.empty())
            throw std::runtime_error("external environment needs --env-cmd");
        std::vector<std::string> argv = opt.env_command;
        return [argv] { return std::make_unique<ProcessEnvironment>(argv); };
    }
    throw std::runtime_error("unknown environment '" + opt.environment + "'");
}

std::unique_ptr<Retriever> make_retriever(const ProverOptions& opt) {
    if (opt.embedder_path.empty() && opt.index_path.empty()) return nullptr;
    if (opt.embedder_path.empty() || opt.index_path.empty())
        throw std::runtime_error("retrieval needs both --embedder and --index");
    return std::make_unique<Retriever>(ToyEmbedder::load(opt.embedder_path),
                                       PremiseIndex::load(opt.index_path));
}

PassConfig make_pass_config(const ProverOptions& opt) {
    PassConfig cfg;
    cfg.samples_per_step = opt.samples;
    cfg.max_expansions = opt.expansions;
    cfg.score.alpha = opt.alpha;
    cfg.temperature = opt.temperature;
    cfg.retrieval_top_k = opt.top_k;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string first_line(const std::string& text) {
    std::size_t nl = text.find('\n');
    std::string line = nl == std::string::npos ? text : text.substr(0, nl);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    return line;
}

// ---------- subcommand runners ----------

int run_prove_cmd(const ProverOptions& opt, const std::string& tree_out,
                  const std::string& script_out) {
    std::string statement = opt.statement;
    if (statement.empty() && !opt.statement_file.empty())
        statement = first_line(read_file(opt.statement_file));
    if (statement.empty()) throw std::runtime_error("prove needs --statement or --statement-file");

    GeneratorFactory gen_factory = make_generator_factory(opt);
    EnvironmentFactory env_factory = make_environment_factory(opt);
    std::unique_ptr<Retriever> retriever = make_retriever(opt);

    ProveConfig config;
    config.passes = opt.passes;
    config.pass = make_pass_config(opt);
    config.master_seed = opt.seed;

    std::unique_ptr<TacticGenerator> generator = gen_factory();
    ProveResult result = run_prove(statement, *generator, env_factory, retriever.get(), config);

    std::string digest = config_digest_of(opt);
    if (!tree_out.empty() && !result.pass_results.empty())
        write_snapshot(tree_out, result.pass_results.back(), digest, opt.seed);
    if (result.solved) {
        for (const auto& tactic : result.script) std::cout << tactic << '\n';
        if (!script_out.empty()) {
            std::ofstream out(script_out);
            out << "# config=" << digest << " seed=" << opt.seed << '\n';
            for (const auto& tactic : result.script) out << tactic << '\n';
        }
        std::cerr << "solved '" << statement << "' in pass " << result.solved_pass << " ("
                  << result.script.size() << " tactics, budget " << result.budget << ")\n";
    } else {
        std::cerr << "unsolved '" << statement << "' after " << result.passes_run
                  << " passes (budget " << result.budget << ")\n";
    }
    return 0;
}

int run_index_build(const std::string& corpus_path, const std::string& embedder_path,
                    const std::string& out_path) {
    ToyEmbedder embedder = ToyEmbedder::load(embedder_path);
    std::vector<Premise> corpus = load_premises_jsonl(corpus_path);
    PremiseIndex index = PremiseIndex::build(embedder, corpus);
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(corpus_path + "|" + embedder_path)));
    index.save(out_path, file_digest(corpus_path), digest, 0);
    std::cout << "indexed " << index.size() << " premises into " << out_path << '\n';
    return 0;
}

int run_index_search(const std::string& index_path, const std::string& embedder_path,
                     const std::string& corpus_path, const std::string& query, int k) {
    PremiseIndex index = PremiseIndex::load(index_path);
    if (!corpus_path.empty() && index.corpus_digest() != file_digest(corpus_path))
        throw std::runtime_error("index is stale: corpus digest mismatch");
    ToyEmbedder embedder = ToyEmbedder::load(embedder_path);
    auto results = index.top_k(embedder.embed(query, TextRole::Query), k);
    for (std::size_t i = 0; i < results.size(); ++i) {
        char sim[32];
        std::snprintf(sim, sizeof sim, "%.6f", results[i].similarity);
        std::cout << i + 1 << '\t' << results[i].premise.id << '\t'
                  << results[i].premise.formal_name << '\t' << sim << '\n';
    }
    std::cerr << results.size() << " results for query\n";
    return 0;
}

struct TrainOptions {
    std::string corpus, pairs, triplets;
    std::string embedder_in, embedder_out;
    int dim_hash = 1024, dim_out = 64;
    int batch = 32, epochs = 20;
    double margin = 1.0, lr = 2e-3;
    std::uint64_t seed = 42;
    int window_lo = 30, window_hi = 100;
    std::string mined_out;
};

std::string train_digest_of(const TrainOptions& opt) {
    nlohmann::ordered_json j{{"dim_hash", opt.dim_hash}, {"dim_out", opt.dim_out},
                             {"batch", opt.batch},       {"epochs", opt.epochs},
                             {"margin", opt.margin},     {"lr", opt.lr},
                             {"seed", opt.seed},         {"lo", opt.window_lo},
                             {"hi", opt.window_hi}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

ToyEmbedder load_or_init_embedder(const TrainOptions& opt) {
    if (!opt.embedder_in.empty()) return ToyEmbedder::load(opt.embedder_in);
    EmbedderConfig cfg;
    cfg.dim_hash = opt.dim_hash;
    cfg.dim_out = opt.dim_out;
    return ToyEmbedder(cfg, opt.seed);
}

int run_retrain_stage1(const TrainOptions& opt) {
    ToyEmbedder embedder = load_or_init_embedder(opt);
    std::vector<Premise> corpus = load_premises_jsonl(opt.corpus);
    std::vector<TrainPair> pairs = load_pairs_jsonl(opt.pairs);
    Stage1Config cfg;
    cfg.batch_size = opt.batch;
    cfg.margin = opt.margin;
    cfg.learning_rate = opt.lr;
    cfg.epochs = opt.epochs;
    cfg.seed = opt.seed;
    TrainLog log = train_stage1(embedder, pairs, corpus, cfg);
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
        std::cerr << "epoch " << e << " loss " << log.epoch_loss[e] << '\n';
    embedder.save(opt.embedder_out, train_digest_of(opt), opt.seed);
    std::cout << "stage-1 trained " << pairs.size() << " pairs, loss "
              << (log.epoch_loss.empty() ? 0.0 : log.epoch_loss.front()) << " -> "
              << (log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()) << ", saved "
              << opt.embedder_out << '\n';
    return 0;
}

int run_retrain_mine(const TrainOptions& opt) {
    ToyEmbedder embedder = ToyEmbedder::load(opt.embedder_in);
    std::vector<Premise> corpus = load_premises_jsonl(opt.corpus);
    std::vector<TrainPair> pairs = load_pairs_jsonl(opt.pairs);
    auto triplets =
        mine_hard_negatives(embedder, pairs, corpus, opt.window_lo, opt.window_hi, opt.seed);
    save_triplets_jsonl(opt.mined_out, triplets,
                        "config=" + train_digest_of(opt) + " seed=" + std::to_string(opt.seed));
    std::cout << "mined " << triplets.size() << " hard-negative triplets into " << opt.mined_out
              << '\n';
    return 0;
}

int run_retrain_stage2(const TrainOptions& opt) {
    ToyEmbedder embedder = ToyEmbedder::load(opt.embedder_in);
    std::vector<Premise> corpus = load_premises_jsonl(opt.corpus);
    std::vector<TrainTriplet> triplets = load_triplets_jsonl(opt.triplets);
    Stage2Config cfg;
    cfg.margin = opt.margin;
    cfg.learning_rate = opt.lr;
    cfg.epochs = opt.epochs;
    cfg.seed = opt.seed;
    TrainLog log = train_stage2(embedder, triplets, corpus, cfg);
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
        std::cerr << "epoch " << e << " loss " << log.epoch_loss[e] << '\n';
    embedder.save(opt.embedder_out, train_digest_of(opt), opt.seed);
    std::cout << "stage-2 trained " << triplets.size() << " triplets, saved " << opt.embedder_out
              << '\n';
    return 0;
}

struct HeraldPrompts {
    std::string formalizer = "Translate the statement into Lean 4:\n{input}";
    std::string informalizer = "Translate the formal statement into plain English:\n{input}";
    std::string judge =
        "Answer 'consistent' or 'inconsistent': does the back-translation faithfully restate "
        "the original?\n{input}";
};

int run_herald(const std::vector<std::string>& docs, const std::string& records_out,
               const std::string& pool_out, int candidates, const std::string& mock_set,
               const std::string& refiner_kind, bool wellformed_gate, const std::string& url,
               std::uint64_t seed, const HeraldPrompts& prompts) {
    std::vector<std::string> documents;
    for (const auto& path : docs) documents.push_back(read_file(path));

    std::unique_ptr<ModelClient> refiner;
    if (refiner_kind == "identity") refiner = make_identity_refiner();
    else if (refiner_kind == "trimming") refiner = make_trimming_refiner();
    else if (refiner_kind != "none")
        throw std::runtime_error("unknown refiner '" + refiner_kind + "'");

    std::unique_ptr<ModelClient> formalizer, informalizer, judge;
    if (mock_set == "identity") {
        formalizer = make_wrap_formalizer();
        informalizer = make_echo_informalizer();
        judge = make_exact_match_judge();
    } else if (mock_set == "corrupt-half") {
        formalizer = make_distinct_formalizer();
        informalizer = make_corrupt_half_informalizer();
        judge = make_exact_match_judge();
    } else if (mock_set == "passthrough") {
        formalizer = make_passthrough_formalizer();
        informalizer = make_echo_informalizer();
        judge = make_exact_match_judge();
    } else if (mock_set == "remote") {
        if (url.empty()) throw std::runtime_error("remote clients need --url");
        formalizer = make_http_client(ClientRole::Formalizer, url, prompts.formalizer);
        informalizer = make_http_client(ClientRole::Informalizer, url, prompts.informalizer);
        judge = make_http_client(ClientRole::Judge, url, prompts.judge);
    } else {
        throw std::runtime_error("unknown client set '" + mock_set + "'");
    }

    HeraldConfig config;
    config.n_candidates = candidates;
    config.wellformed_gate = wellformed_gate;
    KernelEnvironment gate_env;
    HeraldClients clients{refiner.get(), formalizer.get(), informalizer.get(), judge.get(),
                          wellformed_gate ? &gate_env : nullptr};

    auto records = run_pipeline(documents, config, clients);

    nlohmann::ordered_json digest_src{{"candidates", candidates},
                                      {"clients", mock_set},
                                      {"refiner", refiner_kind},
                                      {"gate", wellformed_gate}};
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(digest_src.dump())));

    std::size_t accepted = 0;
    for (const auto& r : records) accepted += r.accepted.size();
    if (!records_out.empty()) write_records_jsonl(records_out, records, digest, seed);
    if (!pool_out.empty()) write_statement_pool(pool_out, records, digest, seed);
    std::cout << "herald processed " << records.size() << " statements, accepted " << accepted
              << " formal candidates\n";
    return 0;
}

int run_iterate_cmd(const ProverOptions& opt, const std::string& pool_path, int rounds,
                    const std::string& dataset_path, const std::string& ledger_path,
                    const std::string& policy_out, bool reattempt) {
    std::vector<PoolStatement> pool = load_statement_pool(pool_path);
    GeneratorPolicy policy = load_policy_or_uniform(opt.policy_path);
    EnvironmentFactory env_factory = make_environment_factory(opt);
    std::unique_ptr<Retriever> retriever = make_retriever(opt);

    IterationConfig config;
    config.rounds = rounds;
    config.prove.passes = opt.passes;
    config.prove.pass = make_pass_config(opt);
    config.retrieval_top_k = retriever ? opt.top_k : 0;
    config.reattempt_solved = reattempt;
    config.dataset_path = dataset_path;
    config.master_seed = opt.seed;
    config.config_digest = config_digest_of(opt);
    config.jobs = opt.jobs;

    auto round_records = run_iteration(pool, config, policy, env_factory, retriever.get(),
                                       pool_path, ledger_path);
    if (!policy_out.empty()) {
        std::ofstream out(policy_out);
        if (!out) throw std::runtime_error("cannot create " + policy_out);
        nlohmann::json doc = nlohmann::json::parse(save_policy_json(policy));
        doc["meta"] = {{"config_digest", config.config_digest}, {"seed", opt.seed}};
        out << doc.dump() << '\n';
    }
    std::size_t solved = round_records.empty() ? 0 : round_records.back().cumulative_solved;
    std::cout << "iterated " << round_records.size() << " rounds over " << pool.size()
              << " statements, solved " << solved << ", dataset " << dataset_path << '\n';
    return 0;
}

int run_eval_cmd(const ProverOptions& opt, const std::string& pool_path,
                 const std::string& report_md, const std::string& report_csv,
                 const std::string& trees_dir, double timeout_seconds) {
    std::vector<PoolStatement> pool = load_statement_pool(pool_path);
    GeneratorFactory gen_factory = make_generator_factory(opt);
    EnvironmentFactory env_factory = make_environment_factory(opt);
    std::unique_ptr<Retriever> retriever = make_retriever(opt);

    EvalConfig config;
    config.passes = opt.passes;
    config.pass = make_pass_config(opt);
    config.seed = opt.seed;
    config.per_statement_timeout_seconds = timeout_seconds;
    config.jobs = opt.jobs;
    config.config_digest = config_digest_of(opt);

    EvalReport report = evaluate(pool, config, gen_factory, env_factory, retriever.get());

    if (!report_md.empty()) write_report(report_md, render_markdown(report));
    if (!report_csv.empty()) write_report(report_csv, render_csv(report));
    if (!trees_dir.empty()) {
        fs::create_directories(trees_dir);
        for (const auto& row : report.rows)
            for (std::size_t p = 0; p < row.passes.size(); ++p)
                write_snapshot(trees_dir + "/" + row.id + "_pass" + std::to_string(p) + ".jsonl",
                               row.passes[p], config.config_digest, config.seed);
    }
    for (const auto& row : report.rows)
        std::cerr << row.id << (row.solved ? " solved " : " unsolved ") << row.passes_used
                  << " passes " << row.wall_seconds << " s\n";
    std::cout << "evaluated " << pool.size() << " statements: success rate "
              << format_rate(report.success_rate) << " at budget " << report.budget << '\n';
    return 0;
}

int run_extract_pairs_cmd(const ProverOptions& opt, const std::string& script_path,
                          const std::string& out_path, const std::string& statement_id,
                          const std::string& nl, int round, bool append) {
    std::string statement = opt.statement;
    if (statement.empty() && !opt.statement_file.empty())
        statement = first_line(read_file(opt.statement_file));
    if (statement.empty())
        throw std::runtime_error("extract-pairs needs --statement or --statement-file");

    std::vector<std::string> script;
    {
        std::ifstream in(script_path);
        if (!in) throw std::runtime_error("cannot open " + script_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            script.push_back(line);
        }
    }

    std::unique_ptr<Retriever> retriever = make_retriever(opt);
    EnvironmentFactory env_factory = make_environment_factory(opt);
    std::unique_ptr<Environment> env = env_factory();
    std::optional<std::string> nl_opt = nl.empty() ? std::nullopt : std::make_optional(nl);
    auto pairs = extract_pairs(script, statement, statement_id, nl_opt, *env, retriever.get(),
                               retriever ? opt.top_k : 0, round);
    std::string meta = "config=" + config_digest_of(opt) + " seed=" + std::to_string(opt.seed);
    if (append) {
        MergeStats stats = merge_dataset(out_path, pairs, false, meta);
        std::cout << "extracted " << pairs.size() << " pairs (" << stats.added << " new, "
                  << stats.duplicates << " duplicate) into " << out_path << '\n';
    } else {
        save_pairs_dataset(out_path, pairs, meta);
        std::cout << "extracted " << pairs.size() << " pairs into " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stepprove: retrieval-augmented stepwise theorem prover"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; flags override file values");

    // prove
    ProverOptions prove_opt;
    std::string prove_tree_out, prove_script_out;
    auto* prove_cmd = app.add_subcommand("prove", "search for a proof of one statement");
    prove_cmd->add_option("--statement,-s", prove_opt.statement, "statement in the toy grammar");
    prove_cmd->add_option("--statement-file", prove_opt.statement_file,
                          "file whose first line is the statement");
    add_prover_options(prove_cmd, prove_opt);
    prove_cmd->add_option("--tree-out", prove_tree_out, "search-tree snapshot JSONL path");
    prove_cmd->add_option("--script-out", prove_script_out, "proof script output path");

    // env serve
    auto* env_cmd = app.add_subcommand("env", "toy proof environment");
    env_cmd->require_subcommand(1);
    auto* serve_cmd = env_cmd->add_subcommand(
        "serve", "speak the wire protocol on stdin/stdout (one JSON object per line)");

    // index build / search
    auto* index_cmd = app.add_subcommand("index", "premise index maintenance");
    index_cmd->require_subcommand(1);
    std::string idx_corpus, idx_embedder, idx_out, idx_index, idx_query;
    int idx_k = 6;
    auto* index_build_cmd = index_cmd->add_subcommand("build", "embed a corpus into an index");
    index_build_cmd->add_option("--corpus", idx_corpus, "premise corpus JSONL")->required();
    index_build_cmd->add_option("--embedder", idx_embedder, "embedder checkpoint")->required();
    index_build_cmd->add_option("--out", idx_out, "index output path")->required();
    auto* index_search_cmd = index_cmd->add_subcommand("search", "query an index");
    index_search_cmd->add_option("--index", idx_index, "index path")->required();
    index_search_cmd->add_option("--embedder", idx_embedder, "embedder checkpoint")->required();
    index_search_cmd->add_option("--query", idx_query, "query text")->required();
    index_search_cmd->add_option("--k", idx_k, "results to return")->capture_default_str();
    index_search_cmd->add_option("--corpus", idx_corpus,
                                 "corpus JSONL for staleness verification");

    // retrain stage1 / mine / stage2
    auto* retrain_cmd = app.add_subcommand("retrain", "embedding retriever training");
    retrain_cmd->require_subcommand(1);
    TrainOptions t1, tm, t2;
    auto* stage1_cmd = retrain_cmd->add_subcommand("stage1", "contrastive training with in-batch negatives");
    stage1_cmd->add_option("--corpus", t1.corpus, "premise corpus JSONL")->required();
    stage1_cmd->add_option("--pairs", t1.pairs, "(state, pos_id) pairs JSONL")->required();
    stage1_cmd->add_option("--embedder-out", t1.embedder_out, "checkpoint output")->required();
    stage1_cmd->add_option("--embedder-in", t1.embedder_in, "warm-start checkpoint");
    stage1_cmd->add_option("--dim-hash", t1.dim_hash, "hashed token dimension")->capture_default_str();
    stage1_cmd->add_option("--dim-out", t1.dim_out, "embedding dimension")->capture_default_str();
    stage1_cmd->add_option("--batch", t1.batch, "minibatch size")->capture_default_str();
    stage1_cmd->add_option("--margin", t1.margin, "contrastive margin")->capture_default_str();
    stage1_cmd->add_option("--lr", t1.lr, "learning rate")->capture_default_str();
    stage1_cmd->add_option("--epochs", t1.epochs, "training epochs")->capture_default_str();
    stage1_cmd->add_option("--seed", t1.seed, "shuffle/init seed")->capture_default_str();

    auto* mine_cmd = retrain_cmd->add_subcommand("mine", "mine hard negatives from a rank window");
    mine_cmd->add_option("--corpus", tm.corpus, "premise corpus JSONL")->required();
    mine_cmd->add_option("--pairs", tm.pairs, "(state, pos_id) pairs JSONL")->required();
    mine_cmd->add_option("--embedder-in,--embedder", tm.embedder_in, "stage-1 checkpoint")->required();
    mine_cmd->add_option("--out", tm.mined_out, "triplet output JSONL")->required();
    mine_cmd->add_option("--lo", tm.window_lo, "window lower rank (1-based)")->capture_default_str();
    mine_cmd->add_option("--hi", tm.window_hi, "window upper rank")->capture_default_str();
    mine_cmd->add_option("--seed", tm.seed, "draw seed")->capture_default_str();

    auto* stage2_cmd = retrain_cmd->add_subcommand("stage2", "triplet training on mined negatives");
    stage2_cmd->add_option("--corpus", t2.corpus, "premise corpus JSONL")->required();
    stage2_cmd->add_option("--triplets", t2.triplets, "triplet JSONL from mine")->required();
    stage2_cmd->add_option("--embedder-in", t2.embedder_in, "stage-1 checkpoint")->required();
    stage2_cmd->add_option("--embedder-out", t2.embedder_out, "checkpoint output")->required();
    t2.margin = 0.2;
    t2.lr = 1e-3;
    t2.epochs = 10;
    stage2_cmd->add_option("--margin", t2.margin, "triplet margin")->capture_default_str();
    stage2_cmd->add_option("--lr", t2.lr, "learning rate")->capture_default_str();
    stage2_cmd->add_option("--epochs", t2.epochs, "training epochs")->capture_default_str();
    stage2_cmd->add_option("--seed", t2.seed, "seed")->capture_default_str();

    // herald run
    auto* herald_cmd = app.add_subcommand("herald", "autoformalization round-trip pipeline");
    herald_cmd->require_subcommand(1);
    std::vector<std::string> herald_docs;
    std::string herald_records, herald_pool, herald_clients = "identity",
                herald_refiner = "trimming", herald_url;
    int herald_candidates = 4;
    bool herald_gate = false;
    std::uint64_t herald_seed = 0;
    auto* herald_run_cmd = herald_cmd->add_subcommand("run", "extract, formalize, filter");
    herald_run_cmd->add_option("--doc", herald_docs, "input document (repeatable)")->required();
    herald_run_cmd->add_option("--records-out", herald_records, "audit records JSONL");
    herald_run_cmd->add_option("--pool-out", herald_pool, "accepted statement pool");
    herald_run_cmd->add_option("--candidates", herald_candidates, "formal candidates per statement")
        ->capture_default_str();
    herald_run_cmd
        ->add_option("--clients", herald_clients,
                     "client set: identity, corrupt-half, passthrough or remote")
        ->capture_default_str();
    herald_run_cmd->add_option("--refiner", herald_refiner, "refiner: none, identity or trimming")
        ->capture_default_str();
    herald_run_cmd->add_option("--url", herald_url, "endpoint for remote clients");
    herald_run_cmd->add_flag("--wellformed-gate", herald_gate,
                             "demote accepted statements the kernel cannot parse");
    herald_run_cmd->add_option("--seed", herald_seed, "seed recorded in artifacts")
        ->capture_default_str();
    HeraldPrompts herald_prompts;
    herald_run_cmd->add_option("--formalizer-prompt", herald_prompts.formalizer,
                               "remote formalizer template; {input} is substituted");
    herald_run_cmd->add_option("--informalizer-prompt", herald_prompts.informalizer,
                               "remote informalizer template");
    herald_run_cmd->add_option("--judge-prompt", herald_prompts.judge,
                               "remote judge template");

    // iterate
    ProverOptions iter_opt;
    iter_opt.passes = 1;
    std::string iter_pool, iter_dataset, iter_ledger, iter_policy_out;
    int iter_rounds = 3;
    bool iter_reattempt = false;
    auto* iterate_cmd = app.add_subcommand("iterate", "expert iteration over a statement pool");
    iterate_cmd->add_option("--pool", iter_pool, "statement pool file")->required();
    iterate_cmd->add_option("--rounds", iter_rounds, "iteration rounds")->capture_default_str();
    iterate_cmd->add_option("--dataset", iter_dataset, "cumulative pair dataset JSONL")->required();
    iterate_cmd->add_option("--ledger", iter_ledger, "per-round ledger JSONL");
    iterate_cmd->add_option("--policy-out", iter_policy_out, "final policy JSON");
    iterate_cmd->add_flag("--reattempt-solved", iter_reattempt,
                          "re-attempt already-solved statements each round");
    add_prover_options(iterate_cmd, iter_opt);

    // eval
    ProverOptions eval_opt;
    std::string eval_pool, eval_md, eval_csv, eval_trees;
    double eval_timeout = 120.0;
    auto* eval_cmd = app.add_subcommand("eval", "pass@K evaluation sweep");
    eval_cmd->add_option("--pool", eval_pool, "benchmark pool file")->required();
    eval_cmd->add_option("--report-md", eval_md, "markdown report path");
    eval_cmd->add_option("--report-csv", eval_csv, "CSV report path");
    eval_cmd->add_option("--trees-dir", eval_trees, "directory for tree snapshots");
    eval_cmd->add_option("--timeout", eval_timeout, "per-statement timeout in seconds")
        ->capture_default_str();
    add_prover_options(eval_cmd, eval_opt);

    // extract-pairs
    ProverOptions extract_opt;
    std::string extract_script, extract_out, extract_id = "s0", extract_nl;
    int extract_round = 0;
    bool extract_append = false;
    auto* extract_cmd =
        app.add_subcommand("extract-pairs", "replay a proof script into state-tactic pairs");
    extract_cmd->add_option("--statement,-s", extract_opt.statement, "statement text");
    extract_cmd->add_option("--statement-file", extract_opt.statement_file,
                            "file whose first line is the statement");
    extract_cmd->add_option("--script", extract_script, "proof script, one tactic per line")
        ->required();
    extract_cmd->add_option("--out", extract_out, "pair dataset output JSONL")->required();
    extract_cmd->add_option("--statement-id", extract_id, "statement id recorded in pairs")
        ->capture_default_str();
    extract_cmd->add_option("--nl", extract_nl, "natural-language description");
    extract_cmd->add_option("--round", extract_round, "round number recorded in pairs")
        ->capture_default_str();
    extract_cmd->add_flag("--append", extract_append, "merge into an existing dataset");
    add_prover_options(extract_cmd, extract_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (prove_cmd->parsed()) return run_prove_cmd(prove_opt, prove_tree_out, prove_script_out);
        if (serve_cmd->parsed()) return serve_kernel(std::cin, std::cout);
        if (index_build_cmd->parsed()) return run_index_build(idx_corpus, idx_embedder, idx_out);
        if (index_search_cmd->parsed())
            return run_index_search(idx_index, idx_embedder, idx_corpus, idx_query, idx_k);
        if (stage1_cmd->parsed()) return run_retrain_stage1(t1);
        if (mine_cmd->parsed()) return run_retrain_mine(tm);
        if (stage2_cmd->parsed()) return run_retrain_stage2(t2);
        if (herald_run_cmd->parsed())
            return run_herald(herald_docs, herald_records, herald_pool, herald_candidates,
                              herald_clients, herald_refiner, herald_gate, herald_url,
                              herald_seed, herald_prompts);
        if (iterate_cmd->parsed())
            return run_iterate_cmd(iter_opt, iter_pool, iter_rounds, iter_dataset, iter_ledger,
                                   iter_policy_out, iter_reattempt);
        if (eval_cmd->parsed())
            return run_eval_cmd(eval_opt, eval_pool, eval_md, eval_csv, eval_trees, eval_timeout);
        if (extract_cmd->parsed())
            return run_extract_pairs_cmd(extract_opt, extract_script, extract_out, extract_id,
                                         extract_nl, extract_round, extract_append);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
