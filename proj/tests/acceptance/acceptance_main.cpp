// Acceptance suite: one check per criterion, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
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

namespace fs = std::filesystem;
using namespace stepprove;

namespace {

const std::string kData = STEPPROVE_DATA_DIR;
const std::string kBin = STEPPROVE_BIN;

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void require(bool condition, const std::string& message) {
        if (!condition) {
            ok = false;
            detail << "    " << message << "\n";
        }
    }
};

std::unique_ptr<Environment> kernel_factory() { return std::make_unique<KernelEnvironment>(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------- criterion 1: scoring exactness ----------

void criterion_scoring(Check& c) {
    Rng rng(20250601);
    for (int i = 0; i < 1000; ++i) {
        double cumulative = -20.0 * rng.next_double();
        int length = 1 + static_cast<int>(rng.bounded(40));
        double alpha = rng.next_double();
        double got = score_node(cumulative, length, alpha);
        // independent route in extended precision
        long double reference = static_cast<long double>(cumulative) /
                                powl(static_cast<long double>(length),
                                     static_cast<long double>(alpha));
        long double denom = std::max<long double>(fabsl(reference), 1e-300L);
        c.require(fabsl(got - reference) / denom <= 1e-12,
                  "scoring mismatch at sample " + std::to_string(i));
        c.require(score_node(cumulative, length, 0.0) == cumulative,
                  "alpha=0 must reduce to the raw sum");
    }
}

// criterion 2 keeps its sweep counters for criterion 4
struct SweepStats {
    int provable = 0;
    int solved = 0;
    long max_generator_calls = 0;
    int max_candidates = 0;
    int max_children = 0;
    int budget_expansions = 200;
    int budget_samples = 64;
};
SweepStats sweep_stats;

void criterion_search_oracle(Check& c) {
    auto pool = load_statement_pool(kData + "/toy_theorems_50.txt");
    c.require(pool.size() == 50, "bundled corpus must hold 50 statements");
    for (const auto& statement : pool) {
        OracleResult oracle = oracle_provable(parse_formula(statement.statement), 8);
        ToyPolicyGenerator generator(GeneratorPolicy::uniform(),
                                     ToyPolicyGenerator::Mode::Exhaustive);
        KernelEnvironment env;
        PassConfig cfg;
        cfg.samples_per_step = sweep_stats.budget_samples;
        cfg.max_expansions = sweep_stats.budget_expansions;
        PassResult pass = run_pass(statement.statement, generator, env, nullptr, cfg);

        sweep_stats.provable += oracle.provable;
        sweep_stats.solved += pass.solved;
        sweep_stats.max_generator_calls =
            std::max<long>(sweep_stats.max_generator_calls, pass.counters.generator_calls);
        sweep_stats.max_candidates =
            std::max(sweep_stats.max_candidates, pass.counters.max_candidates_per_call);
        sweep_stats.max_children =
            std::max(sweep_stats.max_children, pass.counters.max_children_per_expansion);

        c.require(oracle.provable == pass.solved,
                  "oracle/search disagree on '" + statement.statement + "'");
        if (pass.solved) {
            // the solved script must replay to completion
            KernelEnvironment replay;
            EnvResult state = replay.init(statement.statement);
            for (const auto& tactic : pass.script) {
                state = replay.apply(state.state().id, tactic);
                c.require(state.ok(), "replay failed on '" + statement.statement + "'");
                if (!state.ok()) break;
            }
            if (state.ok())
                c.require(state.state().complete(),
                          "replayed script does not close '" + statement.statement + "'");
        }
    }
    c.require(sweep_stats.provable > 0 && sweep_stats.provable < 50,
              "corpus must mix provable and unprovable statements");
}

// ---------- criterion 3: determinism ----------

void run_eval_sweep(const std::string& dir) {
    auto pool = load_statement_pool(kData + "/pool_stochastic.txt");
    EvalConfig cfg;
    cfg.passes = 4;
    cfg.pass.samples_per_step = 4;
    cfg.pass.max_expansions = 30;
    cfg.seed = 5;
    cfg.config_digest = "acceptance";
    EvalReport report = evaluate(
        pool, cfg,
        [] {
            return std::make_unique<ToyPolicyGenerator>(GeneratorPolicy::uniform(),
                                                        ToyPolicyGenerator::Mode::Sample);
        },
        kernel_factory, nullptr);
    fs::create_directories(dir);
    write_report(dir + "/report.md", render_markdown(report));
    write_report(dir + "/report.csv", render_csv(report));
    for (const auto& row : report.rows)
        for (std::size_t p = 0; p < row.passes.size(); ++p)
            write_snapshot(dir + "/" + row.id + "_pass" + std::to_string(p) + ".jsonl",
                           row.passes[p], cfg.config_digest, cfg.seed);
}

void criterion_determinism(Check& c) {
    std::string dir_a = "/tmp/stepprove_acceptance_eval_a";
    std::string dir_b = "/tmp/stepprove_acceptance_eval_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    run_eval_sweep(dir_a);
    run_eval_sweep(dir_b);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir_a))
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    c.require(names.size() >= 3, "sweep must emit reports and snapshots");
    for (const auto& name : names) {
        c.require(fs::exists(dir_b + "/" + name), "second sweep missing " + name);
        if (!fs::exists(dir_b + "/" + name)) continue;
        c.require(read_file(dir_a + "/" + name) == read_file(dir_b + "/" + name),
                  name + " differs between identical sweeps");
    }
}

// ---------- criterion 4: budget accounting ----------

void criterion_budget(Check& c) {
    c.require(sweep_stats.max_generator_calls <= sweep_stats.budget_expansions,
              "generator calls exceeded E in the criterion-2 sweep");
    c.require(sweep_stats.max_candidates <= sweep_stats.budget_samples,
              "candidates per call exceeded N");
    c.require(sweep_stats.max_children <= sweep_stats.budget_samples,
              "children per expansion exceeded N");
    c.require(budget_string(64, 64) == "64 × 64", "budget string must render K × N");
}

// ---------- criterion 5: retrieval training ----------

void criterion_retrieval_training(Check& c) {
    SyntheticDataset data = make_planted_dataset(200, 42);
    ToyEmbedder embedder(EmbedderConfig{}, 42);

    Stage1Config s1;
    s1.seed = 42;
    TrainLog log1 = train_stage1(embedder, data.pairs, data.corpus, s1);
    c.require(!log1.epoch_loss.empty(), "stage-1 produced no loss log");
    if (!log1.epoch_loss.empty())
        c.require(log1.epoch_loss.back() <= 0.5 * log1.epoch_loss.front(),
                  "stage-1 loss fell by less than 50%");

    // gradient checks at 1e-5 relative on small instances, both losses
    {
        EmbedderConfig small;
        small.dim_hash = 48;
        small.dim_out = 6;
        ToyEmbedder probe(small, 3);
        std::vector<BatchPair> batch = {{"goal alpha beta", "lemma alpha gamma"},
                                        {"goal delta", "lemma delta epsilon"}};
        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(6, 48);
        stage1_batch_loss(probe, batch, 1.0, &grad);
        std::vector<TripletText> triplets = {{"goal alpha", "lemma alpha", "lemma beta"}};
        Eigen::MatrixXd grad2 = Eigen::MatrixXd::Zero(6, 48);
        stage2_loss(probe, triplets, 2.5, &grad2);

        auto check_grad = [&](const char* tag, const Eigen::MatrixXd& analytic,
                              const std::function<double(const ToyEmbedder&)>& loss) {
            ToyEmbedder work = probe;
            const double h = 1e-6;
            for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
                for (Eigen::Index col = 0; col < analytic.cols(); ++col) {
                    double saved = work.projection()(r, col);
                    work.projection()(r, col) = saved + h;
                    double up = loss(work);
                    work.projection()(r, col) = saved - h;
                    double down = loss(work);
                    work.projection()(r, col) = saved;
                    double numeric = (up - down) / (2 * h);
                    double denom = std::max({std::abs(numeric), std::abs(analytic(r, col)), 1e-4});
                    if (std::abs(numeric - analytic(r, col)) / denom > 1e-5) {
                        c.require(false, std::string(tag) + " gradient check failed at (" +
                                             std::to_string(r) + "," + std::to_string(col) + ")");
                        return;
                    }
                }
            }
        };
        check_grad("stage-1", grad,
                   [&](const ToyEmbedder& e) { return stage1_batch_loss(e, batch, 1.0, nullptr); });
        check_grad("stage-2", grad2,
                   [&](const ToyEmbedder& e) { return stage2_loss(e, triplets, 2.5, nullptr); });
    }

    // mined negatives live in the clipped window and never equal the positive
    auto triplets = mine_hard_negatives(embedder, data.pairs, data.corpus, 30, 100, 42);
    c.require(triplets.size() == data.pairs.size(), "mining must yield one triplet per pair");
    for (const auto& t : triplets) {
        if (t.neg_id == t.pos_id) {
            c.require(false, "mined negative equals its positive");
            break;
        }
        Eigen::VectorXd q = embedder.embed(t.state, TextRole::Query);
        std::vector<std::pair<double, int>> ranked;
        for (const auto& p : data.corpus)
            if (p.id != t.pos_id)
                ranked.emplace_back(-embedder.embed(p.formal_statement, TextRole::Passage).dot(q),
                                    p.id);
        std::sort(ranked.begin(), ranked.end());
        int rank = -1;
        for (std::size_t i = 0; i < ranked.size(); ++i)
            if (ranked[i].second == t.neg_id) rank = static_cast<int>(i) + 1;
        if (rank < 30 || rank > 100) {
            c.require(false, "mined negative rank " + std::to_string(rank) + " outside [30,100]");
            break;
        }
    }

    Stage2Config s2;
    s2.seed = 42;
    TrainLog log2 = train_stage2(embedder, triplets, data.corpus, s2);
    c.require(!log2.epoch_loss.empty() && log2.epoch_loss.back() <= log2.epoch_loss.front(),
              "stage-2 loss increased");

    // recall@10 of the positive after both stages
    PremiseIndex index = PremiseIndex::build(embedder, data.corpus);
    int hits = 0;
    for (const auto& pair : data.pairs) {
        auto results = index.top_k(embedder.embed(pair.state, TextRole::Query), 10);
        for (const auto& r : results)
            if (r.premise.id == pair.pos_id) {
                ++hits;
                break;
            }
    }
    double recall = static_cast<double>(hits) / static_cast<double>(data.pairs.size());
    c.require(recall >= 0.90, "recall@10 is " + std::to_string(recall) + ", below 0.90");
}

// ---------- criterion 6: rank-metric equivalence ----------

void criterion_rank_equivalence(Check& c) {
    Rng rng(606);
    for (int corpus = 0; corpus < 100; ++corpus) {
        int dim = 3 + static_cast<int>(rng.bounded(13));
        int count = 4 + static_cast<int>(rng.bounded(30));
        std::vector<Eigen::VectorXd> passages;
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd v(dim);
            for (int d = 0; d < dim; ++d) v[d] = rng.next_normal();
            passages.push_back(v.normalized());
        }
        Eigen::VectorXd q(dim);
        for (int d = 0; d < dim; ++d) q[d] = rng.next_normal();
        q.normalize();

        std::vector<int> by_cosine(count), by_euclidean(count);
        std::iota(by_cosine.begin(), by_cosine.end(), 0);
        by_euclidean = by_cosine;
        std::sort(by_cosine.begin(), by_cosine.end(), [&](int a, int b) {
            double sa = passages[a].dot(q), sb = passages[b].dot(q);
            if (sa != sb) return sa > sb;
            return a < b;
        });
        std::sort(by_euclidean.begin(), by_euclidean.end(), [&](int a, int b) {
            double da = (passages[a] - q).norm(), db = (passages[b] - q).norm();
            if (da != db) return da < db;
            return a < b;
        });
        int k = std::min(10, count);
        for (int i = 0; i < k; ++i)
            if (by_cosine[i] != by_euclidean[i]) {
                c.require(false, "orderings diverge on corpus " + std::to_string(corpus));
                return;
            }
    }
}

// ---------- criterion 7: herald filter exactness ----------

void criterion_herald_filter(Check& c) {
    auto refiner = make_trimming_refiner();
    auto formalizer = make_distinct_formalizer();
    auto informalizer = make_corrupt_half_informalizer();
    auto judge = make_exact_match_judge();
    HeraldConfig config;
    config.n_candidates = 4;
    HeraldClients clients{refiner.get(), formalizer.get(), informalizer.get(), judge.get(),
                          nullptr};
    auto records = run_pipeline({read_file(kData + "/herald_corpus.txt")}, config, clients);
    c.require(records.size() == 6, "herald corpus must yield 6 statements");

    // planted truth: even candidate slots are uncorrupted
    int true_positives = 0, false_positives = 0, false_negatives = 0;
    for (const auto& record : records) {
        std::set<std::string> accepted(record.accepted.begin(), record.accepted.end());
        for (std::size_t slot = 0; slot < record.candidates.size(); ++slot) {
            bool planted_good = slot % 2 == 0;
            bool was_accepted = accepted.count(record.candidates[slot].formal) > 0;
            if (was_accepted && planted_good) ++true_positives;
            if (was_accepted && !planted_good) ++false_positives;
            if (!was_accepted && planted_good) ++false_negatives;
        }
        for (const auto& a : record.accepted) {
            bool consistent = false;
            for (const auto& cand : record.candidates)
                if (cand.formal == a && cand.verdict == Verdict::Consistent) consistent = true;
            c.require(consistent, "accepted candidate lacks a consistent verdict");
        }
    }
    c.require(false_positives == 0, "precision below 1.0");
    c.require(false_negatives == 0, "recall below 1.0");
    c.require(true_positives == 12, "expected exactly half of 24 candidates accepted");
}

// ---------- criterion 8: expert iteration ----------

void criterion_expert_iteration(Check& c) {
    std::string dataset = "/tmp/stepprove_acceptance_iteration.jsonl";
    std::remove(dataset.c_str());
    auto pool = load_statement_pool(kData + "/iteration_demo_pool.txt");

    IterationConfig config;
    config.rounds = 3;
    config.prove.passes = 1;
    config.prove.pass.samples_per_step = 16;
    config.prove.pass.max_expansions = 8;
    config.dataset_path = dataset;
    config.master_seed = 7;

    GeneratorPolicy policy = GeneratorPolicy::uniform();
    auto rounds = run_iteration(pool, config, policy, kernel_factory, nullptr);
    c.require(rounds.size() == 3, "expected 3 rounds");
    if (rounds.size() == 3) {
        c.require(rounds[0].cumulative_solved <= rounds[1].cumulative_solved &&
                      rounds[1].cumulative_solved <= rounds[2].cumulative_solved,
                  "cumulative solved count decreased");
        c.require(rounds[1].cumulative_solved > rounds[0].cumulative_solved,
                  "round 2 did not solve strictly more than round 1");
    }

    // 100% replay validity of every harvested pair
    auto pairs = load_pairs_dataset(dataset);
    c.require(!pairs.empty(), "iteration harvested no pairs");
    for (const auto& pair : pairs) {
        const PoolStatement* statement = nullptr;
        for (const auto& s : pool)
            if (s.id == pair.statement_id) statement = &s;
        if (!statement) {
            c.require(false, "pair references unknown statement " + pair.statement_id);
            break;
        }
        KernelEnvironment env;
        EnvResult state = env.init(statement->statement);
        bool replayed = state.ok();
        for (const auto& tactic : pair.prefix) {
            if (!replayed) break;
            state = env.apply(state.state().id, tactic);
            replayed = state.ok();
        }
        if (replayed) replayed = render_env_state(state.state()) == pair.state;
        if (replayed) replayed = env.apply(state.state().id, pair.tactic).ok();
        if (!replayed) {
            c.require(false, "pair failed to replay for " + pair.statement_id);
            break;
        }
    }
    std::remove(dataset.c_str());
}

// ---------- criterion 9: protocol conformance ----------

void criterion_protocol(Check& c) {
    // scripted transcript: expected responses computed against a local
    // session with the same serializer, compared byte-for-byte
    std::vector<std::pair<std::string, std::string>> transcript;
    {
        KernelSession expected_session;
        bool shutdown = false;
        auto script = [&](const std::string& request) {
            transcript.emplace_back(request,
                                    handle_wire_request(expected_session, request, shutdown));
        };

        const char* statements[] = {"A -> A", "A /\\ B -> B /\\ A", "A \\/ B -> B \\/ A",
                                    "A -> B -> A /\\ B", "⊥ -> C"};
        const char* scripts[][6] = {
            {"intro h", "exact h", nullptr},
            {"intro h", "destruct h", "split", "exact h_2", "exact h_1", nullptr},
            {"intro h", "cases h", "right", "exact h", nullptr},
            {"intro h", "intro h1", "split", "exact h", "exact h1", nullptr},
            {"intro h", "absurd h", nullptr},
        };

        int round = 0;
        while (transcript.size() < 199) {
            int which = round % 5;
            std::string root_id = "s" + std::to_string(expected_session.size());
            script(wire_init_request(statements[which]));
            std::string state_id = root_id;
            for (int step = 0; scripts[which][step] != nullptr && transcript.size() < 199;
                 ++step) {
                std::string next_id = "s" + std::to_string(expected_session.size());
                script(wire_apply_request(state_id, scripts[which][step]));
                state_id = next_id;
            }
            if (transcript.size() < 199) {
                // error paths: unknown state, bad tactic, inapplicable,
                // malformed statement, malformed JSON, unknown command
                switch (round % 6) {
                    case 0: script(wire_apply_request("s9999", "intro h")); break;
                    case 1: script(wire_apply_request(root_id, "frobnicate x")); break;
                    case 2: script(wire_apply_request(root_id, "split")); break;
                    case 3: script(wire_init_request("A -> -> B")); break;
                    case 4: script("this line is not JSON"); break;
                    case 5: script(R"({"cmd":"warp"})"); break;
                }
            }
            ++round;
        }
        script(wire_shutdown_request());
    }
    c.require(transcript.size() == 200, "transcript must hold exactly 200 messages, has " +
                                            std::to_string(transcript.size()));

    ProcessEnvironment child({kBin, "env", "serve"});
    for (std::size_t i = 0; i + 1 < transcript.size(); ++i) {  // shutdown goes via dtor
        std::string actual = child.roundtrip(transcript[i].first);
        if (actual != transcript[i].second) {
            c.require(false, "message " + std::to_string(i) + " mismatch:\n      sent     " +
                                 transcript[i].first + "\n      expected " +
                                 transcript[i].second + "\n      got      " + actual);
            return;
        }
    }
    // the final scripted message is the shutdown acknowledgement
    std::string ack = child.roundtrip(transcript.back().first);
    c.require(ack == transcript.back().second, "shutdown acknowledgement mismatch");
}

// ---------- criterion 10: pass@K monotonicity ----------

void criterion_pass_at_k(Check& c) {
    auto pool = load_statement_pool(kData + "/pool_stochastic.txt");
    auto sampling_factory = [] {
        return std::make_unique<ToyPolicyGenerator>(GeneratorPolicy::uniform(),
                                                    ToyPolicyGenerator::Mode::Sample);
    };
    EvalConfig cfg1;
    cfg1.passes = 1;
    cfg1.pass.samples_per_step = 2;
    cfg1.pass.max_expansions = 6;
    cfg1.seed = 11;
    EvalConfig cfg4 = cfg1;
    cfg4.passes = 4;

    EvalReport at1 = evaluate(pool, cfg1, sampling_factory, kernel_factory, nullptr);
    EvalReport at4 = evaluate(pool, cfg4, sampling_factory, kernel_factory, nullptr);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (at1.rows[i].solved && !at4.rows[i].solved) {
            c.require(false, "nested-seed violation on " + pool[i].id);
            return;
        }
    c.require(at4.success_rate >= at1.success_rate, "pass@4 rate below pass@1 rate");
    c.require(at4.success_rate > at1.success_rate,
              "fixture should show strict improvement at K=4 (got equal rates)");
}

struct Criterion {
    int number;
    std::string title;
    std::function<void(Check&)> run;
    double time_limit_seconds;  // 0 = no limit
};

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "scoring exactness (1000 random triples, 1e-12 relative)", criterion_scoring, 1.0},
        {2, "search/oracle equivalence on the 50-theorem corpus (E=200 vs depth 8)",
         criterion_search_oracle, 60.0},
        {3, "determinism: identical eval sweeps give byte-identical files",
         criterion_determinism, 0.0},
        {4, "budget accounting: calls <= E, candidates <= N, budget renders K x N",
         criterion_budget, 0.0},
        {5, "retrieval training on the planted dataset (loss halved, gradcheck, recall@10)",
         criterion_retrieval_training, 300.0},
        {6, "rank equivalence of cosine and negative-euclidean orderings (100 corpora)",
         criterion_rank_equivalence, 0.0},
        {7, "herald filter exactness on the corrupted-corpus fixture",
         criterion_herald_filter, 0.0},
        {8, "expert iteration demo: monotone coverage, strict round-2 gain, replay validity",
         criterion_expert_iteration, 0.0},
        {9, "protocol conformance: 200-message transcript against env serve, byte-exact",
         criterion_protocol, 0.0},
        {10, "pass@K monotonicity under nested seeds", criterion_pass_at_k, 0.0},
    };

    int failures = 0;
    for (auto& criterion : criteria) {
        Check check;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.time_limit_seconds > 0 && elapsed > criterion.time_limit_seconds)
            check.require(false, "exceeded the " + std::to_string(criterion.time_limit_seconds) +
                                     " s budget");

        std::printf("[%s] criterion %2d: %s (%.2f s)\n", check.ok ? "PASS" : "FAIL",
                    criterion.number, criterion.title.c_str(), elapsed);
        if (!check.ok) {
            std::fputs(check.detail.str().c_str(), stdout);
            ++failures;
        }
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
