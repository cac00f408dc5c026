#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace stepprove {

// A retrievable theorem record. Ids are dense and unique within a corpus.
struct Premise {
    int id = 0;
    std::string formal_name;
    std::string informal_name;
    std::string formal_statement;
};

std::vector<Premise> load_premises_jsonl(const std::string& path);
void save_premises_jsonl(const std::string& path, const std::vector<Premise>& premises);
std::uint64_t file_digest(const std::string& path);

// lowercase, split on non-alphanumerics
std::vector<std::string> tokenize(std::string_view text);

enum class TextRole { Query, Passage };

struct EmbedderConfig {
    int dim_hash = 1024;  // hashed token-count dimension
    int dim_out = 64;     // embedding dimension
    int max_query_tokens = 128;
    int max_passage_tokens = 256;
};

// Deterministic hashing embedder: a projection of hashed token counts,
// L2-normalized. The role prefix token keeps query and passage spaces apart.
class ToyEmbedder {
public:
    ToyEmbedder(const EmbedderConfig& cfg, std::uint64_t seed);

    const EmbedderConfig& config() const { return cfg_; }

    // hashed token counts including the role token; throws on zero tokens
    Eigen::VectorXd hash_counts(std::string_view text, TextRole role) const;
    // normalized projection of hash_counts
    Eigen::VectorXd embed(std::string_view text, TextRole role) const;

    Eigen::MatrixXd& projection() { return projection_; }              // dim_out x dim_hash
    const Eigen::MatrixXd& projection() const { return projection_; }

    // traceability fields are embedded when non-empty
    void save(const std::string& path, const std::string& config_digest = "",
              std::uint64_t seed = 0) const;
    static ToyEmbedder load(const std::string& path);

private:
    EmbedderConfig cfg_;
    Eigen::MatrixXd projection_;
};

// L(d, y) = y d^2 + (1-y) max(m - d, 0)^2
double contrastive_loss(double distance, int label, double margin);
// L(dp, dn) = max(dp - dn + m, 0)
double triplet_loss(double d_pos, double d_neg, double margin);

struct TrainPair {
    std::string state;
    int pos_id = 0;
};
struct TrainTriplet {
    std::string state;
    int pos_id = 0;
    int neg_id = 0;
};

std::vector<TrainPair> load_pairs_jsonl(const std::string& path);
void save_pairs_jsonl(const std::string& path, const std::vector<TrainPair>& pairs,
                      const std::string& meta_comment = "");
std::vector<TrainTriplet> load_triplets_jsonl(const std::string& path);
void save_triplets_jsonl(const std::string& path, const std::vector<TrainTriplet>& triplets,
                         const std::string& meta_comment = "");

struct Stage1Config {
    int batch_size = 32;
    double margin = 1.0;
    double learning_rate = 2e-3;
    int epochs = 20;
    std::uint64_t seed = 42;
};

struct Stage2Config {
    double margin = 0.2;
    double learning_rate = 1e-3;
    int epochs = 10;
    std::uint64_t seed = 42;
};

struct TrainLog {
    std::vector<double> epoch_loss;  // mean per-pair (stage 1) / per-triplet (stage 2)
};

// In-batch text pair (query text, passage text).
using BatchPair = std::pair<std::string, std::string>;

// Batch objective for stage 1: matched-pair terms plus all in-batch negative
// cross terms. `grad` (dim_out x dim_hash) is accumulated when non-null.
double stage1_batch_loss(const ToyEmbedder& embedder, const std::vector<BatchPair>& batch,
                         double margin, Eigen::MatrixXd* grad);

struct TripletText {
    std::string state, positive, negative;
};
double stage2_loss(const ToyEmbedder& embedder, const std::vector<TripletText>& triplets,
                   double margin, Eigen::MatrixXd* grad);

// Minibatch gradient descent with in-batch negatives. Requires >= 2 pairs;
// batches that shrink below 2 are dropped. Throws on non-finite loss.
TrainLog train_stage1(ToyEmbedder& embedder, const std::vector<TrainPair>& pairs,
                      const std::vector<Premise>& corpus, const Stage1Config& cfg);

// Full-batch gradient descent on the triplet objective. Requires >= 1 triplet.
TrainLog train_stage2(ToyEmbedder& embedder, const std::vector<TrainTriplet>& triplets,
                      const std::vector<Premise>& corpus, const Stage2Config& cfg);

// For each pair, ranks all non-positive passages by similarity (ties by id)
// and draws one uniformly from ranks [lo, hi], clipped to the corpus size.
// Ranks are 1-based. Default window per configuration is [30, 100].
std::vector<TrainTriplet> mine_hard_negatives(const ToyEmbedder& embedder,
                                              const std::vector<TrainPair>& pairs,
                                              const std::vector<Premise>& corpus, int window_lo,
                                              int window_hi, std::uint64_t seed);

struct ScoredPremise {
    Premise premise;
    double similarity;
};

// Immutable exact-search index of normalized passage embeddings.
class PremiseIndex {
public:
    static PremiseIndex build(const ToyEmbedder& embedder, std::vector<Premise> premises);

    // exact top-min(k, size) by cosine similarity, descending; ties by id
    std::vector<ScoredPremise> top_k(const Eigen::VectorXd& query, int k) const;

    std::size_t size() const { return premises_.size(); }
    const Eigen::MatrixXd& vectors() const { return vectors_; }  // one row per premise
    const std::vector<Premise>& premises() const { return premises_; }
    std::uint64_t corpus_digest() const { return corpus_digest_; }

    void save(const std::string& path, std::uint64_t corpus_digest,
              const std::string& config_digest = "", std::uint64_t seed = 0) const;
    static PremiseIndex load(const std::string& path);

private:
    PremiseIndex() = default;
    std::vector<Premise> premises_;
    Eigen::MatrixXd vectors_;
    std::uint64_t corpus_digest_ = 0;
};

// Embedder plus index, as seen by the search engine.
class Retriever {
public:
    Retriever(ToyEmbedder embedder, PremiseIndex index)
        : embedder_(std::move(embedder)), index_(std::move(index)) {}

    std::vector<ScoredPremise> search(const std::string& text, int k) const;
    std::vector<Premise> premises_for_state(const std::string& state_rendering, int k) const;

    const ToyEmbedder& embedder() const { return embedder_; }
    const PremiseIndex& index() const { return index_; }

private:
    ToyEmbedder embedder_;
    PremiseIndex index_;
};

// Synthetic corpus where each state shares one unique token with its
// positive premise; the trainer must learn to rank that premise first.
struct SyntheticDataset {
    std::vector<Premise> corpus;
    std::vector<TrainPair> pairs;
};
SyntheticDataset make_planted_dataset(int n_pairs, std::uint64_t seed);

}  // namespace stepprove
