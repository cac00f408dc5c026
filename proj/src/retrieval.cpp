#include "stepprove/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "stepprove/rng.hpp"

namespace stepprove {

using json = nlohmann::json;

// ---------- corpus and dataset files ----------

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    return out;
}

}  // namespace

std::vector<Premise> load_premises_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Premise> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed JSONL");
        Premise p;
        p.id = j.at("id").get<int>();
        p.formal_name = j.at("formal_name").get<std::string>();
        p.informal_name = j.at("informal_name").get<std::string>();
        p.formal_statement = j.at("formal_statement").get<std::string>();
        if (p.formal_statement.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": empty formal_statement");
        out.push_back(std::move(p));
    }
    return out;
}

void save_premises_jsonl(const std::string& path, const std::vector<Premise>& premises) {
    std::ofstream out = create_or_throw(path);
    for (const auto& p : premises) {
        out << json{{"id", p.id},
                    {"formal_name", p.formal_name},
                    {"informal_name", p.informal_name},
                    {"formal_statement", p.formal_statement}}
                   .dump()
            << '\n';
    }
}

std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t h = kFnvOffset;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return h;
}

std::vector<TrainPair> load_pairs_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<TrainPair> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        json j = json::parse(line);
        out.push_back(TrainPair{j.at("state").get<std::string>(), j.at("pos_id").get<int>()});
    }
    return out;
}

void save_pairs_jsonl(const std::string& path, const std::vector<TrainPair>& pairs,
                      const std::string& meta_comment) {
    std::ofstream out = create_or_throw(path);
    if (!meta_comment.empty()) out << "# " << meta_comment << '\n';
    for (const auto& p : pairs)
        out << json{{"state", p.state}, {"pos_id", p.pos_id}}.dump() << '\n';
}

std::vector<TrainTriplet> load_triplets_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<TrainTriplet> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        json j = json::parse(line);
        out.push_back(TrainTriplet{j.at("state").get<std::string>(), j.at("pos_id").get<int>(),
                                   j.at("neg_id").get<int>()});
    }
    return out;
}

void save_triplets_jsonl(const std::string& path, const std::vector<TrainTriplet>& triplets,
                         const std::string& meta_comment) {
    std::ofstream out = create_or_throw(path);
    if (!meta_comment.empty()) out << "# " << meta_comment << '\n';
    for (const auto& t : triplets)
        out << json{{"state", t.state}, {"pos_id", t.pos_id}, {"neg_id", t.neg_id}}.dump() << '\n';
}

// ---------- tokenization and embedding ----------

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

ToyEmbedder::ToyEmbedder(const EmbedderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    if (cfg.dim_hash < 1 || cfg.dim_out < 1) throw std::invalid_argument("bad embedder dims");
    projection_.resize(cfg.dim_out, cfg.dim_hash);
    Rng rng(seed);
    double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim_hash));
    for (int r = 0; r < cfg.dim_out; ++r)
        for (int c = 0; c < cfg.dim_hash; ++c) projection_(r, c) = rng.next_normal() * scale;
}

Eigen::VectorXd ToyEmbedder::hash_counts(std::string_view text, TextRole role) const {
    std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) throw std::invalid_argument("zero-token input to embedder");
    int limit = role == TextRole::Query ? cfg_.max_query_tokens : cfg_.max_passage_tokens;
    if (static_cast<int>(tokens.size()) > limit) tokens.resize(static_cast<std::size_t>(limit));

    // the role prefix participates in every token's hash, so the query and
    // passage count spaces never alias each other
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(cfg_.dim_hash);
    const std::string prefix = role == TextRole::Query ? "query:" : "passage:";
    for (const auto& tok : tokens)
        counts[static_cast<Eigen::Index>(hash64(prefix + tok) % cfg_.dim_hash)] += 1.0;
    return counts;
}

Eigen::VectorXd ToyEmbedder::embed(std::string_view text, TextRole role) const {
    Eigen::VectorXd v = projection_ * hash_counts(text, role);
    double norm = v.norm();
    if (norm < 1e-12) throw std::runtime_error("embedding collapsed to zero");
    return v / norm;
}

void ToyEmbedder::save(const std::string& path, const std::string& config_digest,
                       std::uint64_t seed) const {
    json matrix = json::array();
    for (Eigen::Index r = 0; r < projection_.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < projection_.cols(); ++c) row.push_back(projection_(r, c));
        matrix.push_back(std::move(row));
    }
    json doc{{"version", 1},
             {"dim_hash", cfg_.dim_hash},
             {"dim_out", cfg_.dim_out},
             {"max_query_tokens", cfg_.max_query_tokens},
             {"max_passage_tokens", cfg_.max_passage_tokens},
             {"matrix", std::move(matrix)}};
    if (!config_digest.empty()) doc["meta"] = json{{"config_digest", config_digest}, {"seed", seed}};
    create_or_throw(path) << doc.dump() << '\n';
}

ToyEmbedder ToyEmbedder::load(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    json doc = json::parse(in);
    if (doc.value("version", 0) != 1) throw std::runtime_error("unsupported embedder version");
    EmbedderConfig cfg;
    cfg.dim_hash = doc.at("dim_hash").get<int>();
    cfg.dim_out = doc.at("dim_out").get<int>();
    cfg.max_query_tokens = doc.at("max_query_tokens").get<int>();
    cfg.max_passage_tokens = doc.at("max_passage_tokens").get<int>();
    ToyEmbedder embedder(cfg, 0);
    const json& matrix = doc.at("matrix");
    if (static_cast<int>(matrix.size()) != cfg.dim_out)
        throw std::runtime_error("embedder matrix row count mismatch");
    for (int r = 0; r < cfg.dim_out; ++r)
        for (int c = 0; c < cfg.dim_hash; ++c)
            embedder.projection_(r, c) = matrix[r][c].get<double>();
    return embedder;
}

// ---------- losses ----------

double contrastive_loss(double distance, int label, double margin) {
    if (distance < 0) throw std::invalid_argument("distance must be >= 0");
    if (label != 0 && label != 1) throw std::invalid_argument("label must be 0 or 1");
    if (margin <= 0) throw std::invalid_argument("margin must be > 0");
    if (label == 1) return distance * distance;
    double slack = margin - distance;
    return slack > 0 ? slack * slack : 0.0;
}

double triplet_loss(double d_pos, double d_neg, double margin) {
    if (d_pos < 0 || d_neg < 0) throw std::invalid_argument("distances must be >= 0");
    if (margin < 0) throw std::invalid_argument("margin must be >= 0");
    double v = d_pos - d_neg + margin;
    return v > 0 ? v : 0.0;
}

// ---------- gradients ----------

namespace {

// embedding with cached pieces needed for backprop through normalization
struct Embedded {
    Eigen::VectorXd counts;  // H
    Eigen::VectorXd unit;    // D, normalized
    double norm = 0.0;
};

Embedded embed_cached(const ToyEmbedder& e, const std::string& text, TextRole role) {
    Embedded out;
    out.counts = e.hash_counts(text, role);
    Eigen::VectorXd v = e.projection() * out.counts;
    out.norm = v.norm();
    if (out.norm < 1e-12) throw std::runtime_error("embedding collapsed to zero");
    out.unit = v / out.norm;
    return out;
}

// Chain rule through v -> v/|v|, then the outer product with the counts
// vector gives the projection-matrix gradient.
void backprop_to_projection(const Embedded& item, const Eigen::VectorXd& grad_unit,
                            Eigen::MatrixXd& grad) {
    Eigen::VectorXd grad_pre = (grad_unit - item.unit * item.unit.dot(grad_unit)) / item.norm;
    grad.noalias() += grad_pre * item.counts.transpose();
}

constexpr double kDistanceFloor = 1e-12;

}  // namespace

double stage1_batch_loss(const ToyEmbedder& embedder, const std::vector<BatchPair>& batch,
                         double margin, Eigen::MatrixXd* grad) {
    const std::size_t n = batch.size();
    if (n < 2) throw std::invalid_argument("stage-1 batch needs >= 2 pairs for in-batch negatives");

    std::vector<Embedded> queries, passages;
    queries.reserve(n);
    passages.reserve(n);
    for (const auto& [q, p] : batch) {
        queries.push_back(embed_cached(embedder, q, TextRole::Query));
        passages.push_back(embed_cached(embedder, p, TextRole::Passage));
    }

    std::vector<Eigen::VectorXd> grad_q(n), grad_p(n);
    if (grad)
        for (std::size_t i = 0; i < n; ++i) {
            grad_q[i] = Eigen::VectorXd::Zero(embedder.config().dim_out);
            grad_p[i] = Eigen::VectorXd::Zero(embedder.config().dim_out);
        }

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Eigen::VectorXd diff = queries[i].unit - passages[j].unit;
            double d = diff.norm();
            if (i == j) {
                loss += d * d;
                if (grad) {
                    grad_q[i] += 2.0 * diff;
                    grad_p[j] -= 2.0 * diff;
                }
            } else {
                double slack = margin - d;
                if (slack > 0) {
                    loss += slack * slack;
                    if (grad && d > kDistanceFloor) {
                        double coeff = -2.0 * slack / d;
                        grad_q[i] += coeff * diff;
                        grad_p[j] -= coeff * diff;
                    }
                }
            }
        }
    }

    if (grad) {
        for (std::size_t i = 0; i < n; ++i) {
            backprop_to_projection(queries[i], grad_q[i], *grad);
            backprop_to_projection(passages[i], grad_p[i], *grad);
        }
    }
    return loss;
}

double stage2_loss(const ToyEmbedder& embedder, const std::vector<TripletText>& triplets,
                   double margin, Eigen::MatrixXd* grad) {
    if (triplets.empty()) throw std::invalid_argument("stage-2 needs >= 1 triplet");
    double loss = 0.0;
    for (const auto& t : triplets) {
        Embedded x = embed_cached(embedder, t.state, TextRole::Query);
        Embedded p = embed_cached(embedder, t.positive, TextRole::Passage);
        Embedded neg = embed_cached(embedder, t.negative, TextRole::Passage);
        Eigen::VectorXd diff_p = x.unit - p.unit;
        Eigen::VectorXd diff_n = x.unit - neg.unit;
        double dp = diff_p.norm(), dn = diff_n.norm();
        double v = dp - dn + margin;
        if (v <= 0) continue;
        loss += v;
        if (!grad) continue;
        Eigen::VectorXd grad_x = Eigen::VectorXd::Zero(embedder.config().dim_out);
        if (dp > kDistanceFloor) {
            grad_x += diff_p / dp;
            backprop_to_projection(p, -diff_p / dp, *grad);
        }
        if (dn > kDistanceFloor) {
            grad_x -= diff_n / dn;
            backprop_to_projection(neg, diff_n / dn, *grad);
        }
        backprop_to_projection(x, grad_x, *grad);
    }
    return loss;
}

// ---------- training ----------

namespace {

std::unordered_map<int, const Premise*> premise_by_id(const std::vector<Premise>& corpus) {
    std::unordered_map<int, const Premise*> map;
    for (const auto& p : corpus) {
        if (!map.emplace(p.id, &p).second)
            throw std::invalid_argument("duplicate premise id " + std::to_string(p.id));
    }
    return map;
}

const Premise& lookup(const std::unordered_map<int, const Premise*>& map, int id) {
    auto it = map.find(id);
    if (it == map.end())
        throw std::invalid_argument("pair references unknown premise id " + std::to_string(id));
    return *it->second;
}

}  // namespace

TrainLog train_stage1(ToyEmbedder& embedder, const std::vector<TrainPair>& pairs,
                      const std::vector<Premise>& corpus, const Stage1Config& cfg) {
    if (pairs.size() < 2)
        throw std::invalid_argument("stage-1 training needs >= 2 pairs (in-batch negatives)");
    if (cfg.batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
    auto by_id = premise_by_id(corpus);

    TrainLog log;
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t pairs_seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            if (end - start < 2) break;  // a singleton batch has no in-batch negatives
            std::vector<BatchPair> batch;
            batch.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const TrainPair& pair = pairs[order[k]];
                batch.emplace_back(pair.state, lookup(by_id, pair.pos_id).formal_statement);
            }
            Eigen::MatrixXd grad =
                Eigen::MatrixXd::Zero(embedder.config().dim_out, embedder.config().dim_hash);
            double loss = stage1_batch_loss(embedder, batch, cfg.margin, &grad);
            if (!std::isfinite(loss))
                throw std::runtime_error("stage-1 loss diverged at epoch " + std::to_string(epoch));
            embedder.projection() -= cfg.learning_rate * grad;
            epoch_loss += loss;
            pairs_seen += batch.size();
        }
        log.epoch_loss.push_back(pairs_seen ? epoch_loss / static_cast<double>(pairs_seen) : 0.0);
    }
    return log;
}

TrainLog train_stage2(ToyEmbedder& embedder, const std::vector<TrainTriplet>& triplets,
                      const std::vector<Premise>& corpus, const Stage2Config& cfg) {
    if (triplets.empty()) throw std::invalid_argument("stage-2 training needs >= 1 triplet");
    auto by_id = premise_by_id(corpus);

    std::vector<TripletText> texts;
    texts.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (t.neg_id == t.pos_id) throw std::invalid_argument("triplet negative equals its positive");
        texts.push_back(TripletText{t.state, lookup(by_id, t.pos_id).formal_statement,
                                    lookup(by_id, t.neg_id).formal_statement});
    }

    TrainLog log;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Eigen::MatrixXd grad =
            Eigen::MatrixXd::Zero(embedder.config().dim_out, embedder.config().dim_hash);
        double loss = stage2_loss(embedder, texts, cfg.margin, &grad);
        if (!std::isfinite(loss))
            throw std::runtime_error("stage-2 loss diverged at epoch " + std::to_string(epoch));
        embedder.projection() -= cfg.learning_rate * grad;
        log.epoch_loss.push_back(loss / static_cast<double>(texts.size()));
    }
    return log;
}

// ---------- hard negative mining ----------

std::vector<TrainTriplet> mine_hard_negatives(const ToyEmbedder& embedder,
                                              const std::vector<TrainPair>& pairs,
                                              const std::vector<Premise>& corpus, int window_lo,
                                              int window_hi, std::uint64_t seed) {
    if (corpus.size() < 2) throw std::invalid_argument("mining needs a corpus of >= 2 passages");
    if (window_lo < 1 || window_lo > window_hi)
        throw std::invalid_argument("mining window must satisfy 1 <= lo <= hi");
    premise_by_id(corpus);  // validates id uniqueness

    Eigen::MatrixXd passage_vecs(static_cast<Eigen::Index>(corpus.size()),
                                 embedder.config().dim_out);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        passage_vecs.row(static_cast<Eigen::Index>(i)) =
            embedder.embed(corpus[i].formal_statement, TextRole::Passage).transpose();

    int max_rank = static_cast<int>(corpus.size()) - 1;  // non-positive passages
    int lo = std::min(window_lo, max_rank);
    int hi = std::min(window_hi, max_rank);

    Rng rng(seed);
    std::vector<TrainTriplet> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        Eigen::VectorXd q = embedder.embed(pair.state, TextRole::Query);
        Eigen::VectorXd sims = passage_vecs * q;

        std::vector<std::size_t> ranked;
        ranked.reserve(corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (corpus[i].id != pair.pos_id) ranked.push_back(i);
        std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
            double sa = sims[static_cast<Eigen::Index>(a)];
            double sb = sims[static_cast<Eigen::Index>(b)];
            if (sa != sb) return sa > sb;
            return corpus[a].id < corpus[b].id;
        });

        int rank = lo + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(hi - lo + 1)));
        const Premise& neg = corpus[ranked[static_cast<std::size_t>(rank - 1)]];
        out.push_back(TrainTriplet{pair.state, pair.pos_id, neg.id});
    }
    return out;
}

// ---------- index and retriever ----------

PremiseIndex PremiseIndex::build(const ToyEmbedder& embedder, std::vector<Premise> premises) {
    if (premises.empty()) throw std::invalid_argument("cannot build an empty index");
    premise_by_id(premises);  // throws on duplicate ids
    PremiseIndex index;
    index.vectors_.resize(static_cast<Eigen::Index>(premises.size()), embedder.config().dim_out);
    for (std::size_t i = 0; i < premises.size(); ++i)
        index.vectors_.row(static_cast<Eigen::Index>(i)) =
            embedder.embed(premises[i].formal_statement, TextRole::Passage).transpose();
    index.premises_ = std::move(premises);
    return index;
}

std::vector<ScoredPremise> PremiseIndex::top_k(const Eigen::VectorXd& query, int k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    Eigen::VectorXd sims = vectors_ * query;
    std::vector<std::size_t> order(premises_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double sa = sims[static_cast<Eigen::Index>(a)];
        double sb = sims[static_cast<Eigen::Index>(b)];
        if (sa != sb) return sa > sb;
        return premises_[a].id < premises_[b].id;
    });
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), premises_.size());
    std::vector<ScoredPremise> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.push_back(
            ScoredPremise{premises_[order[i]], sims[static_cast<Eigen::Index>(order[i])]});
    return out;
}

void PremiseIndex::save(const std::string& path, std::uint64_t corpus_digest,
                        const std::string& config_digest, std::uint64_t seed) const {
    json premises = json::array();
    for (const auto& p : premises_)
        premises.push_back(json{{"id", p.id},
                                {"formal_name", p.formal_name},
                                {"informal_name", p.informal_name},
                                {"formal_statement", p.formal_statement}});
    json vectors = json::array();
    for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < vectors_.cols(); ++c) row.push_back(vectors_(r, c));
        vectors.push_back(std::move(row));
    }
    char digest_hex[32];
    std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                  static_cast<unsigned long long>(corpus_digest));
    json doc{{"version", 1},
             {"corpus_digest", digest_hex},
             {"dim_out", vectors_.cols()},
             {"premises", std::move(premises)},
             {"vectors", std::move(vectors)}};
    if (!config_digest.empty()) doc["meta"] = json{{"config_digest", config_digest}, {"seed", seed}};
    create_or_throw(path) << doc.dump() << '\n';
}

PremiseIndex PremiseIndex::load(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    json doc = json::parse(in);
    if (doc.value("version", 0) != 1) throw std::runtime_error("unsupported index version");
    PremiseIndex index;
    index.corpus_digest_ = std::stoull(doc.at("corpus_digest").get<std::string>(), nullptr, 16);
    const json& premises = doc.at("premises");
    const json& vectors = doc.at("vectors");
    if (premises.size() != vectors.size())
        throw std::runtime_error("index premise/vector count mismatch");
    Eigen::Index dim = doc.at("dim_out").get<Eigen::Index>();
    index.vectors_.resize(static_cast<Eigen::Index>(vectors.size()), dim);
    for (std::size_t i = 0; i < premises.size(); ++i) {
        const json& p = premises[i];
        index.premises_.push_back(Premise{p.at("id").get<int>(),
                                          p.at("formal_name").get<std::string>(),
                                          p.at("informal_name").get<std::string>(),
                                          p.at("formal_statement").get<std::string>()});
        for (Eigen::Index c = 0; c < dim; ++c)
            index.vectors_(static_cast<Eigen::Index>(i), c) = vectors[i][c].get<double>();
    }
    return index;
}

std::vector<ScoredPremise> Retriever::search(const std::string& text, int k) const {
    return index_.top_k(embedder_.embed(text, TextRole::Query), k);
}

std::vector<Premise> Retriever::premises_for_state(const std::string& state_rendering,
                                                   int k) const {
    if (k < 1) return {};
    std::vector<Premise> out;
    for (auto& scored : search(state_rendering, k)) out.push_back(std::move(scored.premise));
    return out;
}

// ---------- synthetic data ----------

SyntheticDataset make_planted_dataset(int n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
    constexpr int kNoiseVocabulary = 30;
    Rng rng(seed);
    SyntheticDataset out;
    for (int i = 0; i < n_pairs; ++i) {
        auto noise = [&] { return " noise" + std::to_string(rng.bounded(kNoiseVocabulary)); };
        std::string unique = "uniq" + std::to_string(i);
        Premise p;
        p.id = i;
        p.formal_name = "planted_" + std::to_string(i);
        p.informal_name = "Planted Lemma " + std::to_string(i);
        p.formal_statement = "lemma " + unique + " :" + noise() + noise();
        out.corpus.push_back(std::move(p));
        out.pairs.push_back(TrainPair{"goal " + unique + noise() + noise(), i});
    }
    return out;
}

}  // namespace stepprove
