#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stepprove/env.hpp"

namespace stepprove {

enum class ClientRole { Formalizer, Informalizer, Judge, Refiner };
enum class Verdict { Consistent, Inconsistent, Error };

std::string verdict_name(Verdict v);

struct ClientOutput {
    bool ok = false;
    std::string text;
    std::string error;
    static ClientOutput success(std::string t) { return {true, std::move(t), {}}; }
    static ClientOutput failure(std::string e) { return {false, {}, std::move(e)}; }
};

struct JudgeOutcome {
    Verdict verdict = Verdict::Error;
    std::string rationale;
};

// Role-tagged text model. Formalizers, informalizers and refiners answer
// through complete(); judges through judge().
class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual ClientRole role() const = 0;
    virtual std::vector<ClientOutput> complete(const std::string& input, int n);
    virtual JudgeOutcome judge(const std::string& original, const std::string& back_translation);
};

// ---------- deterministic mock clients ----------

// refiner that passes text through unchanged
std::unique_ptr<ModelClient> make_identity_refiner();
// refiner that trims surrounding whitespace and a leading "Theorem N." /
// "Exercise N." / "Proposition N." marker
std::unique_ptr<ModelClient> make_trimming_refiner();
// formalizer emitting n copies of "example : <text> := by"
std::unique_ptr<ModelClient> make_wrap_formalizer();
// formalizer emitting n distinct candidates "example : <text> := by -- c<i>"
std::unique_ptr<ModelClient> make_distinct_formalizer();
// formalizer that emits the informal text verbatim (toy-grammar corpora)
std::unique_ptr<ModelClient> make_passthrough_formalizer();
// informalizer that inverts the wrap formalizers exactly
std::unique_ptr<ModelClient> make_echo_informalizer();
// informalizer that inverts the wrap but corrupts odd-indexed candidates
std::unique_ptr<ModelClient> make_corrupt_half_informalizer();
// informalizer returning a fixed string
std::unique_ptr<ModelClient> make_constant_informalizer(std::string text);
// judge: consistent iff the two texts match after lowercasing and
// whitespace collapse
std::unique_ptr<ModelClient> make_exact_match_judge();
// client whose every call fails (any role)
std::unique_ptr<ModelClient> make_failing_client(ClientRole role);

// remote client speaking the generation endpoint contract with a
// role-specific prompt template ("{input}" is substituted)
std::unique_ptr<ModelClient> make_http_client(ClientRole role, std::string url,
                                              std::string prompt_template);

// collapse whitespace runs and lowercase; the judge mock's normal form
std::string normalize_for_judgement(std::string_view text);

// ---------- pipeline ----------

struct RawBlock {
    int doc_index = 0;
    std::size_t begin = 0;  // byte span within the document
    std::size_t end = 0;
    std::string text;
};

// Non-overlapping pattern matches in document order. Throws on an invalid
// pattern. Default patterns match Theorem/Exercise/Proposition blocks
// terminated by a blank line.
std::vector<RawBlock> extract_blocks(const std::string& document,
                                     const std::vector<std::string>& patterns);
const std::vector<std::string>& default_block_patterns();

struct InformalStatement {
    std::string id;
    int doc_index = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string text;
};

InformalStatement refine_statement(const RawBlock& block, ModelClient* refiner);

struct CandidateRecord {
    std::string formal;
    std::string back_translation;
    Verdict verdict = Verdict::Error;
    std::string rationale;
};

struct FormalizationRecord {
    InformalStatement informal;
    std::vector<CandidateRecord> candidates;
    std::vector<std::string> accepted;  // formal texts with verdict consistent
};

std::vector<ClientOutput> autoformalize(const InformalStatement& informal, int n_candidates,
                                        ModelClient& formalizer);
ClientOutput informalize(const std::string& formal_text, ModelClient& informalizer);
JudgeOutcome judge_consistency(const std::string& original, const std::string& back_translation,
                               ModelClient& judge);

struct HeraldConfig {
    int n_candidates = 4;
    bool wellformed_gate = false;  // demote accepted statements that fail env init
    std::vector<std::string> patterns = default_block_patterns();
};

struct HeraldClients {
    ModelClient* refiner = nullptr;  // optional
    ModelClient* formalizer = nullptr;
    ModelClient* informalizer = nullptr;
    ModelClient* judge = nullptr;
    Environment* wellformed_env = nullptr;  // required when the gate is on
};

// extract -> refine -> autoformalize -> informalize -> judge; per-record
// failures are isolated and recorded as error verdicts.
std::vector<FormalizationRecord> run_pipeline(const std::vector<std::string>& documents,
                                              const HeraldConfig& config,
                                              const HeraldClients& clients);

std::string record_to_jsonl(const FormalizationRecord& record);
void write_records_jsonl(const std::string& path, const std::vector<FormalizationRecord>& records,
                         const std::string& config_digest, std::uint64_t seed);
// one accepted formal statement per line, preceded by a "#" traceability line
void write_statement_pool(const std::string& path,
                          const std::vector<FormalizationRecord>& records,
                          const std::string& config_digest, std::uint64_t seed);

}  // namespace stepprove
