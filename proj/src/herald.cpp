#include "stepprove/herald.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <regex>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace stepprove {

using json = nlohmann::json;

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "consistent";
        case Verdict::Inconsistent: return "inconsistent";
        case Verdict::Error: return "error";
    }
    return "error";
}

std::vector<ClientOutput> ModelClient::complete(const std::string&, int) {
    throw std::logic_error("this client role does not implement complete()");
}

JudgeOutcome ModelClient::judge(const std::string&, const std::string&) {
    throw std::logic_error("this client role does not implement judge()");
}

std::string normalize_for_judgement(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// ---------- mocks ----------

namespace {

constexpr const char* kWrapPrefix = "example : ";
constexpr const char* kWrapSuffix = " := by";
constexpr const char* kCandidateMarker = " -- c";

class IdentityRefiner : public ModelClient {
public:
    ClientRole role() const override { return ClientRole::Refiner; }
    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::success(input));
    }
};

class TrimmingRefiner : public ModelClient {
public:
    ClientRole role() const override { return ClientRole::Refiner; }
    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        static const std::regex marker(R"(^\s*(Theorem|Exercise|Proposition)\s*[0-9]*\.?\s*)");
        std::string text = std::regex_replace(input, marker, "");
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
            text.pop_back();
        std::size_t start = text.find_first_not_of(" \t\r\n");
        if (start != std::string::npos) text.erase(0, start);
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::success(text));
    }
};

class WrapFormalizer : public ModelClient {
public:
    explicit WrapFormalizer(bool distinct) : distinct_(distinct) {}
    ClientRole role() const override { return ClientRole::Formalizer; }
    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        std::vector<ClientOutput> out;
        for (int i = 0; i < n; ++i) {
            std::string formal = kWrapPrefix + input + kWrapSuffix;
            if (distinct_) formal += kCandidateMarker + std::to_string(i);
            out.push_back(ClientOutput::success(std::move(formal)));
        }
        return out;
    }

private:
    bool distinct_;
};

class PassthroughFormalizer : public ModelClient {
public:
    ClientRole role() const override { return ClientRole::Formalizer; }
    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::success(input));
    }
};

// strips the wrap-formalizer framing; returns the candidate index when the
// distinct marker is present
std::optional<std::pair<std::string, int>> unwrap_candidate(const std::string& formal) {
    std::string text = formal;
    int index = -1;
    std::size_t marker = text.rfind(kCandidateMarker);
    if (marker != std::string::npos &&
        marker + std::strlen(kCandidateMarker) < text.size()) {
        bool digits = true;
        for (std::size_t i = marker + std::strlen(kCandidateMarker); i < text.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) digits = false;
        if (digits) {
            index = std::stoi(text.substr(marker + std::strlen(kCandidateMarker)));
            text.resize(marker);
        }
    }
    if (text.rfind(kWrapPrefix, 0) != 0) return std::nullopt;
    if (text.size() < std::strlen(kWrapPrefix) + std::strlen(kWrapSuffix)) return std::nullopt;
    if (text.compare(text.size() - std::strlen(kWrapSuffix), std::strlen(kWrapSuffix),
                     kWrapSuffix) != 0)
        return std::nullopt;
    std::string inner = text.substr(
        std::strlen(kWrapPrefix),
        text.size() - std::strlen(kWrapPrefix) - std::strlen(kWrapSuffix));
    return std::make_pair(inner, index);
}

class EchoInformalizer : public ModelClient {
public:
    explicit EchoInformalizer(bool corrupt_odd) : corrupt_odd_(corrupt_odd) {}
    ClientRole role() const override { return ClientRole::Informalizer; }
    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        auto unwrapped = unwrap_candidate(input);
        std::string back = unwrapped ? unwrapped->first : input;
        if (corrupt_odd_ && unwrapped && unwrapped->second >= 0 && unwrapped->second % 2 == 1)
            back += " [CORRUPTED]";
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::success(back));
    }

private:
    bool corrupt_odd_;
};

class ConstantInformalizer : public ModelClient {
public:
    explicit ConstantInformalizer(std::string text) : text_(std::move(text)) {}
    ClientRole role() const override { return ClientRole::Informalizer; }
    std::vector<ClientOutput> complete(const std::string&, int n) override {
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::success(text_));
    }

private:
    std::string text_;
};

class ExactMatchJudge : public ModelClient {
public:
    ClientRole role() const override { return ClientRole::Judge; }
    JudgeOutcome judge(const std::string& original, const std::string& back) override {
        bool same = normalize_for_judgement(original) == normalize_for_judgement(back);
        return {same ? Verdict::Consistent : Verdict::Inconsistent,
                same ? "normalized texts match" : "normalized texts differ"};
    }
};

class FailingClient : public ModelClient {
public:
    explicit FailingClient(ClientRole role) : role_(role) {}
    ClientRole role() const override { return role_; }
    std::vector<ClientOutput> complete(const std::string&, int n) override {
        return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                         ClientOutput::failure("mock failure"));
    }
    JudgeOutcome judge(const std::string&, const std::string&) override {
        return {Verdict::Error, "mock failure"};
    }

private:
    ClientRole role_;
};

class HttpClient : public ModelClient {
public:
    HttpClient(ClientRole role, std::string url, std::string prompt_template)
        : role_(role), prompt_template_(std::move(prompt_template)) {
        std::size_t scheme = url.find("://");
        if (scheme == std::string::npos)
            throw std::invalid_argument("client URL must include a scheme");
        std::size_t slash = url.find('/', scheme + 3);
        host_ = slash == std::string::npos ? url : url.substr(0, slash);
        path_ = slash == std::string::npos ? "/generate" : url.substr(slash);
    }

    ClientRole role() const override { return role_; }

    std::vector<ClientOutput> complete(const std::string& input, int n) override {
        auto completions = post(render_prompt(input), n);
        if (!completions)
            return std::vector<ClientOutput>(static_cast<std::size_t>(n),
                                             ClientOutput::failure(error_));
        std::vector<ClientOutput> out;
        for (const auto& text : *completions) out.push_back(ClientOutput::success(text));
        while (out.size() < static_cast<std::size_t>(n))
            out.push_back(ClientOutput::failure("endpoint returned too few completions"));
        out.resize(static_cast<std::size_t>(n));
        return out;
    }

    JudgeOutcome judge(const std::string& original, const std::string& back) override {
        std::string input = "ORIGINAL:\n" + original + "\n\nBACK-TRANSLATION:\n" + back;
        auto completions = post(render_prompt(input), 1);
        if (!completions || completions->empty()) return {Verdict::Error, error_};
        std::string answer = normalize_for_judgement(completions->front());
        if (answer.rfind("consistent", 0) == 0) return {Verdict::Consistent, completions->front()};
        if (answer.rfind("inconsistent", 0) == 0)
            return {Verdict::Inconsistent, completions->front()};
        return {Verdict::Error, "unparseable judge answer: " + completions->front()};
    }

private:
    std::string render_prompt(const std::string& input) const {
        std::string prompt = prompt_template_;
        const std::string placeholder = "{input}";
        std::size_t at = prompt.find(placeholder);
        if (at == std::string::npos) return prompt + input;
        prompt.replace(at, placeholder.size(), input);
        return prompt;
    }

    std::optional<std::vector<std::string>> post(const std::string& prompt, int n) {
        httplib::Client client(host_);
        client.set_connection_timeout(30);
        client.set_read_timeout(30, 0);
        json request{{"prompt", prompt}, {"n", n}, {"temperature", 1.0}, {"max_tokens", 512}};
        auto res = client.Post(path_, request.dump(), "application/json");
        if (!res) {
            error_ = "endpoint unreachable: " + host_ + path_;
            return std::nullopt;
        }
        if (res->status != 200) {
            error_ = "endpoint returned HTTP " + std::to_string(res->status);
            return std::nullopt;
        }
        json body = json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.contains("completions")) {
            error_ = "malformed endpoint response";
            return std::nullopt;
        }
        std::vector<std::string> out;
        for (const auto& c : body["completions"])
            if (c.contains("text")) out.push_back(c["text"].get<std::string>());
        return out;
    }

    ClientRole role_;
    std::string prompt_template_;
    std::string host_, path_;
    std::string error_;
};

}  // namespace

std::unique_ptr<ModelClient> make_identity_refiner() { return std::make_unique<IdentityRefiner>(); }
std::unique_ptr<ModelClient> make_trimming_refiner() { return std::make_unique<TrimmingRefiner>(); }
std::unique_ptr<ModelClient> make_wrap_formalizer() {
    return std::make_unique<WrapFormalizer>(false);
}
std::unique_ptr<ModelClient> make_distinct_formalizer() {
    return std::make_unique<WrapFormalizer>(true);
}
std::unique_ptr<ModelClient> make_passthrough_formalizer() {
    return std::make_unique<PassthroughFormalizer>();
}
std::unique_ptr<ModelClient> make_echo_informalizer() {
    return std::make_unique<EchoInformalizer>(false);
}
std::unique_ptr<ModelClient> make_corrupt_half_informalizer() {
    return std::make_unique<EchoInformalizer>(true);
}
std::unique_ptr<ModelClient> make_constant_informalizer(std::string text) {
    return std::make_unique<ConstantInformalizer>(std::move(text));
}
std::unique_ptr<ModelClient> make_exact_match_judge() { return std::make_unique<ExactMatchJudge>(); }
std::unique_ptr<ModelClient> make_failing_client(ClientRole role) {
    return std::make_unique<FailingClient>(role);
}
std::unique_ptr<ModelClient> make_http_client(ClientRole role, std::string url,
                                              std::string prompt_template) {
    return std::make_unique<HttpClient>(role, std::move(url), std::move(prompt_template));
}

// ---------- extraction ----------

const std::vector<std::string>& default_block_patterns() {
    // a keyword line plus following lines up to a blank line
    static const std::vector<std::string> patterns = {
        R"((Theorem|Exercise|Proposition)[^\n]*(?:\n(?![ \t]*(?:\n|$))[^\n]*)*)",
    };
    return patterns;
}

std::vector<RawBlock> extract_blocks(const std::string& document,
                                     const std::vector<std::string>& patterns) {
    std::vector<std::regex> compiled;
    for (const auto& p : patterns) {
        try {
            compiled.emplace_back(p, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw std::invalid_argument("invalid block pattern '" + p + "': " + e.what());
        }
    }

    std::vector<RawBlock> all;
    for (const auto& re : compiled) {
        for (auto it = std::sregex_iterator(document.begin(), document.end(), re);
             it != std::sregex_iterator(); ++it) {
            RawBlock block;
            block.begin = static_cast<std::size_t>(it->position());
            block.end = block.begin + static_cast<std::size_t>(it->length());
            block.text = it->str();
            all.push_back(std::move(block));
        }
    }
    std::sort(all.begin(), all.end(),
              [](const RawBlock& a, const RawBlock& b) { return a.begin < b.begin; });
    // keep the earliest of any overlapping matches
    std::vector<RawBlock> out;
    for (auto& block : all) {
        if (!out.empty() && block.begin < out.back().end) continue;
        out.push_back(std::move(block));
    }
    return out;
}

InformalStatement refine_statement(const RawBlock& block, ModelClient* refiner) {
    InformalStatement statement;
    statement.id = "d" + std::to_string(block.doc_index) + "-b" + std::to_string(block.begin);
    statement.doc_index = block.doc_index;
    statement.begin = block.begin;
    statement.end = block.end;
    if (!refiner) {
        statement.text = block.text;
        return statement;
    }
    if (refiner->role() != ClientRole::Refiner)
        throw std::invalid_argument("refine_statement requires a refiner-role client");
    std::vector<ClientOutput> outputs = refiner->complete(block.text, 1);
    if (outputs.empty() || !outputs.front().ok)
        throw std::runtime_error("refiner failed for block " + statement.id + ": " +
                                 (outputs.empty() ? "no output" : outputs.front().error));
    statement.text = outputs.front().text;
    return statement;
}

std::vector<ClientOutput> autoformalize(const InformalStatement& informal, int n_candidates,
                                        ModelClient& formalizer) {
    if (n_candidates < 1) throw std::invalid_argument("n_candidates must be >= 1");
    if (formalizer.role() != ClientRole::Formalizer)
        throw std::invalid_argument("autoformalize requires a formalizer-role client");
    std::vector<ClientOutput> outputs = formalizer.complete(informal.text, n_candidates);
    // the record always carries exactly n_candidates slots
    while (outputs.size() < static_cast<std::size_t>(n_candidates))
        outputs.push_back(ClientOutput::failure("missing completion"));
    outputs.resize(static_cast<std::size_t>(n_candidates));
    return outputs;
}

ClientOutput informalize(const std::string& formal_text, ModelClient& informalizer) {
    if (informalizer.role() != ClientRole::Informalizer)
        throw std::invalid_argument("informalize requires an informalizer-role client");
    std::vector<ClientOutput> outputs = informalizer.complete(formal_text, 1);
    if (outputs.empty()) return ClientOutput::failure("no output");
    return outputs.front();
}

JudgeOutcome judge_consistency(const std::string& original, const std::string& back_translation,
                               ModelClient& judge) {
    if (judge.role() != ClientRole::Judge)
        throw std::invalid_argument("judge_consistency requires a judge-role client");
    return judge.judge(original, back_translation);
}

// ---------- pipeline ----------

std::vector<FormalizationRecord> run_pipeline(const std::vector<std::string>& documents,
                                              const HeraldConfig& config,
                                              const HeraldClients& clients) {
    if (!clients.formalizer || !clients.informalizer || !clients.judge)
        throw std::invalid_argument("pipeline needs formalizer, informalizer and judge clients");
    if (config.wellformed_gate && !clients.wellformed_env)
        throw std::invalid_argument("the well-formedness gate needs an environment");

    std::vector<FormalizationRecord> records;
    for (std::size_t doc = 0; doc < documents.size(); ++doc) {
        std::vector<RawBlock> blocks = extract_blocks(documents[doc], config.patterns);
        for (auto& block : blocks) {
            block.doc_index = static_cast<int>(doc);
            FormalizationRecord record;
            try {
                record.informal = refine_statement(block, clients.refiner);
            } catch (const std::exception& e) {
                // a failed refinement still yields an auditable record
                record.informal.id =
                    "d" + std::to_string(doc) + "-b" + std::to_string(block.begin);
                record.informal.doc_index = static_cast<int>(doc);
                record.informal.begin = block.begin;
                record.informal.end = block.end;
                record.informal.text = block.text;
                for (int i = 0; i < config.n_candidates; ++i)
                    record.candidates.push_back(CandidateRecord{"", "", Verdict::Error, e.what()});
                records.push_back(std::move(record));
                continue;
            }

            std::vector<ClientOutput> candidates =
                autoformalize(record.informal, config.n_candidates, *clients.formalizer);
            for (const auto& candidate : candidates) {
                CandidateRecord cr;
                if (!candidate.ok) {
                    cr.verdict = Verdict::Error;
                    cr.rationale = candidate.error;
                    record.candidates.push_back(std::move(cr));
                    continue;
                }
                cr.formal = candidate.text;
                ClientOutput back = informalize(cr.formal, *clients.informalizer);
                if (!back.ok) {
                    cr.verdict = Verdict::Error;
                    cr.rationale = back.error;
                    record.candidates.push_back(std::move(cr));
                    continue;
                }
                cr.back_translation = back.text;
                JudgeOutcome outcome =
                    judge_consistency(record.informal.text, cr.back_translation, *clients.judge);
                cr.verdict = outcome.verdict;
                cr.rationale = outcome.rationale;

                if (cr.verdict == Verdict::Consistent && config.wellformed_gate) {
                    EnvResult gate = clients.wellformed_env->init(cr.formal);
                    if (!gate.ok()) {
                        cr.verdict = Verdict::Inconsistent;
                        cr.rationale = "well-formedness gate: " + gate.error().message;
                    }
                }
                record.candidates.push_back(std::move(cr));
            }

            for (const auto& cr : record.candidates)
                if (cr.verdict == Verdict::Consistent) record.accepted.push_back(cr.formal);
            records.push_back(std::move(record));
        }
    }
    return records;
}

std::string record_to_jsonl(const FormalizationRecord& record) {
    json candidates = json::array();
    for (const auto& c : record.candidates)
        candidates.push_back(json{{"formal", c.formal},
                                  {"back_translation", c.back_translation},
                                  {"verdict", verdict_name(c.verdict)},
                                  {"rationale", c.rationale}});
    json j{{"id", record.informal.id},
           {"doc_index", record.informal.doc_index},
           {"span", {record.informal.begin, record.informal.end}},
           {"informal", record.informal.text},
           {"candidates", std::move(candidates)},
           {"accepted", record.accepted}};
    return j.dump();
}

void write_records_jsonl(const std::string& path, const std::vector<FormalizationRecord>& records,
                         const std::string& config_digest, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << json{{"meta", {{"config_digest", config_digest}, {"seed", seed}}}}.dump() << '\n';
    for (const auto& r : records) out << record_to_jsonl(r) << '\n';
}

void write_statement_pool(const std::string& path,
                          const std::vector<FormalizationRecord>& records,
                          const std::string& config_digest, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << "# config=" << config_digest << " seed=" << seed << '\n';
    for (const auto& r : records)
        for (const auto& accepted : r.accepted) out << accepted << '\n';
}

}  // namespace stepprove
