#include "stepprove/dataset.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "stepprove/rng.hpp"

namespace stepprove {

using json = nlohmann::json;

std::string pair_to_jsonl(const StateTacticPair& pair) {
    json premises = json::array();
    for (const auto& p : pair.premises)
        premises.push_back(json{{"id", p.id},
                                {"formal_name", p.formal_name},
                                {"formal_statement", p.formal_statement}});
    json j{{"nl_description", pair.nl_description ? json(*pair.nl_description) : json(nullptr)},
           {"prefix", pair.prefix},
           {"state", pair.state},
           {"premises", std::move(premises)},
           {"tactic", pair.tactic},
           {"statement_id", pair.statement_id},
           {"round", pair.round}};
    return j.dump();
}

StateTacticPair pair_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    StateTacticPair pair;
    if (j.contains("nl_description") && !j["nl_description"].is_null())
        pair.nl_description = j["nl_description"].get<std::string>();
    pair.prefix = j.at("prefix").get<std::vector<std::string>>();
    pair.state = j.at("state").get<std::string>();
    for (const auto& p : j.at("premises"))
        pair.premises.push_back(PairPremise{p.at("id").get<int>(),
                                            p.at("formal_name").get<std::string>(),
                                            p.at("formal_statement").get<std::string>()});
    pair.tactic = j.at("tactic").get<std::string>();
    pair.statement_id = j.at("statement_id").get<std::string>();
    pair.round = j.at("round").get<int>();
    return pair;
}

std::vector<StateTacticPair> load_pairs_dataset(const std::string& path, bool permissive) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<StateTacticPair> out;
    std::string line;
    int line_no = 0;
    for (; std::getline(in, line); ) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        try {
            out.push_back(pair_from_jsonl(line));
        } catch (const std::exception& e) {
            if (!permissive)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": malformed pair: " + e.what());
        }
    }
    return out;
}

void save_pairs_dataset(const std::string& path, const std::vector<StateTacticPair>& pairs,
                        const std::string& meta_comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    if (!meta_comment.empty()) out << "# " << meta_comment << '\n';
    for (const auto& p : pairs) out << pair_to_jsonl(p) << '\n';
}

MergeStats merge_dataset(const std::string& path, const std::vector<StateTacticPair>& new_pairs,
                         bool permissive, const std::string& meta_comment) {
    MergeStats stats;
    std::vector<StateTacticPair> merged;

    std::ifstream in(path);
    if (in) {
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            try {
                merged.push_back(pair_from_jsonl(line));
            } catch (const std::exception& e) {
                if (!permissive)
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": malformed pair: " + e.what());
                ++stats.skipped_malformed;
            }
        }
    }
    stats.existing = merged.size();

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : merged) seen.insert({p.state, p.tactic});
    for (const auto& p : new_pairs) {
        if (seen.insert({p.state, p.tactic}).second) {
            merged.push_back(p);
            ++stats.added;
        } else {
            ++stats.duplicates;
        }
    }
    stats.total = merged.size();
    save_pairs_dataset(path, merged, meta_comment);
    return stats;
}

std::uint64_t dataset_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return kFnvOffset;  // absent dataset: digest of empty input
    std::uint64_t h = kFnvOffset;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return h;
}

}  // namespace stepprove
