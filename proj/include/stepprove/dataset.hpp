#pragma once

#include <optional>
#include <string>
#include <vector>

namespace stepprove {

struct PairPremise {
    int id = 0;
    std::string formal_name;
    std::string formal_statement;
};

// One supervised training example: the context the generator saw plus the
// tactic applied there.
struct StateTacticPair {
    std::optional<std::string> nl_description;
    std::vector<std::string> prefix;  // tactics before this step
    std::string state;                // state rendering
    std::vector<PairPremise> premises;
    std::string tactic;
    std::string statement_id;
    int round = 0;
};

std::string pair_to_jsonl(const StateTacticPair& pair);
StateTacticPair pair_from_jsonl(const std::string& line);  // throws on malformed input

std::vector<StateTacticPair> load_pairs_dataset(const std::string& path, bool permissive = false);
// meta_comment, when non-empty, is written as a leading "# ..." line that
// every loader skips
void save_pairs_dataset(const std::string& path, const std::vector<StateTacticPair>& pairs,
                        const std::string& meta_comment = "");

struct MergeStats {
    std::size_t existing = 0;
    std::size_t added = 0;
    std::size_t duplicates = 0;
    std::size_t skipped_malformed = 0;
    std::size_t total = 0;
};

// Appends `new_pairs` to the dataset at `path` (created if missing), deduping
// on exact (state, tactic). Existing entries keep their order; new ones are
// appended in input order. Malformed existing lines are fatal unless
// `permissive`, in which case they are dropped and counted.
MergeStats merge_dataset(const std::string& path, const std::vector<StateTacticPair>& new_pairs,
                         bool permissive = false, const std::string& meta_comment = "");

std::uint64_t dataset_digest(const std::string& path);

}  // namespace stepprove
