#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stepprove/expert.hpp"
#include "stepprove/search.hpp"

namespace stepprove {

struct EvalConfig {
    int passes = 64;  // K
    PassConfig pass{};
    std::uint64_t seed = 0;
    double per_statement_timeout_seconds = 120.0;
    int jobs = 1;  // bounded statement-level worker pool
    std::string system_name = "stepprove";
    std::string config_digest;
};

struct StatementResult {
    std::string id;
    bool solved = false;
    bool timed_out = false;
    int passes_used = 0;
    long expansions = 0;
    long generator_calls = 0;
    double wall_seconds = 0.0;  // reported on stderr only; no file contains it
    std::string error;
    std::vector<std::string> script;
    std::vector<PassResult> passes;
};

struct EvalReport {
    std::vector<StatementResult> rows;
    std::size_t solved_count = 0;
    double success_rate = 0.0;  // solved / pool size
    std::string budget;         // "K × N"
    std::string system_name;
    std::string config_digest;
    std::uint64_t seed = 0;
};

// Generator is created fresh per statement so stateless generators and the
// toy policy behave identically across orderings.
using GeneratorFactory = std::function<std::unique_ptr<TacticGenerator>()>;

// pass@K sweep: each statement gets up to K passes (seeds master ^ i per
// statement family); solved iff any pass succeeds. Per-statement errors are
// recorded, never propagated. Throws on an empty pool.
EvalReport evaluate(const std::vector<PoolStatement>& pool, const EvalConfig& config,
                    const GeneratorFactory& generator_factory,
                    const EnvironmentFactory& environment_factory, const Retriever* retriever);

// "56.7 %" rendering, one decimal place
std::string format_rate(double rate);

std::string render_markdown(const EvalReport& report);
std::string render_csv(const EvalReport& report);

void write_report(const std::string& path, const std::string& content);

}  // namespace stepprove
