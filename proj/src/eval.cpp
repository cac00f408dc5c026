#include "stepprove/eval.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "stepprove/rng.hpp"

namespace stepprove {

namespace {

StatementResult evaluate_statement(const PoolStatement& statement, const EvalConfig& config,
                                   const GeneratorFactory& generator_factory,
                                   const EnvironmentFactory& environment_factory,
                                   const Retriever* retriever) {
    StatementResult row;
    row.id = statement.id;
    auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    try {
        std::unique_ptr<TacticGenerator> generator = generator_factory();
        std::uint64_t master = config.seed ^ fnv1a64(statement.id);
        for (int i = 0; i < config.passes; ++i) {
            if (elapsed() > config.per_statement_timeout_seconds) {
                row.timed_out = true;
                break;
            }
            PassConfig pass_config = config.pass;
            pass_config.seed = master ^ static_cast<std::uint64_t>(i);
            if (!pass_config.wall_limit_seconds)
                pass_config.wall_limit_seconds = config.per_statement_timeout_seconds - elapsed();
            std::unique_ptr<Environment> env = environment_factory();
            PassResult pass =
                run_pass(statement.statement, *generator, *env, retriever, pass_config,
                         statement.nl);
            row.passes_used += 1;
            row.expansions += pass.counters.expansions;
            row.generator_calls += pass.counters.generator_calls;
            bool solved = pass.solved;
            if (pass.timed_out) row.timed_out = true;
            if (solved) row.script = pass.script;
            row.passes.push_back(std::move(pass));
            if (solved) {
                row.solved = true;
                break;
            }
            if (row.timed_out) break;
        }
    } catch (const std::exception& e) {
        row.error = e.what();  // recorded as unsolved-with-error
        row.solved = false;
    }
    row.wall_seconds = elapsed();
    return row;
}

}  // namespace

EvalReport evaluate(const std::vector<PoolStatement>& pool, const EvalConfig& config,
                    const GeneratorFactory& generator_factory,
                    const EnvironmentFactory& environment_factory, const Retriever* retriever) {
    if (pool.empty()) throw std::invalid_argument("refusing to evaluate an empty pool");
    if (config.passes < 1) throw std::invalid_argument("passes must be >= 1");

    EvalReport report;
    report.system_name = config.system_name;
    report.config_digest = config.config_digest;
    report.seed = config.seed;
    report.budget = budget_string(config.passes, config.pass.samples_per_step);

    // statements are independent and seeded by id, so worker scheduling
    // cannot change any row; assembly stays in pool order
    std::vector<StatementResult> rows(pool.size());
    int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < pool.size(); ++i)
            rows[i] = evaluate_statement(pool[i], config, generator_factory, environment_factory,
                                         retriever);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= pool.size()) return;
                rows[i] = evaluate_statement(pool[i], config, generator_factory,
                                             environment_factory, retriever);
            }
        };
        std::vector<std::thread> threads;
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (auto& row : rows) {
        if (row.solved) report.solved_count += 1;
        report.rows.push_back(std::move(row));
    }
    report.success_rate =
        static_cast<double>(report.solved_count) / static_cast<double>(pool.size());
    return report;
}

std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f %%", rate * 100.0);
    return buf;
}

std::string render_markdown(const EvalReport& report) {
    std::string out;
    out += "# " + report.system_name + " evaluation report\n\n";
    out += "| system | budget | success rate |\n";
    out += "|---|---|---|\n";
    out += "| " + report.system_name + " | " + report.budget + " | " +
           format_rate(report.success_rate) + " |\n\n";
    out += "## statements\n\n";
    out += "| id | solved | passes used | expansions | note |\n";
    out += "|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        std::string note;
        if (!row.error.empty()) note = "error: " + row.error;
        else if (row.timed_out) note = "timeout";
        out += "| " + row.id + " | " + (row.solved ? "yes" : "no") + " | " +
               std::to_string(row.passes_used) + " | " + std::to_string(row.expansions) + " | " +
               note + " |\n";
    }
    out += "\nconfig: " + report.config_digest + " seed: " + std::to_string(report.seed) + "\n";
    return out;
}

std::string render_csv(const EvalReport& report) {
    std::string out;
    out += "system,budget,success_rate\n";
    out += report.system_name + "," + report.budget + "," + format_rate(report.success_rate) + "\n";
    out += "\nid,solved,passes_used,expansions,note\n";
    for (const auto& row : report.rows) {
        std::string note;
        if (!row.error.empty()) note = "error";
        else if (row.timed_out) note = "timeout";
        out += row.id + "," + (row.solved ? "yes" : "no") + "," + std::to_string(row.passes_used) +
               "," + std::to_string(row.expansions) + "," + note + "\n";
    }
    out += "# config=" + report.config_digest + " seed=" + std::to_string(report.seed) + "\n";
    return out;
}

void write_report(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << content;
}

}  // namespace stepprove
