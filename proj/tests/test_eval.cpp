#include <doctest.h>

#include <sstream>

#include "stepprove/eval.hpp"
#include "stepprove/generator.hpp"

using namespace stepprove;

namespace {

std::unique_ptr<Environment> kernel_factory() { return std::make_unique<KernelEnvironment>(); }

GeneratorFactory exhaustive_factory() {
    return [] {
        return std::make_unique<ToyPolicyGenerator>(GeneratorPolicy::uniform(),
                                                    ToyPolicyGenerator::Mode::Exhaustive);
    };
}

GeneratorFactory sampling_factory(int) {
    return [] {
        return std::make_unique<ToyPolicyGenerator>(GeneratorPolicy::uniform(),
                                                    ToyPolicyGenerator::Mode::Sample);
    };
}

EvalConfig desk_eval(int passes) {
    EvalConfig cfg;
    cfg.passes = passes;
    cfg.pass.samples_per_step = 16;
    cfg.pass.max_expansions = 50;
    cfg.config_digest = "testdigest";
    return cfg;
}

const std::vector<PoolStatement>& mixed_pool() {
    static const std::vector<PoolStatement> pool = {
        {"p1", "A -> A", std::nullopt},
        {"p2", "A -> B -> A", std::nullopt},
        {"p3", "⊥", std::nullopt},
    };
    return pool;
}

}  // namespace

TEST_CASE("evaluate counts pass@K over the pool") {
    EvalReport report = evaluate(mixed_pool(), desk_eval(1), exhaustive_factory(), kernel_factory,
                                 nullptr);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].solved);
    CHECK(report.rows[1].solved);
    CHECK_FALSE(report.rows[2].solved);
    CHECK(report.solved_count == 2);
    CHECK(report.success_rate == doctest::Approx(2.0 / 3.0));
    CHECK(format_rate(report.success_rate) == "66.7 %");
    CHECK(report.budget == "1 × 16");

    CHECK_THROWS_AS(
        evaluate({}, desk_eval(1), exhaustive_factory(), kernel_factory, nullptr),
        std::invalid_argument);
}

TEST_CASE("per-statement failures are recorded, not propagated") {
    std::vector<PoolStatement> pool = {
        {"ok", "A -> A", std::nullopt},
        {"broken", "not a formula (", std::nullopt},
    };
    EvalReport report =
        evaluate(pool, desk_eval(1), exhaustive_factory(), kernel_factory, nullptr);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].solved);
    CHECK_FALSE(report.rows[1].solved);
    CHECK_FALSE(report.rows[1].error.empty());
    CHECK(report.solved_count == 1);
}

TEST_CASE("pass@4 dominates pass@1 under the nested seed scheme") {
    // sampling with a tiny candidate budget misses proofs on some seeds
    std::vector<PoolStatement> pool;
    const char* statements[] = {
        "A /\\ (B \\/ C) -> A",
        "(A -> B) -> A -> B",
        "A -> B -> A /\\ B",
        "A \\/ B -> B \\/ A",
        "A /\\ B -> B /\\ A",
        "(A -> B) -> (B -> C) -> A -> C",
    };
    int i = 0;
    for (const char* s : statements) pool.push_back({"q" + std::to_string(i++), s, std::nullopt});

    EvalConfig cfg1 = desk_eval(1);
    cfg1.pass.samples_per_step = 2;
    cfg1.pass.max_expansions = 6;
    cfg1.seed = 11;
    EvalConfig cfg4 = cfg1;
    cfg4.passes = 4;

    EvalReport at1 = evaluate(pool, cfg1, sampling_factory(2), kernel_factory, nullptr);
    EvalReport at4 = evaluate(pool, cfg4, sampling_factory(2), kernel_factory, nullptr);

    // per statement: solved@1 implies solved@4 (the first pass is shared)
    for (std::size_t s = 0; s < pool.size(); ++s)
        if (at1.rows[s].solved) CHECK(at4.rows[s].solved);
    CHECK(at4.success_rate >= at1.success_rate);
}

TEST_CASE("reports render deterministically with the budget column") {
    EvalConfig cfg = desk_eval(2);
    cfg.seed = 3;
    EvalReport report =
        evaluate(mixed_pool(), cfg, exhaustive_factory(), kernel_factory, nullptr);

    std::string md = render_markdown(report);
    CHECK(md.find("| stepprove | 2 × 16 | 66.7 % |") != std::string::npos);
    CHECK(md.find("config: testdigest seed: 3") != std::string::npos);
    CHECK(render_markdown(report) == md);

    std::string csv = render_csv(report);
    CHECK(csv.find("system,budget,success_rate") == 0);
    CHECK(csv.find("stepprove,2 × 16,66.7 %") != std::string::npos);
    CHECK(render_csv(report) == csv);

    // csv round-trips through a parser: second line's third field is the rate
    std::istringstream lines(csv);
    std::string header, values;
    std::getline(lines, header);
    std::getline(lines, values);
    std::size_t last_comma = values.rfind(',');
    CHECK(values.substr(last_comma + 1) == format_rate(report.success_rate));
    CHECK(header == "system,budget,success_rate");
}

TEST_CASE("parallel evaluation matches the sequential report") {
    EvalConfig sequential = desk_eval(2);
    sequential.seed = 21;
    EvalConfig parallel = sequential;
    parallel.jobs = 4;

    EvalReport a =
        evaluate(mixed_pool(), sequential, exhaustive_factory(), kernel_factory, nullptr);
    EvalReport b = evaluate(mixed_pool(), parallel, exhaustive_factory(), kernel_factory, nullptr);
    CHECK(render_csv(a) == render_csv(b));
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].solved == b.rows[i].solved);
        CHECK(a.rows[i].passes_used == b.rows[i].passes_used);
        CHECK(a.rows[i].expansions == b.rows[i].expansions);
    }
}

TEST_CASE("budget accounting invariants hold across a sweep") {
    EvalConfig cfg = desk_eval(3);
    cfg.pass.samples_per_step = 4;
    cfg.pass.max_expansions = 10;
    EvalReport report =
        evaluate(mixed_pool(), cfg, exhaustive_factory(), kernel_factory, nullptr);
    for (const auto& row : report.rows) {
        CHECK(row.generator_calls <= static_cast<long>(cfg.passes) * cfg.pass.max_expansions);
        for (const auto& pass : row.passes) {
            CHECK(pass.counters.generator_calls <= cfg.pass.max_expansions);
            CHECK(pass.counters.max_candidates_per_call <= cfg.pass.samples_per_step);
        }
    }
}
