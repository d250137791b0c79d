#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "graphtune/errors.hpp"
#include "graphtune/optimizer.hpp"

using namespace graphtune;
namespace fs = std::filesystem;

namespace {

Study fresh_study(std::uint64_t seed = 42) {
    Study study;
    study.study_id = "test";
    study.space = default_search_space();
    study.metric = Metric::f1;
    study.seed = seed;
    return study;
}

void record_simple(Study& study, const PipelineConfig& config, double objective) {
    record(study, config, objective, {}, 0, 0);
}

} // namespace

TEST_CASE("categorical density: prior-only, counts, normalization") {
    // group empty, two categories -> (0.5, 0.5)
    auto p = categorical_density({}, {"a", "b"}, 1.0);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));

    // group {A,A,B}, prior 1.0 -> (3/5, 2/5)
    p = categorical_density({"a", "a", "b"}, {"a", "b"}, 1.0);
    CHECK(p[0] == doctest::Approx(3.0 / 5.0));
    CHECK(p[1] == doctest::Approx(2.0 / 5.0));

    // probabilities sum to 1 for random groups
    Rng rng(1);
    std::vector<std::string> domain = {"a", "b", "c", "d"};
    for (int round = 0; round < 200; ++round) {
        std::vector<std::string> group;
        std::size_t n = rng.below(20);
        for (std::size_t i = 0; i < n; ++i) group.push_back(domain[rng.below(4)]);
        auto probs = categorical_density(group, domain, 0.5 + rng.uniform01());
        double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (double x : probs) CHECK(x > 0.0);
    }
}

TEST_CASE("numeric density: uniform prior, single kernel argmax, mass normalization") {
    IntegerDimension chunk{"chunk_size", 200, 2000, 100};

    // empty group -> exactly the uniform prior
    auto mass = numeric_density({}, chunk);
    REQUIRE(mass.size() == 19);
    for (double m : mass) CHECK(m == doctest::Approx(1.0 / 19.0).epsilon(1e-9));

    // single observation at 1000 peaks there
    mass = numeric_density({1000}, chunk);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < mass.size(); ++i)
        if (mass[i] > mass[argmax]) argmax = i;
    CHECK(chunk.grid_value(argmax) == 1000);

    // masses integrate to 1 for random groups (summation oracle)
    Rng rng(7);
    IntegerDimension top_k{"top_k", 1, 20, 1};
    for (int round = 0; round < 100; ++round) {
        std::vector<std::int64_t> group;
        std::size_t n = rng.below(15);
        for (std::size_t i = 0; i < n; ++i)
            group.push_back(top_k.low + static_cast<std::int64_t>(rng.below(20)));
        auto m = numeric_density(group, top_k);
        double sum = std::accumulate(m.begin(), m.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
    }

    CHECK_THROWS_AS(numeric_density({5000}, chunk), Error); // out-of-range observation
}

TEST_CASE("suggest during startup is uniform, seeded, in-space") {
    Study study = fresh_study();
    PipelineConfig first = suggest(study);
    CHECK(static_cast<bool>(validate_config(first, study.space)));
    // reproducible for identical history
    CHECK(suggest(study) == first);

    Study same_seed = fresh_study();
    CHECK(suggest(same_seed) == first);

    Study other_seed = fresh_study(43);
    bool differs = !(suggest(other_seed) == first);
    CHECK(differs);
}

TEST_CASE("suggest on a cleanly separable history prefers the good category") {
    // 20 trials: graph_completion scores 0.9, chunk_completion scores 0.1.
    // Over 100 seeds, the suggested search_type should be graph_completion
    // with empirical frequency >= 0.9.
    Study study = fresh_study(0);
    for (int i = 0; i < 20; ++i) {
        PipelineConfig config = baseline_config();
        config.search_type = (i % 2 == 0) ? "graph_completion" : "chunk_completion";
        record_simple(study, config, (i % 2 == 0) ? 0.9 : 0.1);
    }
    int graph_wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        study.seed = seed;
        PipelineConfig s = suggest(study);
        CHECK(static_cast<bool>(validate_config(s, study.space)));
        if (s.search_type == "graph_completion") ++graph_wins;
    }
    CHECK(graph_wins >= 90);
}

TEST_CASE("degenerate history with equal objectives still suggests in-space") {
    Study study = fresh_study(3);
    for (int i = 0; i < 15; ++i) record_simple(study, baseline_config(), 0.5);
    PipelineConfig s = suggest(study);
    CHECK(static_cast<bool>(validate_config(s, study.space)));
}

TEST_CASE("good/bad partition is a quantile split by objective") {
    Study study = fresh_study();
    // objectives 0.00 .. 0.19
    for (int i = 0; i < 20; ++i) {
        PipelineConfig config = baseline_config();
        config.top_k = 1 + (i % 20);
        record_simple(study, config, i * 0.01);
    }
    // gamma 0.25 of 20 -> ceil = 5 good trials
    CHECK(static_cast<std::size_t>(std::ceil(study.settings.gamma * 20)) == 5);
    // indirectly validated through suggest's density behavior elsewhere;
    // here check the ranking tie-break does not throw on ties
    record_simple(study, baseline_config(), 0.19);
    CHECK_NOTHROW(suggest(study));
}

TEST_CASE("in-space property: 10,000 suggestions across seeds and histories") {
    Rng rng(77);
    std::size_t suggestions = 0;
    for (int round = 0; round < 125; ++round) {
        Study study = fresh_study(rng.next_u64());
        std::size_t history = rng.below(30);
        Rng sampler(rng.next_u64());
        for (std::size_t i = 0; i < history; ++i) {
            PipelineConfig config = sample_uniform_config(study.space, sampler);
            record_simple(study, config, sampler.uniform01());
        }
        for (int s = 0; s < 80; ++s) {
            PipelineConfig config = suggest(study);
            bool in_space = static_cast<bool>(validate_config(config, study.space));
            if (!in_space) CHECK(in_space); // log only the violations
            ++suggestions;
            record_simple(study, config, sampler.uniform01());
        }
    }
    CHECK(suggestions == 10000);
}

TEST_CASE("record validates inputs and appends densely") {
    Study study = fresh_study();
    record_simple(study, baseline_config(), 0.4);
    CHECK(study.trials.size() == 1);
    CHECK(study.trials[0].trial_index == 0);

    CHECK_THROWS_AS(record_simple(study, baseline_config(), 1.2), Error);
    PipelineConfig bad = baseline_config();
    bad.top_k = 0;
    CHECK_THROWS_AS(record_simple(study, bad, 0.5), OutOfDomainError);

    study.closed = true;
    CHECK_THROWS_AS(record_simple(study, baseline_config(), 0.5), StudyClosedError);
    CHECK_THROWS_AS(suggest(study), StudyClosedError);
}

TEST_CASE("best_trial maximizes with lowest-index tie-break") {
    Study study = fresh_study();
    record_simple(study, baseline_config(), 0.2);
    record_simple(study, baseline_config(), 0.9);
    record_simple(study, baseline_config(), 0.9);
    CHECK(best_trial(study).trial_index == 1);

    Study single = fresh_study();
    record_simple(single, baseline_config(), 0.3);
    CHECK(best_trial(single).trial_index == 0);

    Study failed = fresh_study();
    record_failure(failed, baseline_config(), 0, 0);
    CHECK_THROWS_AS(best_trial(failed), NoCompleteTrialsError);
}

TEST_CASE("running_max is a prefix maximum; failures carry the previous value") {
    Study study = fresh_study();
    record_simple(study, baseline_config(), 0.1);
    record_simple(study, baseline_config(), 0.3);
    record_simple(study, baseline_config(), 0.2);
    auto series = running_max(study);
    REQUIRE(series.size() == 3);
    CHECK(series[0].second == doctest::Approx(0.1));
    CHECK(series[1].second == doctest::Approx(0.3));
    CHECK(series[2].second == doctest::Approx(0.3));

    record_failure(study, baseline_config(), 0, 0);
    record_simple(study, baseline_config(), 0.9);
    series = running_max(study);
    REQUIRE(series.size() == 5);
    CHECK(series[3].second == doctest::Approx(0.3)); // failure carries the max
    CHECK(series[4].second == doctest::Approx(0.9));

    CHECK(running_max(fresh_study()).empty());

    // monotone nondecreasing property on random histories
    Rng rng(5);
    Study random_study = fresh_study();
    for (int i = 0; i < 50; ++i) record_simple(random_study, baseline_config(), rng.uniform01());
    auto rm = running_max(random_study);
    for (std::size_t i = 1; i < rm.size(); ++i) CHECK(rm[i].second >= rm[i - 1].second);
}

TEST_CASE("study log round-trips and locks") {
    fs::path path = fs::temp_directory_path() / "gt_optimizer_test" / "study.jsonl";
    fs::remove_all(path.parent_path());

    Study study = fresh_study(9);
    {
        StudyLog log(path, study);
        record_simple(study, baseline_config(), 0.25);
        log.append(study.trials.back());
        PipelineConfig other = baseline_config();
        other.top_k = 9;
        record(study, other, 0.75, {}, 10, 20);
        log.append(study.trials.back());
        record_failure(study, baseline_config(), 20, 21);
        log.append(study.trials.back());

        // second writer is rejected while the lock is held
        CHECK_THROWS_AS(StudyLog(path, study), Error);
    }

    Study loaded = StudyLog::load(path);
    CHECK(loaded.study_id == study.study_id);
    CHECK(loaded.seed == study.seed);
    CHECK(loaded.metric == study.metric);
    REQUIRE(loaded.trials.size() == 3);
    CHECK(loaded.trials[1].config.top_k == 9);
    CHECK(loaded.trials[1].objective == doctest::Approx(0.75));
    CHECK(loaded.trials[1].started_at == 10);
    CHECK(loaded.trials[2].state == TrialState::failed);
    CHECK(loaded.space.to_json() == study.space.to_json());

    // identical recorded history implies the identical next suggestion
    CHECK(suggest(loaded) == suggest(study));

    // lock released: a new writer may append again
    CHECK_NOTHROW(StudyLog(path, loaded));
    fs::remove_all(path.parent_path());
}

TEST_CASE("trial record JSON round-trip") {
    TrialRecord r;
    r.trial_index = 4;
    r.config = baseline_config();
    r.objective = 0.5;
    r.state = TrialState::complete;
    r.started_at = 100;
    r.finished_at = 200;
    QuestionScore q;
    q.instance_id = "q1";
    q.metric = Metric::f1;
    q.value = 0.5;
    r.per_question.push_back(q);
    TrialRecord back = TrialRecord::from_json(r.to_json());
    CHECK(back.trial_index == 4);
    CHECK(back.config == r.config);
    CHECK(back.per_question.size() == 1);
}
