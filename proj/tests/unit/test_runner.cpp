#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "graphtune/errors.hpp"
#include "graphtune/runner.hpp"

using namespace graphtune;

namespace {
// Tests must behave identically under ctest (which sets the variables) and
// under direct invocation.
struct TestEnv {
    TestEnv() {
        ::setenv("GT_OFFLINE", "1", 1);
        ::setenv("GT_QUIET", "1", 1);
    }
} test_env_;
} // namespace
namespace fs = std::filesystem;

namespace {

fs::path toy_dataset() { return fs::path(GT_REPO_ROOT) / "data" / "toy_hotpot.json"; }

StudySettings mini_settings(const fs::path& out) {
    StudySettings settings;
    settings.dataset_path = toy_dataset();
    settings.adapter = DatasetAdapter::hotpotqa;
    settings.metric = Metric::f1;
    settings.n_trials = 6;
    settings.bootstrap_resamples = 200;
    settings.output_dir = out;
    settings.study_id = "mini";
    return settings;
}

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("gt_runner_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TrialFixture {
    std::unique_ptr<Gateway> gateway = make_mock_gateway(TemplateRegistry::with_defaults());
    TrialStores stores{*gateway};
    CorpusSplit split;

    TrialFixture() {
        auto instances = load_benchmark(toy_dataset(), DatasetAdapter::hotpotqa);
        split = make_split(instances, {}, 7, 24, 12);
    }
};

} // namespace

TEST_CASE("run_trial completes with an objective in range, deterministically") {
    TrialFixture f;
    TrialRecord a = run_trial(baseline_config(), f.split, Metric::f1, f.stores);
    CHECK(a.state == TrialState::complete);
    CHECK(a.objective >= 0.0);
    CHECK(a.objective <= 1.0);
    CHECK(a.per_question.size() == 24);
    CHECK(a.finished_at >= a.started_at);

    TrialRecord b = run_trial(baseline_config(), f.split, Metric::f1, f.stores);
    CHECK(b.objective == a.objective);
    for (std::size_t i = 0; i < a.per_question.size(); ++i) {
        CHECK(b.per_question[i].instance_id == a.per_question[i].instance_id);
        CHECK(b.per_question[i].value == a.per_question[i].value);
    }
}

TEST_CASE("trial isolation: recorded history does not change a config's objective") {
    TrialFixture f;
    PipelineConfig probe = baseline_config();
    probe.qa_prompt = "concise";
    double first = run_trial(probe, f.split, Metric::f1, f.stores).objective;

    // interleave other configurations, then re-run the probe
    PipelineConfig other = baseline_config();
    other.search_type = "graph_completion";
    run_trial(other, f.split, Metric::f1, f.stores);
    other.qa_prompt = "justified";
    run_trial(other, f.split, Metric::f1, f.stores);

    CHECK(run_trial(probe, f.split, Metric::f1, f.stores).objective == first);
}

TEST_CASE("without_summaries issues zero summarization calls; with_summaries issues some") {
    TrialFixture f;
    PipelineConfig config = baseline_config();
    config.task_getter = "without_summaries";
    f.gateway->reset_call_counts();
    run_trial(config, f.split, Metric::f1, f.stores);
    CHECK(f.gateway->call_counts().summarization == 0);
    CHECK(f.stores.collection_size("summaries") == 0);

    config.task_getter = "with_summaries";
    f.gateway->reset_call_counts();
    run_trial(config, f.split, Metric::f1, f.stores);
    CHECK(f.gateway->call_counts().summarization > 0);
    CHECK(f.stores.collection_size("summaries") ==
          f.stores.collection_size("chunks"));
}

TEST_CASE("per-trial reset returns store counts to zero before building") {
    TrialFixture f;
    run_trial(baseline_config(), f.split, Metric::f1, f.stores);
    CHECK(f.stores.collection_size("chunks") > 0);
    f.stores.reset_all();
    CHECK(f.stores.collection_size("chunks") == 0);
    CHECK(f.stores.collection_size("nodes") == 0);
    CHECK(f.stores.graph().node_count() == 0);
    CHECK(f.stores.metadata_count() == 0);
}

TEST_CASE("hold-out build indexes zero test passages") {
    TrialFixture f;
    build_trial_state(baseline_config(), f.split.train, f.split.test, f.stores);

    std::set<std::string> train_doc_ids;
    for (const auto& doc : corpus_documents(f.split.train)) train_doc_ids.insert(doc.doc_id);
    std::set<std::string> test_only_doc_ids;
    for (const auto& doc : corpus_documents(f.split.test))
        if (!train_doc_ids.count(doc.doc_id)) test_only_doc_ids.insert(doc.doc_id);
    REQUIRE_FALSE(test_only_doc_ids.empty()); // the probe must be able to fail

    for (const auto& chunk_id : f.stores.collection_ids("chunks")) {
        std::string doc_id = chunk_id.substr(0, chunk_id.find('#'));
        CHECK(train_doc_ids.count(doc_id) == 1);
        CHECK(test_only_doc_ids.count(doc_id) == 0);
    }
    // while the metadata rows belong to the hold-out questions
    CHECK(f.stores.metadata_count() == f.split.test.size());
}

TEST_CASE("graph referential integrity holds after every build") {
    TrialFixture f;
    for (const char* prompt : {"default", "structured", "incremental"}) {
        PipelineConfig config = baseline_config();
        config.graph_prompt = prompt;
        build_trial_state(config, f.split.train, f.split.train, f.stores);
        std::set<std::string> chunk_ids;
        for (const auto& id : f.stores.collection_ids("chunks")) chunk_ids.insert(id);
        CHECK_NOTHROW(f.stores.graph().check_integrity(chunk_ids));
    }
}

TEST_CASE("answer_and_score annotates failures instead of aborting") {
    TrialFixture f;
    PipelineConfig config = baseline_config();
    config.qa_prompt = "not-a-registered-template";
    build_trial_state(config, f.split.train, f.split.train, f.stores);
    auto scores = answer_and_score(f.split.train, config, Metric::f1, f.stores);
    REQUIRE(scores.size() == 24);
    for (const auto& s : scores) {
        CHECK(s.value == 0.0);
        CHECK(s.error_note.find("unknown prompt template") != std::string::npos);
    }
}

namespace {

// Gateway whose completions always fail: simulates a dead upstream.
class DeadGateway final : public Gateway {
public:
    DeadGateway() : Gateway(TemplateRegistry::with_defaults()) {}
    std::string backend_name() const override { return "dead"; }

protected:
    std::string do_complete(const PromptTemplate&, const CompletionRequest&,
                            const std::string&) override {
        throw GatewayError(GatewayFault::Fatal, "upstream unreachable");
    }
    std::vector<double> do_embed(const std::string& text) override {
        return hashed_unigram_embedding(text, 256);
    }
};

} // namespace

TEST_CASE("whole-trial infrastructure failure yields state=failed, no throw") {
    auto instances = load_benchmark(toy_dataset(), DatasetAdapter::hotpotqa);
    CorpusSplit split = make_split(instances, {}, 7, 24, 12);
    DeadGateway gateway;
    TrialStores stores(gateway);
    TrialRecord record = run_trial(baseline_config(), split, Metric::f1, stores);
    CHECK(record.state == TrialState::failed);
    CHECK(record.per_question.empty());
}

TEST_CASE("run_study end to end: monotone curve, improvement, resume, artifacts") {
    fs::path out = scratch_dir("study");
    StudySettings settings = mini_settings(out);

    StudyReport report = run_study(settings);

    // running maximum is monotone nondecreasing
    for (std::size_t i = 1; i < report.running_max_series.size(); ++i)
        CHECK(report.running_max_series[i].second >= report.running_max_series[i - 1].second);
    CHECK(report.trial_points.size() == 6);

    // the reported optimized-train score is the best trial's objective
    double best_objective = 0.0;
    for (const auto& t : report.trial_points)
        if (t.state == TrialState::complete) best_objective = std::max(best_objective, t.objective);
    CHECK(report.optimized_train.mean == doctest::Approx(best_objective));
    CHECK(report.best_trial_index >= 0);
    CHECK(report.best_trial_index < 6);

    // artifacts exist
    for (const char* name : {"report.json", "summary.csv", "running_max.csv", "dashboard.html",
                             "study.jsonl"})
        CHECK(fs::exists(out / name));

    // ci columns satisfy low <= mean <= high in every emitted row
    for (const ScoreReport* r : {&report.baseline_train, &report.baseline_holdout,
                                 &report.optimized_train, &report.optimized_holdout}) {
        CHECK(r->ci_low <= r->mean);
        CHECK(r->mean <= r->ci_high);
    }

    // a second run without resume refuses to clobber the study log
    CHECK_THROWS_AS(run_study(settings), Error);

    // resume with more trials continues from the recorded history
    settings.n_trials = 9;
    StudyReport resumed = run_study(settings, /*resume=*/true);
    CHECK(resumed.trial_points.size() == 9);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(resumed.trial_points[i].objective ==
              doctest::Approx(report.trial_points[i].objective));

    // report.json round-trips
    StudyReport parsed = StudyReport::from_json(nlohmann::json::parse(slurp(out / "report.json")));
    CHECK(parsed.best_config == resumed.best_config);
    CHECK(parsed.trial_points.size() == 9);
    fs::remove_all(out);
}

TEST_CASE("summary.csv carries the table shape with -- for zero baselines") {
    fs::path out = scratch_dir("emcsv");
    StudySettings settings = mini_settings(out);
    settings.metric = Metric::em; // the untuned conversational baseline scores 0 EM
    settings.n_trials = 4;
    StudyReport report = run_study(settings);
    CHECK(report.baseline_train.mean == 0.0);

    std::string csv = slurp(out / "summary.csv");
    CHECK(csv.rfind("benchmark,metric,phase,baseline,baseline_ci_low,baseline_ci_high,"
                    "optimized,optimized_ci_low,optimized_ci_high,relative_gain_pct\n",
                    0) == 0);
    CHECK(csv.find("hotpotqa,em,train,") != std::string::npos);
    CHECK(csv.find(",--") != std::string::npos); // undefined gain rendered as --

    std::string series = slurp(out / "running_max.csv");
    CHECK(series.rfind("trial,objective,running_max\n", 0) == 0);

    // dashboard is self-contained: no fetching constructs (the svg xmlns
    // attribute is a namespace identifier, not a fetch)
    std::string html = slurp(out / "dashboard.html");
    CHECK(html.find("<script src") == std::string::npos);
    CHECK(html.find("<link") == std::string::npos);
    CHECK(html.find("<img") == std::string::npos);
    CHECK(html.find("@import") == std::string::npos);
    CHECK(html.find("url(") == std::string::npos);
    CHECK(html.find("fetch(") == std::string::npos);
    CHECK(html.find("<svg") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("correctness-metric study runs through the grading path") {
    fs::path out = scratch_dir("correctness");
    StudySettings settings = mini_settings(out);
    settings.metric = Metric::correctness;
    settings.n_trials = 3;
    StudyReport report = run_study(settings);
    CHECK(report.metric == Metric::correctness);
    CHECK(report.baseline_train.mean >= 0.0);
    CHECK(report.baseline_train.mean <= 1.0);
    for (const auto& q : report.optimized_holdout.per_question) {
        CHECK(q.metric == Metric::correctness);
        // mock grader emits only the three thresholded grades
        bool graded = q.value == 0.0 || q.value == 0.5 || q.value == 1.0;
        CHECK(graded);
    }
    fs::remove_all(out);
}

TEST_CASE("study settings file: parsing, overrides, unknown keys") {
    fs::path dir = scratch_dir("conf");
    fs::path file = dir / "study.conf";
    std::ofstream(file) << "dataset = data/set.json\n"
                        << "adapter = musique\n"
                        << "metric = correctness\n"
                        << "n_trials = 12  # includes a comment\n"
                        << "tpe.gamma = 0.3\n"
                        << "space.top_k = 2:10\n"
                        << "space.chunk_size = 400:800:200\n"
                        << "space.qa_prompt = default,concise\n"
                        << "baseline.top_k = 7\n";
    StudySettings settings = load_study_settings(file);
    CHECK(settings.adapter == DatasetAdapter::musique);
    CHECK(settings.metric == Metric::correctness);
    CHECK(settings.n_trials == 12);
    CHECK(settings.tpe.gamma == doctest::Approx(0.3));
    CHECK(settings.baseline.top_k == 7);
    const auto& top_k = std::get<IntegerDimension>(*settings.space.find("top_k"));
    CHECK(top_k.low == 2);
    CHECK(top_k.high == 10);
    const auto& chunk = std::get<IntegerDimension>(*settings.space.find("chunk_size"));
    CHECK(chunk.step == 200);
    const auto& qa = std::get<CategoricalDimension>(*settings.space.find("qa_prompt"));
    CHECK(qa.values.size() == 2);

    CHECK_THROWS_AS(apply_study_setting(settings, "no_such_key", "x"), ConfigFileError);
    CHECK_THROWS_AS(apply_study_setting(settings, "n_trials", "many"), ConfigFileError);
    CHECK_THROWS_AS(apply_study_setting(settings, "space.unknown_dim", "1:2"), ConfigFileError);
    CHECK_THROWS_AS(apply_study_setting(settings, "backend", "quantum"), ConfigFileError);

    std::ofstream(file) << "dataset x\n";
    CHECK_THROWS_AS(load_study_settings(file), ConfigFileError);
    fs::remove_all(dir);
}

TEST_CASE("make_backend wires the three backends and honors offline") {
    auto mock = make_backend("mock", "/tmp/unused", TemplateRegistry::with_defaults());
    CHECK(mock->backend_name() == "mock");
    fs::path cache = scratch_dir("backend_cache");
    auto replay = make_backend("replay", cache, TemplateRegistry::with_defaults());
    CHECK(replay->backend_name() == "replay-strict"); // offline forces strict
    CHECK_THROWS_AS(make_backend("live", cache, TemplateRegistry::with_defaults()),
                    OfflineViolationError);
    CHECK_THROWS_AS(make_backend("quantum", cache, TemplateRegistry::with_defaults()), Error);
    fs::remove_all(cache);
}

TEST_CASE("run_study surfaces dataset problems before any trial") {
    fs::path out = scratch_dir("badset");
    StudySettings settings = mini_settings(out);
    settings.dataset_path = "/no/such/file.json";
    CHECK_THROWS_AS(run_study(settings), ParseError);
    CHECK_FALSE(fs::exists(out / "study.jsonl")); // nothing was written
    fs::remove_all(out);
}

TEST_CASE("relative gain is undefined exactly at zero baselines") {
    CHECK_FALSE(StudyReport::relative_gain(0.0, 0.5).has_value());
    CHECK(*StudyReport::relative_gain(0.25, 0.5) == doctest::Approx(1.0));
    CHECK(*StudyReport::relative_gain(0.5, 0.25) == doctest::Approx(-0.5));
}
