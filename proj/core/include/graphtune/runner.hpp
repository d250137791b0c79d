#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "graphtune/config_space.hpp"
#include "graphtune/corpus.hpp"
#include "graphtune/evaluation.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/optimizer.hpp"
#include "graphtune/retrieval.hpp"
#include "graphtune/stores.hpp"

namespace graphtune {

struct StudySettings {
    std::filesystem::path dataset_path;
    DatasetAdapter adapter = DatasetAdapter::hotpotqa;
    std::filesystem::path exclusion_list; // empty = no exclusions
    Metric metric = Metric::f1;
    int n_trials = 50;
    std::size_t n_train = 24;
    std::size_t n_test = 12;
    std::uint64_t split_seed = 7;
    std::uint64_t optimizer_seed = 42;
    std::uint64_t bootstrap_seed = 1234;
    int bootstrap_resamples = 1000;
    double ci_level = 0.95;
    std::string backend = "mock"; // mock | replay | live
    std::filesystem::path output_dir = "out";
    std::filesystem::path replay_cache = "replay-cache";
    std::filesystem::path prompts_dir; // optional template overlay
    std::string study_id = "study";
    TpeSettings tpe;
    SearchSpace space = default_search_space();
    PipelineConfig baseline = baseline_config();
};

/// Per-trial summary used by the report artifacts.
struct TrialPoint {
    int trial_index = 0;
    TrialState state = TrialState::complete;
    double objective = 0.0; // meaningful iff complete
};

struct StudyReport {
    std::string study_id;
    std::string benchmark; // adapter name
    Metric metric = Metric::f1;
    PipelineConfig best_config;
    int best_trial_index = 0;
    ScoreReport baseline_train;
    ScoreReport baseline_holdout;
    ScoreReport optimized_train;
    ScoreReport optimized_holdout;
    std::vector<TrialPoint> trial_points;
    std::vector<std::pair<int, double>> running_max_series;

    /// (optimized - baseline) / baseline; nullopt when the baseline is zero
    /// (rendered as "--" in the tables).
    static std::optional<double> relative_gain(double baseline, double optimized);

    nlohmann::ordered_json to_json() const;
    static StudyReport from_json(const nlohmann::json& j);
};

/// Builds the gateway for a backend name. replay wraps live when the
/// environment provides GT_LLM_BASE_URL and GT_OFFLINE allows it, otherwise it
/// runs strict.
std::unique_ptr<Gateway> make_backend(const std::string& backend,
                                      const std::filesystem::path& replay_cache,
                                      TemplateRegistry registry);

/// Timing source for trial records: deterministic backends report the gateway
/// request clock, the live backend reports unix milliseconds.
std::int64_t trial_clock(const Gateway& gateway);

/// Resets the stores and rebuilds the full trial state under `config`: chunk
/// the corpus instances' passages, extract fragments, optionally summarize,
/// merge into one graph, index every collection, store the QA rows, freeze.
void build_trial_state(const PipelineConfig& config,
                       const std::vector<QAInstance>& corpus_instances,
                       const std::vector<QAInstance>& qa_instances, TrialStores& stores);

/// Answers and scores `questions` over frozen stores. Per-question failures
/// score 0 with an error note; the list always has one entry per question, in
/// dataset order.
std::vector<QuestionScore> answer_and_score(const std::vector<QAInstance>& questions,
                                            const PipelineConfig& config, Metric metric,
                                            TrialStores& stores);

/// One complete pipeline run on the split's training set: reset, build,
/// answer, score. Infrastructure failures yield state=failed instead of
/// throwing.
TrialRecord run_trial(const PipelineConfig& config, const CorpusSplit& split, Metric metric,
                      TrialStores& stores);

using TrialCallback = std::function<void(const TrialRecord&)>;

/// Runs (or resumes) the full study protocol: baseline on train and hold-out,
/// n_trials optimize-evaluate iterations, hold-out evaluation of the best
/// configuration (graph still built from train passages only), report
/// emission into output_dir.
StudyReport run_study(const StudySettings& settings, bool resume = false,
                      const TrialCallback& on_trial = {});

/// Writes report.json, summary.csv, running_max.csv and dashboard.html.
void emit_report(const StudyReport& report, const std::filesystem::path& out_dir);

/// Flat key/value study configuration file ('#' comments, dotted keys for
/// tpe.*, space.*, baseline.*). Unknown keys are errors.
StudySettings load_study_settings(const std::filesystem::path& config_file);
void apply_study_setting(StudySettings& settings, const std::string& key,
                         const std::string& value);

} // namespace graphtune
