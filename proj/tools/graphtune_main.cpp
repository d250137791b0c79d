// graphtune CLI: runs optimization studies end to end, single trials, and
// corpus inspection over the knowledge-graph QA pipeline.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "graphtune/chunking.hpp"
#include "graphtune/errors.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/runner.hpp"

namespace gt = graphtune;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDataset = 3;
constexpr int kExitBackend = 4;

struct CliOverrides {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;

    gt::StudySettings resolve() const {
        gt::StudySettings settings;
        if (!config_file.empty()) settings = gt::load_study_settings(config_file);
        for (const auto& [key, value] : overrides) gt::apply_study_setting(settings, key, value);
        if (settings.dataset_path.empty())
            throw gt::ConfigFileError("dataset", "no dataset given (flag --dataset or config key)");
        return settings;
    }
};

// Registers one CLI flag per study-settings key; values funnel through
// apply_study_setting so file and flag behavior stay identical.
void add_settings_flags(CLI::App* cmd, CliOverrides& cli) {
    cmd->add_option("--config", cli.config_file, "study configuration file (key = value lines)");
    auto opt = [cmd, &cli](const std::string& flag, const std::string& key,
                           const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&cli, key](const std::string& v) { cli.overrides.emplace_back(key, v); }, help);
    };
    opt("--dataset", "dataset", "benchmark file path");
    opt("--adapter", "adapter", "dataset adapter: hotpotqa | twowiki | musique");
    opt("--exclusions", "exclusions", "exclusion-id list file");
    opt("--metric", "metric", "objective metric: em | f1 | correctness");
    opt("--trials", "n_trials", "number of optimization trials");
    opt("--n-train", "n_train", "training split size");
    opt("--n-test", "n_test", "hold-out split size");
    opt("--split-seed", "split_seed", "split shuffle seed");
    opt("--optimizer-seed", "optimizer_seed", "TPE seed");
    opt("--bootstrap-seed", "bootstrap_seed", "bootstrap resampling seed");
    opt("--resamples", "bootstrap_resamples", "bootstrap resample count");
    opt("--ci-level", "ci_level", "confidence level for intervals");
    opt("--backend", "backend", "gateway backend: mock | replay | live");
    opt("--out", "output_dir", "output directory");
    opt("--replay-cache", "replay_cache", "replay cache directory");
    opt("--prompts", "prompts_dir", "prompt template directory overlay");
    opt("--study-id", "study_id", "study identifier");
    cmd->add_option_function<std::vector<std::string>>(
        "--set",
        [&cli](const std::vector<std::string>& pairs) {
            for (const auto& pair : pairs) {
                std::size_t eq = pair.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set expects key=value, got '" + pair + "'");
                cli.overrides.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
            }
        },
        "any config key override, e.g. --set tpe.gamma=0.3 --set space.top_k=1:10");
}

void print_trial_progress(const gt::TrialRecord& trial, int total) {
    if (trial.state == gt::TrialState::complete) {
        std::printf("trial %3d/%d  objective=%.4f  %s\n", trial.trial_index + 1, total,
                    trial.objective, trial.config.to_json().dump().c_str());
    } else {
        std::printf("trial %3d/%d  FAILED     %s\n", trial.trial_index + 1, total,
                    trial.config.to_json().dump().c_str());
    }
    std::fflush(stdout);
}

void print_report_summary(const gt::StudyReport& report,
                          const std::filesystem::path& out_dir) {
    auto gain_text = [](std::optional<double> gain) {
        if (!gain) return std::string("--");
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%.1f%%", *gain * 100.0);
        return std::string(buffer);
    };
    std::printf("\nbenchmark=%s metric=%s best_trial=%d\n", report.benchmark.c_str(),
                gt::metric_name(report.metric).c_str(), report.best_trial_index);
    std::printf("best config: %s\n", report.best_config.to_json().dump().c_str());
    std::printf("%-8s %-10s %-10s %s\n", "phase", "baseline", "optimized", "gain");
    std::printf("%-8s %-10.4f %-10.4f %s\n", "train", report.baseline_train.mean,
                report.optimized_train.mean,
                gain_text(gt::StudyReport::relative_gain(report.baseline_train.mean,
                                                         report.optimized_train.mean))
                    .c_str());
    std::printf("%-8s %-10.4f %-10.4f %s\n", "holdout", report.baseline_holdout.mean,
                report.optimized_holdout.mean,
                gain_text(gt::StudyReport::relative_gain(report.baseline_holdout.mean,
                                                         report.optimized_holdout.mean))
                    .c_str());
    std::printf("report artifacts in %s\n", out_dir.string().c_str());
}

int run_study_command(const CliOverrides& cli, bool resume, bool report_only) {
    gt::StudySettings settings = cli.resolve();
    if (report_only) {
        std::filesystem::path study_path = settings.output_dir / "study.jsonl";
        if (!gt::StudyLog::exists(study_path))
            throw gt::ConfigFileError(study_path.string(), "no study log to report on");
        gt::Study existing = gt::StudyLog::load(study_path);
        if (existing.trials.empty())
            throw gt::ConfigFileError(study_path.string(), "study has no trials to report on");
        settings.n_trials = static_cast<int>(existing.trials.size());
        resume = true;
    }
    gt::StudyReport report = gt::run_study(settings, resume, [&](const gt::TrialRecord& trial) {
        print_trial_progress(trial, settings.n_trials);
    });
    print_report_summary(report, settings.output_dir);
    return kExitOk;
}

int run_one_command(const CliOverrides& cli, const gt::PipelineConfig& config) {
    gt::StudySettings settings = cli.resolve();
    if (config.chunk_size < 1) throw gt::ConfigFileError("chunk_size", "must be >= 1");
    if (config.top_k < 1) throw gt::ConfigFileError("top_k", "must be >= 1");
    gt::strategy_from_name(config.search_type); // any of the six strategies

    std::vector<gt::QAInstance> instances =
        gt::load_benchmark(settings.dataset_path, settings.adapter);
    std::set<std::string> exclusions;
    if (!settings.exclusion_list.empty())
        exclusions = gt::load_exclusion_list(settings.exclusion_list);
    gt::CorpusSplit split = gt::make_split(instances, exclusions, settings.split_seed,
                                           settings.n_train, settings.n_test);

    gt::TemplateRegistry registry = gt::TemplateRegistry::with_defaults();
    if (!settings.prompts_dir.empty()) registry.load_directory(settings.prompts_dir);
    auto gateway = gt::make_backend(settings.backend, settings.replay_cache, std::move(registry));
    gt::TrialStores stores(*gateway);

    gt::TrialRecord trial = gt::run_trial(config, split, settings.metric, stores);
    if (trial.state == gt::TrialState::failed) {
        std::fprintf(stderr, "trial failed\n");
        return kExitBackend;
    }
    std::printf("%-18s %-8s %s\n", "instance", "score", "note");
    for (const auto& q : trial.per_question)
        std::printf("%-18s %-8.4f %s\n", q.instance_id.c_str(), q.value, q.error_note.c_str());
    std::printf("objective (%s over %zu questions): %.4f\n",
                gt::metric_name(settings.metric).c_str(), trial.per_question.size(),
                trial.objective);
    return kExitOk;
}

int corpus_inspect_command(const CliOverrides& cli) {
    gt::StudySettings settings = cli.resolve();
    std::vector<gt::QAInstance> instances =
        gt::load_benchmark(settings.dataset_path, settings.adapter);
    std::set<std::string> exclusions;
    if (!settings.exclusion_list.empty())
        exclusions = gt::load_exclusion_list(settings.exclusion_list);

    std::size_t passages = 0;
    for (const auto& instance : instances) passages += instance.passages.size();
    std::vector<gt::CorpusDocument> docs = gt::corpus_documents(instances);

    std::printf("dataset: %s (%s)\n", settings.dataset_path.string().c_str(),
                gt::adapter_name(settings.adapter).c_str());
    std::printf("instances: %zu, excluded: %zu\n", instances.size(), exclusions.size());
    std::printf("passages: %zu, unique documents after dedup: %zu\n", passages, docs.size());

    std::size_t total_tokens = 0;
    for (const auto& doc : docs) {
        gt::CorpusDocument tmp = doc;
        for (const auto& chunk : gt::chunk_document(tmp, 1 << 20)) total_tokens += chunk.token_count;
    }
    std::printf("document tokens: %zu total, %.1f mean\n", total_tokens,
                docs.empty() ? 0.0 : static_cast<double>(total_tokens) / docs.size());

    gt::CorpusSplit split = gt::make_split(instances, exclusions, settings.split_seed,
                                           settings.n_train, settings.n_test);
    std::printf("split (seed %llu): %zu train / %zu test\n",
                static_cast<unsigned long long>(settings.split_seed), split.train.size(),
                split.test.size());
    std::printf("first train ids:");
    for (std::size_t i = 0; i < std::min<std::size_t>(5, split.train.size()); ++i)
        std::printf(" %s", split.train[i].id.c_str());
    std::printf("\nfirst test ids:");
    for (std::size_t i = 0; i < std::min<std::size_t>(5, split.test.size()); ++i)
        std::printf(" %s", split.test[i].id.c_str());
    std::printf("\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph QA pipeline optimization"};
    app.require_subcommand(1);

    CliOverrides cli;

    CLI::App* study = app.add_subcommand("study", "optimization studies");
    study->require_subcommand(1);
    CLI::App* study_run = study->add_subcommand("run", "run a study end to end");
    add_settings_flags(study_run, cli);
    CLI::App* study_resume =
        study->add_subcommand("resume", "continue an interrupted study from its study.jsonl");
    add_settings_flags(study_resume, cli);
    CLI::App* study_report =
        study->add_subcommand("report", "re-emit report artifacts for an existing study");
    add_settings_flags(study_report, cli);

    CLI::App* trial = app.add_subcommand("trial", "single pipeline runs");
    CLI::App* run_one = trial->add_subcommand("run-one", "run one configuration on the train set");
    add_settings_flags(run_one, cli);
    gt::PipelineConfig one_config = gt::baseline_config();
    run_one->add_option("--chunk-size", one_config.chunk_size, "tokens per chunk");
    run_one->add_option("--search-type", one_config.search_type,
                        "retrieval strategy (any of the six)");
    run_one->add_option("--top-k", one_config.top_k, "retrieved items per query");
    run_one->add_option("--qa-prompt", one_config.qa_prompt, "qa template id");
    run_one->add_option("--graph-prompt", one_config.graph_prompt, "graph template id");
    run_one->add_option("--task-getter", one_config.task_getter,
                        "with_summaries | without_summaries");

    CLI::App* corpus = app.add_subcommand("corpus", "dataset utilities");
    CLI::App* inspect = corpus->add_subcommand("inspect", "dataset and split statistics");
    add_settings_flags(inspect, cli);

    CLI11_PARSE(app, argc, argv);

    try {
        if (study_run->parsed()) return run_study_command(cli, false, false);
        if (study_resume->parsed()) return run_study_command(cli, true, false);
        if (study_report->parsed()) return run_study_command(cli, false, true);
        if (run_one->parsed()) return run_one_command(cli, one_config);
        if (inspect->parsed()) return corpus_inspect_command(cli);
    } catch (const gt::ParseError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return kExitDataset;
    } catch (const gt::EmptyDatasetError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return kExitDataset;
    } catch (const gt::UnknownAdapterError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return kExitDataset;
    } catch (const gt::InsufficientInstancesError& e) {
        std::fprintf(stderr, "dataset error: %s\n", e.what());
        return kExitDataset;
    } catch (const gt::GatewayError& e) {
        std::fprintf(stderr, "backend error: %s\n", e.what());
        return kExitBackend;
    } catch (const gt::CacheMissError& e) {
        std::fprintf(stderr, "backend error: %s\n", e.what());
        return kExitBackend;
    } catch (const gt::OfflineViolationError& e) {
        std::fprintf(stderr, "backend error: %s\n", e.what());
        return kExitBackend;
    } catch (const gt::Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
