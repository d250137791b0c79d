#include "graphtune/runner.hpp"

#include <chrono>

#include "graphtune/chunking.hpp"
#include "graphtune/errors.hpp"
#include "graphtune/graph.hpp"

namespace graphtune {

std::unique_ptr<Gateway> make_backend(const std::string& backend,
                                      const std::filesystem::path& replay_cache,
                                      TemplateRegistry registry) {
    if (backend == "mock") return make_mock_gateway(std::move(registry));
    if (backend == "replay") {
        std::unique_ptr<Gateway> upstream;
        bool strict = true;
        if (!offline_mode()) {
            LiveConfig live = LiveConfig::from_env();
            if (!live.base_url.empty()) {
                upstream = make_live_gateway(TemplateRegistry(registry), live);
                strict = false;
            }
        }
        return make_replay_gateway(std::move(registry), replay_cache, std::move(upstream), strict);
    }
    if (backend == "live") return make_live_gateway(std::move(registry), LiveConfig::from_env());
    throw Error("unknown backend: " + backend + " (expected mock | replay | live)");
}

std::int64_t trial_clock(const Gateway& gateway) {
    if (gateway.backend_name() == "live") {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
    return static_cast<std::int64_t>(gateway.request_clock());
}

void build_trial_state(const PipelineConfig& config,
                       const std::vector<QAInstance>& corpus_instances,
                       const std::vector<QAInstance>& qa_instances, TrialStores& stores) {
    stores.reset_all();
    Gateway& gateway = stores.gateway();

    std::vector<CorpusDocument> documents = corpus_documents(corpus_instances);

    // Chunk order (doc order, then ordinal) fixes the fragment order, so the
    // merged graph is independent of any extraction parallelism.
    std::vector<Chunk> chunks;
    for (const auto& doc : documents)
        for (auto& chunk : chunk_document(doc, config.chunk_size))
            chunks.push_back(std::move(chunk));

    std::vector<GraphFragment> fragments;
    fragments.reserve(chunks.size());
    for (const auto& chunk : chunks)
        fragments.push_back(extract_graph_fragment(chunk, config.graph_prompt, gateway));

    KnowledgeGraph graph = merge_fragments(fragments);

    if (config.task_getter == kTaskWithSummaries) {
        for (const auto& chunk : chunks) {
            try {
                graph.summaries[chunk.chunk_id] = summarize_chunk(chunk, gateway);
            } catch (const GatewayError& e) {
                log_warning("summary failed for chunk " + chunk.chunk_id + ": " + e.what());
            }
        }
    }

    std::set<std::string> chunk_ids;
    for (const auto& chunk : chunks) chunk_ids.insert(chunk.chunk_id);
    graph.check_integrity(chunk_ids);

    std::vector<std::pair<std::string, std::string>> chunk_items;
    chunk_items.reserve(chunks.size());
    for (const auto& chunk : chunks) chunk_items.emplace_back(chunk.chunk_id, chunk.text);
    stores.index_items("chunks", chunk_items);

    if (!graph.summaries.empty()) {
        std::vector<std::pair<std::string, std::string>> summary_items(graph.summaries.begin(),
                                                                       graph.summaries.end());
        stores.index_items("summaries", summary_items);
    }

    std::vector<std::pair<std::string, std::string>> node_items;
    node_items.reserve(graph.nodes.size());
    for (const auto& [id, node] : graph.nodes) {
        std::string text = node.name;
        if (!node.description.empty()) text += " " + node.description;
        node_items.emplace_back(id, std::move(text));
    }
    stores.index_items("nodes", node_items);

    stores.set_graph(std::move(graph));

    for (const auto& instance : qa_instances)
        stores.put_qa({instance.id, instance.question, instance.gold_answer,
                       instance.gold_aliases});

    stores.freeze();
}

std::vector<QuestionScore> answer_and_score(const std::vector<QAInstance>& questions,
                                            const PipelineConfig& config, Metric metric,
                                            TrialStores& stores) {
    Strategy strategy = strategy_from_name(config.search_type);
    std::vector<QuestionScore> scores;
    scores.reserve(questions.size());

    for (const auto& instance : questions) {
        QuestionScore score;
        score.instance_id = instance.id;
        score.metric = metric;
        try {
            ContextBundle bundle =
                retrieve(instance.question, strategy, static_cast<std::size_t>(config.top_k),
                         stores);
            std::string prediction =
                bundle.no_generation
                    ? bundle.rendered_context
                    : answer(instance.question, bundle, config.qa_prompt, stores.gateway());
            switch (metric) {
            case Metric::em:
                score.value = exact_match(prediction, instance.gold_answer);
                break;
            case Metric::f1:
                score.value = token_f1(prediction, instance.gold_answer);
                break;
            case Metric::correctness:
                score = llm_correctness(instance.question, prediction, instance.gold_answer,
                                        instance.gold_aliases, stores.gateway(), instance.id);
                break;
            }
        } catch (const std::exception& e) {
            score.value = 0.0;
            score.error_note = e.what();
        }
        scores.push_back(std::move(score));
    }
    return scores;
}

TrialRecord run_trial(const PipelineConfig& config, const CorpusSplit& split, Metric metric,
                      TrialStores& stores) {
    TrialRecord record;
    record.config = config;
    record.started_at = trial_clock(stores.gateway());
    try {
        build_trial_state(config, split.train, split.train, stores);
        record.per_question = answer_and_score(split.train, config, metric, stores);
        record.objective = aggregate(record.per_question);
        record.state = TrialState::complete;
    } catch (const std::exception& e) {
        log_warning("trial failed: " + std::string(e.what()));
        record.state = TrialState::failed;
        record.per_question.clear();
    }
    record.finished_at = trial_clock(stores.gateway());
    return record;
}

std::optional<double> StudyReport::relative_gain(double baseline, double optimized) {
    if (baseline == 0.0) return std::nullopt;
    return (optimized - baseline) / baseline;
}

namespace {

ScoreReport score_phase(const std::vector<QuestionScore>& scores, const StudySettings& settings,
                        std::uint64_t stream) {
    return make_score_report(scores, settings.bootstrap_resamples, settings.ci_level,
                             mix_seed(settings.bootstrap_seed, stream));
}

} // namespace

StudyReport run_study(const StudySettings& settings, bool resume, const TrialCallback& on_trial) {
    if (settings.n_trials < 1) throw Error("n_trials must be >= 1");
    metric_from_name(metric_name(settings.metric)); // metric validity is enum-backed
    settings.space.check();
    validate_config_or_throw(settings.baseline, settings.space);

    // Dataset problems must surface before trial 0.
    std::vector<QAInstance> instances = load_benchmark(settings.dataset_path, settings.adapter);
    std::set<std::string> exclusions;
    if (!settings.exclusion_list.empty())
        exclusions = load_exclusion_list(settings.exclusion_list);
    CorpusSplit split =
        make_split(instances, exclusions, settings.split_seed, settings.n_train, settings.n_test);

    TemplateRegistry registry = TemplateRegistry::with_defaults();
    if (!settings.prompts_dir.empty()) registry.load_directory(settings.prompts_dir);
    std::unique_ptr<Gateway> gateway =
        make_backend(settings.backend, settings.replay_cache, std::move(registry));
    TrialStores stores(*gateway);

    std::filesystem::create_directories(settings.output_dir);
    std::filesystem::path study_path = settings.output_dir / "study.jsonl";

    Study study;
    if (StudyLog::exists(study_path)) {
        if (!resume)
            throw Error("study log already exists: " + study_path.string() +
                        " (use resume to continue it)");
        study = StudyLog::load(study_path);
        if (study.metric != settings.metric || study.seed != settings.optimizer_seed)
            throw Error("resume settings do not match the existing study log");
    } else {
        study.study_id = settings.study_id;
        study.space = settings.space;
        study.metric = settings.metric;
        study.seed = settings.optimizer_seed;
        study.settings = settings.tpe;
    }
    StudyLog log(study_path, study);

    // Baseline evaluated first, sharing split, seeds and backend with the
    // optimized runs. One build serves both phases: the graph comes from
    // train passages regardless of which questions are answered.
    build_trial_state(settings.baseline, split.train, split.train, stores);
    std::vector<QuestionScore> baseline_train =
        answer_and_score(split.train, settings.baseline, settings.metric, stores);
    std::vector<QuestionScore> baseline_holdout =
        answer_and_score(split.test, settings.baseline, settings.metric, stores);

    while (study.trials.size() < static_cast<std::size_t>(settings.n_trials)) {
        PipelineConfig config = suggest(study);
        TrialRecord trial = run_trial(config, split, settings.metric, stores);
        if (trial.state == TrialState::complete) {
            record(study, config, trial.objective, trial.per_question, trial.started_at,
                   trial.finished_at);
        } else {
            record_failure(study, config, trial.started_at, trial.finished_at);
        }
        log.append(study.trials.back());
        if (on_trial) on_trial(study.trials.back());
    }

    const TrialRecord& best = best_trial(study);

    // Hold-out evaluation: best config, graph built from train passages only.
    build_trial_state(best.config, split.train, split.test, stores);
    std::vector<QuestionScore> optimized_holdout =
        answer_and_score(split.test, best.config, settings.metric, stores);

    StudyReport report;
    report.study_id = study.study_id;
    report.benchmark = adapter_name(settings.adapter);
    report.metric = settings.metric;
    report.best_config = best.config;
    report.best_trial_index = best.trial_index;
    report.baseline_train = score_phase(baseline_train, settings, 1);
    report.baseline_holdout = score_phase(baseline_holdout, settings, 2);
    report.optimized_train = score_phase(best.per_question, settings, 3);
    report.optimized_holdout = score_phase(optimized_holdout, settings, 4);
    for (const auto& t : study.trials)
        report.trial_points.push_back({t.trial_index, t.state, t.objective});
    report.running_max_series = running_max(study);

    emit_report(report, settings.output_dir);
    return report;
}

} // namespace graphtune
