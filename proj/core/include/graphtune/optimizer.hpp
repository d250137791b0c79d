#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graphtune/config_space.hpp"
#include "graphtune/evaluation.hpp"
#include "graphtune/rng.hpp"

namespace graphtune {

enum class TrialState { complete, failed };

struct TrialRecord {
    int trial_index = 0;
    PipelineConfig config;
    double objective = 0.0; // meaningful iff state == complete
    std::vector<QuestionScore> per_question;
    std::int64_t started_at = 0; // logical clock under deterministic backends
    std::int64_t finished_at = 0;
    TrialState state = TrialState::complete;

    nlohmann::ordered_json to_json() const;
    static TrialRecord from_json(const nlohmann::json& j);
};

/// TPE hyperparameters. The defaults follow common reference values; the
/// study configuration file can override them.
struct TpeSettings {
    int n_startup = 10;       // uniform random trials before the model kicks in
    double gamma = 0.25;      // good-group quantile
    int n_candidates = 24;    // samples drawn from l per dimension
    double prior_weight = 1.0;
};

/// Optimizer state: the space, the scored trial history, and the sampler
/// settings. Trials are append-only and densely indexed from 0.
struct Study {
    std::string study_id;
    SearchSpace space;
    Metric metric = Metric::f1;
    std::uint64_t seed = 0;
    std::vector<TrialRecord> trials;
    TpeSettings settings;
    bool closed = false;

    std::size_t completed_count() const;
};

/// Draws one in-space config uniformly (each dimension independent). Integer
/// dimensions sample on their step grid. Also the random-search baseline.
PipelineConfig sample_uniform_config(const SearchSpace& space, Rng& rng);

/// Proposes the next configuration. Before n_startup completed trials this is
/// a seeded uniform draw; afterwards the completed trials are split per
/// dimension into good (top ceil(gamma*n) by objective, ties by trial index)
/// and bad, densities l and g are fit to the groups, n_candidates samples are
/// drawn from l, and the candidate maximizing l(x)/g(x) wins. The result
/// always validates against the study space. Deterministic given (space,
/// seed, recorded history).
PipelineConfig suggest(const Study& study);

/// Parzen estimator for a categorical dimension:
/// p(c) = (prior_weight + count(c)) / (prior_weight * |domain| + |group|).
std::vector<double> categorical_density(const std::vector<std::string>& group,
                                        const std::vector<std::string>& domain,
                                        double prior_weight);

/// Parzen mixture over the integer grid of `dim`: one uniform prior component
/// plus one truncated Gaussian per observation (bandwidth
/// max(step, (high-low)/sqrt(n+1))), equal component weights, each cell mass
/// integrated over its unit grid cell so the masses sum to 1.
std::vector<double> numeric_density(const std::vector<std::int64_t>& group,
                                    const IntegerDimension& dim);

/// Appends a complete trial. Throws OutOfDomainError / Error on an off-space
/// config or an objective outside [0,1], StudyClosedError when closed.
void record(Study& study, const PipelineConfig& config, double objective,
            std::vector<QuestionScore> per_question, std::int64_t started_at,
            std::int64_t finished_at);

/// Appends a failed trial (no objective; excluded from density estimation).
void record_failure(Study& study, const PipelineConfig& config, std::int64_t started_at,
                    std::int64_t finished_at);

/// Maximal objective, ties broken by lowest trial index.
const TrialRecord& best_trial(const Study& study);

/// Best-so-far objective per trial index; failed trials carry the previous
/// maximum (leading failures, having none, are skipped).
std::vector<std::pair<int, double>> running_max(const Study& study);

/// Append-only study persistence: `study.jsonl` with a versioned header line
/// and one record per trial, guarded by a lock file so exactly one process
/// writes a study.
class StudyLog {
public:
    /// Opens for append, creating the file (and writing the header) if new.
    /// Throws Error if the lock is already held.
    StudyLog(std::filesystem::path path, const Study& study);
    ~StudyLog();

    StudyLog(const StudyLog&) = delete;
    StudyLog& operator=(const StudyLog&) = delete;

    void append(const TrialRecord& record);
    const std::filesystem::path& path() const { return path_; }

    /// Reads a study back from disk (header + records). No lock is taken.
    static Study load(const std::filesystem::path& path);
    static bool exists(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::filesystem::path lock_path_;
};

} // namespace graphtune
