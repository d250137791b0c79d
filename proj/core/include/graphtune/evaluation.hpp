#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace graphtune {

class Gateway;

enum class Metric { em, f1, correctness };

Metric metric_from_name(const std::string& name); // throws Error on unknown name
std::string metric_name(Metric m);

struct QuestionScore {
    std::string instance_id;
    Metric metric = Metric::f1;
    double value = 0.0; // in [0,1]; em values are 0 or 1
    std::string error_note;

    nlohmann::ordered_json to_json() const;
    static QuestionScore from_json(const nlohmann::json& j);
};

struct ScoreReport {
    Metric metric = Metric::f1;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int resamples = 0;
    std::vector<QuestionScore> per_question;

    nlohmann::ordered_json to_json() const;
    static ScoreReport from_json(const nlohmann::json& j);
};

/// QA answer normalization: case-fold, strip punctuation characters, drop the
/// articles a/an/the as whole tokens, collapse whitespace. Idempotent.
std::string normalize_answer(std::string_view text);

/// 1 iff the normalized strings are equal.
int exact_match(std::string_view pred, std::string_view gold);

/// Token-multiset F1 over normalized tokens. Both empty -> 1.0, exactly one
/// empty -> 0.0.
double token_f1(std::string_view pred, std::string_view gold);

/// LLM-graded correctness in [0,1]: renders the grading template, parses the
/// first decimal literal from the completion (clamped to [0,1]); one retry on
/// parse failure, then 0 with an error note. Gateway failures also score 0
/// with a note so a trial never aborts.
QuestionScore llm_correctness(const std::string& question, const std::string& pred,
                              const std::string& gold, const std::vector<std::string>& aliases,
                              Gateway& gateway, const std::string& instance_id = "",
                              const std::string& grading_template = "default");

/// Arithmetic mean of a non-empty, single-metric score list.
double aggregate(const std::vector<QuestionScore>& per_question);

/// Percentile bootstrap over the values: `resamples` draws-with-replacement of
/// |values| items, mean of each, then the (1-level)/2 and 1-(1-level)/2
/// percentiles with linear interpolation. Deterministic given the seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& values, int resamples,
                                       double level, std::uint64_t seed);

/// Bundles mean + CI + breakdown for a scored question set.
ScoreReport make_score_report(const std::vector<QuestionScore>& per_question, int resamples,
                              double level, std::uint64_t seed);

/// Parses the first decimal literal in text, if any.
std::optional<double> parse_first_decimal(std::string_view text);

} // namespace graphtune
