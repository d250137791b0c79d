#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace graphtune {

// Canonical vocabulary of the tunable space. Strategy and template names are
// symbolic; templates resolve against the gateway registry.
inline constexpr const char* kSearchChunkCompletion = "chunk_completion";
inline constexpr const char* kSearchGraphCompletion = "graph_completion";
inline constexpr const char* kTaskWithSummaries = "with_summaries";
inline constexpr const char* kTaskWithoutSummaries = "without_summaries";

/// One categorical dimension: an ordered, duplicate-free list of symbols.
struct CategoricalDimension {
    std::string name;
    std::vector<std::string> values;

    bool contains(const std::string& v) const;
    std::string bounds_text() const;
};

/// One ordered-integer dimension. `step` defines the sampling grid used by the
/// optimizer (values low, low+step, ...), while validation only requires
/// low <= v <= high, so hand-picked off-grid values remain legal.
struct IntegerDimension {
    std::string name;
    std::int64_t low = 0;
    std::int64_t high = 0;
    std::int64_t step = 1;

    bool contains(std::int64_t v) const { return v >= low && v <= high; }
    std::size_t grid_size() const;
    std::int64_t grid_value(std::size_t index) const;
    /// Index of the grid cell whose center is nearest to v (v clamped to range).
    std::size_t nearest_cell(std::int64_t v) const;
    std::string bounds_text() const;
};

using Dimension = std::variant<CategoricalDimension, IntegerDimension>;

const std::string& dimension_name(const Dimension& d);

/// The tunable space: an ordered list of named dimensions.
struct SearchSpace {
    std::vector<Dimension> dimensions;

    const Dimension* find(const std::string& name) const;
    /// Throws Error if names collide, a categorical list is empty or has
    /// duplicates, or an integer range has low > high.
    void check() const;

    nlohmann::ordered_json to_json() const;
    static SearchSpace from_json(const nlohmann::json& j);
};

/// One point in the six-dimensional space; fully determines a trial.
struct PipelineConfig {
    std::int64_t chunk_size = 0;
    std::string search_type;
    std::int64_t top_k = 0;
    std::string qa_prompt;
    std::string graph_prompt;
    std::string task_getter;

    bool operator==(const PipelineConfig&) const = default;

    nlohmann::ordered_json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

/// A single field value; integer dimensions carry int64, categorical carry the
/// symbol. Used by the optimizer to treat configs dimension-by-dimension.
using ConfigValue = std::variant<std::int64_t, std::string>;

ConfigValue get_field(const PipelineConfig& config, const std::string& name);
void set_field(PipelineConfig& config, const std::string& name, const ConfigValue& value);
std::string config_value_text(const ConfigValue& v);

struct ValidationResult {
    bool ok = true;
    std::string field;   // offending field when !ok
    std::string message; // names the field and its bounds

    explicit operator bool() const { return ok; }
};

/// The six-dimension space of the tunable parameters, in canonical order
/// (chunk_size, search_type, top_k, qa_prompt, graph_prompt, task_getter).
SearchSpace default_search_space();

/// The fixed untuned configuration. The constants are frozen artifact choices:
/// chunk_size=1024, search_type=chunk_completion, top_k=5, qa_prompt=default
/// (the conversational variant), graph_prompt=default, task_getter=with_summaries.
PipelineConfig baseline_config();

/// Accepts iff every field lies inside the corresponding dimension of `space`.
ValidationResult validate_config(const PipelineConfig& config, const SearchSpace& space);

/// Same check, throwing OutOfDomainError / UnknownTemplateError on rejection.
void validate_config_or_throw(const PipelineConfig& config, const SearchSpace& space);

} // namespace graphtune
