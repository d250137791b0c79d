#pragma once

#include <string>
#include <vector>

#include "graphtune/stores.hpp"

namespace graphtune {

/// The retriever taxonomy. Only chunk_completion and graph_completion are
/// legal inside the optimization search space; the other four are available
/// for ad-hoc runs through the CLI.
enum class Strategy {
    chunk_completion,         // top-k chunk hits passed to the model
    graph_completion,         // node hits expanded to graph triplets
    summary_based,            // top-k chunk-summary hits
    chunk_direct,             // chunk hits returned without generation
    graph_neighborhood,       // best node hit's incident triplets, no generation
    graph_summary_completion, // triplets summarized before answering
};

Strategy strategy_from_name(const std::string& name); // throws Error
std::string strategy_name(Strategy strategy);

struct ContextBundle {
    Strategy strategy = Strategy::chunk_completion;
    std::vector<std::pair<std::string, std::string>> items; // (item_id, rendered text)
    std::string rendered_context; // items joined with the separator line
    bool no_generation = false;
    std::string warning; // set when the source store was empty
};

/// Separator between context items (a line of three dashes; fixed for golden
/// tests).
inline constexpr const char* kContextSeparator = "\n---\n";

/// Selects context for a question over frozen stores. An empty source store
/// is surfaced as an empty bundle with a warning, never an exception, so the
/// trial can still record a score.
ContextBundle retrieve(const std::string& question, Strategy strategy, std::size_t top_k,
                       const TrialStores& stores);

/// `<subject> —[<predicate>]→ <object> :: <subject description> | <object
/// description>`, descriptions truncated at 30 tokens.
std::string format_triplet(const Triplet& triplet, const KnowledgeGraph& graph);

/// Renders the qa template with {question, context} and returns the trimmed
/// completion. Must not be called on no-generation bundles.
std::string answer(const std::string& question, const ContextBundle& bundle,
                   const std::string& qa_prompt, Gateway& gateway);

} // namespace graphtune
