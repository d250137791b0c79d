#include "graphtune/retrieval.hpp"

#include <algorithm>
#include <set>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

Strategy strategy_from_name(const std::string& name) {
    if (name == "chunk_completion") return Strategy::chunk_completion;
    if (name == "graph_completion") return Strategy::graph_completion;
    if (name == "summary_based") return Strategy::summary_based;
    if (name == "chunk_direct") return Strategy::chunk_direct;
    if (name == "graph_neighborhood") return Strategy::graph_neighborhood;
    if (name == "graph_summary_completion") return Strategy::graph_summary_completion;
    throw Error("unknown retrieval strategy: " + name);
}

std::string strategy_name(Strategy strategy) {
    switch (strategy) {
    case Strategy::chunk_completion: return "chunk_completion";
    case Strategy::graph_completion: return "graph_completion";
    case Strategy::summary_based: return "summary_based";
    case Strategy::chunk_direct: return "chunk_direct";
    case Strategy::graph_neighborhood: return "graph_neighborhood";
    case Strategy::graph_summary_completion: return "graph_summary_completion";
    }
    return "chunk_completion";
}

std::string format_triplet(const Triplet& triplet, const KnowledgeGraph& graph) {
    auto subject = graph.nodes.find(triplet.subject_id);
    auto object = graph.nodes.find(triplet.object_id);
    if (subject == graph.nodes.end() || object == graph.nodes.end())
        throw Error("format_triplet endpoints do not resolve");
    const std::string subject_desc = truncate_tokens(subject->second.description, 30);
    const std::string object_desc = truncate_tokens(object->second.description, 30);
    return subject->second.name + " —[" + triplet.predicate + "]→ " +
           object->second.name + " :: " + subject_desc + " | " + object_desc;
}

namespace {

std::string triplet_item_id(const Triplet& t) {
    return t.subject_id + "|" + t.predicate + "|" + t.object_id;
}

void finish(ContextBundle& bundle) {
    std::string joined;
    for (std::size_t i = 0; i < bundle.items.size(); ++i) {
        if (i) joined += kContextSeparator;
        joined += bundle.items[i].second;
    }
    bundle.rendered_context = std::move(joined);
}

ContextBundle empty_bundle(Strategy strategy, const std::string& what) {
    ContextBundle bundle;
    bundle.strategy = strategy;
    bundle.warning = what;
    log_warning(what + " (strategy " + strategy_name(strategy) + "); answering on empty context");
    return bundle;
}

// Hits from the plain text collections, rendered as their stored texts.
ContextBundle text_collection_bundle(Strategy strategy, const std::string& collection,
                                     const std::string& question, std::size_t top_k,
                                     const TrialStores& stores) {
    if (stores.collection_size(collection) == 0)
        return empty_bundle(strategy, "no indexed items in collection '" + collection + "'");
    ContextBundle bundle;
    bundle.strategy = strategy;
    for (const auto& hit : stores.vector_search(collection, question, top_k))
        bundle.items.emplace_back(hit.item_id, *stores.item_text(collection, hit.item_id));
    finish(bundle);
    return bundle;
}

// Node hits expanded to their radius-1 triplets, in hit order, deduplicated,
// truncated to top_k triplets. Node ranking uses the node-description
// embedding index; dedup keeps the first occurrence so similarity order is
// preserved.
std::vector<Triplet> expand_node_hits(const std::string& question, std::size_t node_k,
                                      std::size_t max_triplets, const TrialStores& stores) {
    std::vector<Triplet> collected;
    std::set<std::string> seen;
    for (const auto& hit : stores.vector_search("nodes", question, node_k)) {
        for (const auto& triplet : stores.neighborhood(hit.item_id, 1)) {
            if (!seen.insert(triplet_item_id(triplet)).second) continue;
            collected.push_back(triplet);
            if (collected.size() == max_triplets) return collected;
        }
    }
    return collected;
}

ContextBundle graph_completion_bundle(Strategy strategy, const std::string& question,
                                      std::size_t top_k, const TrialStores& stores) {
    if (stores.collection_size("nodes") == 0)
        return empty_bundle(strategy, "no indexed graph nodes");
    std::vector<Triplet> triplets = expand_node_hits(question, top_k, top_k, stores);
    if (triplets.empty()) return empty_bundle(strategy, "graph has no triplets near the query");
    ContextBundle bundle;
    bundle.strategy = strategy;
    for (const auto& triplet : triplets)
        bundle.items.emplace_back(triplet_item_id(triplet), format_triplet(triplet, stores.graph()));
    finish(bundle);
    return bundle;
}

} // namespace

ContextBundle retrieve(const std::string& question, Strategy strategy, std::size_t top_k,
                       const TrialStores& stores) {
    if (top_k < 1) throw Error("retrieve requires top_k >= 1");

    switch (strategy) {
    case Strategy::chunk_completion:
        return text_collection_bundle(strategy, "chunks", question, top_k, stores);

    case Strategy::graph_completion:
        return graph_completion_bundle(strategy, question, top_k, stores);

    case Strategy::summary_based:
        return text_collection_bundle(strategy, "summaries", question, top_k, stores);

    case Strategy::chunk_direct: {
        ContextBundle bundle = text_collection_bundle(strategy, "chunks", question, top_k, stores);
        bundle.no_generation = true;
        return bundle;
    }

    case Strategy::graph_neighborhood: {
        if (stores.collection_size("nodes") == 0)
            return empty_bundle(strategy, "no indexed graph nodes");
        std::vector<Triplet> triplets = expand_node_hits(question, 1, top_k, stores);
        if (triplets.empty()) return empty_bundle(strategy, "matched node has no triplets");
        ContextBundle bundle;
        bundle.strategy = strategy;
        bundle.no_generation = true;
        for (const auto& triplet : triplets)
            bundle.items.emplace_back(triplet_item_id(triplet),
                                      format_triplet(triplet, stores.graph()));
        finish(bundle);
        return bundle;
    }

    case Strategy::graph_summary_completion: {
        ContextBundle expanded = graph_completion_bundle(strategy, question, top_k, stores);
        if (expanded.items.empty()) return expanded;
        CompletionRequest request;
        request.role = TemplateRole::summarization;
        request.template_id = "default";
        request.variables = {{"text", expanded.rendered_context}};
        std::string summary = stores.gateway().complete(request);
        ContextBundle bundle;
        bundle.strategy = strategy;
        bundle.items.emplace_back("graph_summary", std::move(summary));
        finish(bundle);
        return bundle;
    }
    }
    throw Error("unhandled strategy");
}

std::string answer(const std::string& question, const ContextBundle& bundle,
                   const std::string& qa_prompt, Gateway& gateway) {
    if (bundle.no_generation)
        throw Error("answer() called on a no-generation bundle; score the retrieved text instead");
    CompletionRequest request;
    request.role = TemplateRole::qa_system;
    request.template_id = qa_prompt;
    request.variables = {{"question", question}, {"context", bundle.rendered_context}};
    std::string completion = gateway.complete(request);

    std::size_t start = completion.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return "";
    std::size_t end = completion.find_last_not_of(" \t\r\n");
    return completion.substr(start, end - start + 1);
}

} // namespace graphtune
