#include "graphtune/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

void log_warning(const std::string& message) {
    const char* quiet = std::getenv("GT_QUIET");
    if (quiet && std::string(quiet) == "1") return;
    std::cerr << "[graphtune] warning: " << message << "\n";
}

std::string canonical_entity_name(const std::string& name) {
    return collapse_whitespace(ascii_lower(name));
}

void KnowledgeGraph::check_integrity(const std::set<std::string>& chunk_ids) const {
    for (const auto& t : triplets) {
        if (!nodes.count(t.subject_id))
            throw Error("triplet subject does not resolve: " + t.subject_id);
        if (!nodes.count(t.object_id))
            throw Error("triplet object does not resolve: " + t.object_id);
        for (const auto& chunk : t.provenance)
            if (!chunk_ids.count(chunk))
                throw Error("triplet provenance does not resolve: " + chunk);
    }
    for (const auto& [id, node] : nodes)
        for (const auto& chunk : node.provenance)
            if (!chunk_ids.count(chunk))
                throw Error("node provenance does not resolve: " + chunk);
}

bool KnowledgeGraph::isomorphic_to(const KnowledgeGraph& other) const {
    if (nodes.size() != other.nodes.size() || triplets.size() != other.triplets.size())
        return false;
    for (const auto& [id, node] : nodes)
        if (!other.nodes.count(id)) return false;

    auto edge_set = [](const KnowledgeGraph& g) {
        std::set<std::tuple<std::string, std::string, std::string>> edges;
        for (const auto& t : g.triplets) edges.insert({t.subject_id, t.predicate, t.object_id});
        return edges;
    };
    return edge_set(*this) == edge_set(other);
}

namespace {

std::string trim(std::string_view text) {
    std::size_t start = text.find_first_not_of(" \t\r");
    if (start == std::string_view::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(start, end - start + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t bar = line.find('|', start);
        if (bar == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, bar - start)));
        start = bar + 1;
    }
    return fields;
}

// Content between the first pair of ``` fences, or the whole text when
// unfenced.
std::string fenced_content(const std::string& text) {
    std::size_t open = text.find("```");
    if (open == std::string::npos) return text;
    std::size_t body_start = text.find('\n', open);
    if (body_start == std::string::npos) return "";
    ++body_start;
    std::size_t close = text.find("```", body_start);
    if (close == std::string::npos) return text.substr(body_start);
    return text.substr(body_start, close - body_start);
}

} // namespace

GraphFragment parse_extraction_block(const std::string& completion) {
    GraphFragment fragment;
    std::set<std::string> entity_names;

    std::string body = fenced_content(completion);
    std::size_t pos = 0;
    std::size_t dropped_relations = 0;
    std::vector<FragmentRelation> pending;

    while (pos <= body.size()) {
        std::size_t end = body.find('\n', pos);
        if (end == std::string::npos) end = body.size();
        std::string line = trim(std::string_view(body).substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) {
            if (pos > body.size()) break;
            continue;
        }
        if (line.rfind("ENTITY ", 0) == 0) {
            std::vector<std::string> fields = split_fields(std::string_view(line).substr(7));
            if (fields.empty() || fields[0].empty())
                throw MalformedExtractionError("ENTITY line without a name");
            FragmentEntity entity;
            entity.name = fields[0];
            entity.entity_type = fields.size() > 1 ? fields[1] : "entity";
            entity.description = fields.size() > 2 ? fields[2] : "";
            entity_names.insert(canonical_entity_name(entity.name));
            fragment.entities.push_back(std::move(entity));
        } else if (line.rfind("REL ", 0) == 0) {
            std::vector<std::string> fields = split_fields(std::string_view(line).substr(4));
            if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
                throw MalformedExtractionError("REL line needs subject | predicate | object");
            pending.push_back({fields[0], fields[1], fields[2]});
        } else {
            throw MalformedExtractionError("unrecognized line: " + line);
        }
        if (pos > body.size()) break;
    }

    for (auto& relation : pending) {
        if (entity_names.count(canonical_entity_name(relation.subject_name)) &&
            entity_names.count(canonical_entity_name(relation.object_name))) {
            fragment.relations.push_back(std::move(relation));
        } else {
            ++dropped_relations;
        }
    }
    if (dropped_relations > 0)
        log_warning(std::to_string(dropped_relations) +
                    " relation(s) referenced unknown entities and were dropped");
    return fragment;
}

GraphFragment extract_graph_fragment(const Chunk& chunk, const std::string& graph_prompt,
                                     Gateway& gateway, int parse_retries) {
    CompletionRequest request;
    request.role = TemplateRole::graph_extraction;
    request.template_id = graph_prompt;
    request.variables = {{"text", chunk.text}};

    for (int attempt = 0; attempt < std::max(parse_retries, 1); ++attempt) {
        std::string completion = gateway.complete(request); // GatewayError propagates
        try {
            GraphFragment fragment = parse_extraction_block(completion);
            fragment.source_chunk = chunk.chunk_id;
            return fragment;
        } catch (const MalformedExtractionError&) {
            // retry
        }
    }
    log_warning("extraction stayed malformed after retries; chunk " + chunk.chunk_id +
                " contributes an empty fragment");
    GraphFragment empty;
    empty.source_chunk = chunk.chunk_id;
    return empty;
}

std::string summarize_chunk(const Chunk& chunk, Gateway& gateway) {
    CompletionRequest request;
    request.role = TemplateRole::summarization;
    request.template_id = "default";
    request.variables = {{"text", chunk.text}};
    return gateway.complete(request);
}

KnowledgeGraph merge_fragments(const std::vector<GraphFragment>& fragments) {
    KnowledgeGraph graph;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> triplet_index;

    for (const auto& fragment : fragments) {
        for (const auto& entity : fragment.entities) {
            std::string id = canonical_entity_name(entity.name);
            auto [it, inserted] = graph.nodes.try_emplace(id);
            GraphNode& node = it->second;
            if (inserted) {
                node.node_id = id;
                node.name = entity.name;
                node.entity_type = entity.entity_type;
                node.description = entity.description;
            } else if (node.description.empty() && !entity.description.empty()) {
                node.description = entity.description;
            }
            if (!fragment.source_chunk.empty()) node.provenance.insert(fragment.source_chunk);
        }
        for (const auto& relation : fragment.relations) {
            std::string subject = canonical_entity_name(relation.subject_name);
            std::string object = canonical_entity_name(relation.object_name);
            if (!graph.nodes.count(subject) || !graph.nodes.count(object)) continue;
            auto key = std::make_tuple(subject, relation.predicate, object);
            auto it = triplet_index.find(key);
            if (it == triplet_index.end()) {
                Triplet triplet;
                triplet.subject_id = std::move(subject);
                triplet.predicate = relation.predicate;
                triplet.object_id = std::move(object);
                if (!fragment.source_chunk.empty())
                    triplet.provenance.insert(fragment.source_chunk);
                triplet_index.emplace(key, graph.triplets.size());
                graph.triplets.push_back(std::move(triplet));
            } else if (!fragment.source_chunk.empty()) {
                graph.triplets[it->second].provenance.insert(fragment.source_chunk);
            }
        }
    }
    return graph;
}

} // namespace graphtune
