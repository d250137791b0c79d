#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphtune/chunking.hpp"

namespace graphtune {

class Gateway;

struct FragmentEntity {
    std::string name;
    std::string entity_type;
    std::string description;
};

struct FragmentRelation {
    std::string subject_name;
    std::string predicate;
    std::string object_name;
};

/// Entities and relations extracted from one chunk. Every relation endpoint
/// names an entity present in the same fragment; violating relations are
/// dropped with a logged warning at parse time.
struct GraphFragment {
    std::vector<FragmentEntity> entities;
    std::vector<FragmentRelation> relations;
    std::string source_chunk;

    bool empty() const { return entities.empty() && relations.empty(); }
};

struct GraphNode {
    std::string node_id; // canonical name
    std::string name;    // first-seen spelling
    std::string entity_type;
    std::string description;
    std::set<std::string> provenance; // chunk ids
};

struct Triplet {
    std::string subject_id;
    std::string predicate;
    std::string object_id;
    std::set<std::string> provenance; // chunk ids (unioned on dedup)
};

struct KnowledgeGraph {
    std::map<std::string, GraphNode> nodes; // keyed by node_id
    std::vector<Triplet> triplets;
    std::map<std::string, std::string> summaries; // chunk_id -> summary text

    std::size_t node_count() const { return nodes.size(); }
    std::size_t triplet_count() const { return triplets.size(); }

    /// Throws Error if a triplet endpoint or a provenance id fails to resolve
    /// against `chunk_ids`.
    void check_integrity(const std::set<std::string>& chunk_ids) const;

    /// Same node-id set and same (subject, predicate, object) set; provenance
    /// and descriptions are not part of graph shape.
    bool isomorphic_to(const KnowledgeGraph& other) const;
};

/// Case-folds and collapses whitespace; node identity under merging.
std::string canonical_entity_name(const std::string& name);

/// Parses the fenced line-oriented extraction block:
///   ENTITY name | type | description
///   REL subject | predicate | object
/// Content outside the first fence pair is ignored; without fences the whole
/// text is parsed. Throws MalformedExtractionError on unrecognized non-empty
/// lines or REL lines without three fields.
GraphFragment parse_extraction_block(const std::string& completion);

/// Renders the extraction prompt over the chunk, requests a completion, and
/// parses the fragment. Parse failures are retried up to `parse_retries`
/// attempts in total; when exhausted the chunk contributes an empty fragment
/// and the trial continues. Gateway errors propagate.
GraphFragment extract_graph_fragment(const Chunk& chunk, const std::string& graph_prompt,
                                     Gateway& gateway, int parse_retries = 2);

/// One summary string for the chunk via the summarization template.
std::string summarize_chunk(const Chunk& chunk, Gateway& gateway);

/// Merges fragments (in the given order) into a single graph: entity names
/// are canonicalized, identical names merge with unioned provenance and
/// first-seen description, duplicate triplets merge with unioned provenance.
KnowledgeGraph merge_fragments(const std::vector<GraphFragment>& fragments);

/// Warning sink for non-fatal pipeline notices (stderr; silenced when
/// GT_QUIET=1).
void log_warning(const std::string& message);

} // namespace graphtune
