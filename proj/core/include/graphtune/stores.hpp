#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphtune/graph.hpp"

namespace graphtune {

class Gateway;

struct Embedding {
    std::vector<double> vector;
    double norm = 0.0; // Euclidean length

    static Embedding of(std::vector<double> v);
};

/// Cosine similarity; zero when either vector has zero norm.
double cosine(const Embedding& a, const Embedding& b);

struct VectorHit {
    std::string item_id;
    std::string collection;
    double score = 0.0; // cosine similarity in [-1, 1]
};

struct QARow {
    std::string instance_id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> aliases;
};

/// Trial-scoped storage: the merged knowledge graph, exact-cosine vector
/// collections (chunks | summaries | nodes), and a metadata table of QA pairs.
/// Single writer during the build phase; freeze() then allows unlimited
/// concurrent readers. reset_all() requires exclusive access and restores the
/// pristine state.
class TrialStores {
public:
    explicit TrialStores(Gateway& gateway, std::size_t embed_dim = 256);

    /// Empties the graph store, every vector collection, and the metadata
    /// table. Idempotent.
    void reset_all();

    /// Embeds text through the gateway (mock backend: deterministic
    /// feature-hash vector). Touches only the gateway, not store state.
    Embedding embed(const std::string& text) const;

    /// Embeds and stores items; ids must be new within the collection.
    void index_items(const std::string& collection,
                     const std::vector<std::pair<std::string, std::string>>& items);

    /// Top-k by cosine similarity, ties broken by item_id ascending;
    /// |result| = min(k, collection size).
    std::vector<VectorHit> vector_search(const std::string& collection, const std::string& query,
                                         std::size_t k) const;

    std::size_t collection_size(const std::string& collection) const;
    std::vector<std::string> collection_ids(const std::string& collection) const;
    /// nullptr when the id is not indexed.
    const std::string* item_text(const std::string& collection, const std::string& item_id) const;

    void set_graph(KnowledgeGraph graph);
    const KnowledgeGraph& graph() const { return graph_; }

    /// All triplets whose subject or object lies within graph distance
    /// radius-1 of node_id (radius 1 = incident triplets), ordered by
    /// (subject_id, predicate, object_id).
    std::vector<Triplet> neighborhood(const std::string& node_id, int radius = 1) const;

    void put_qa(QARow row);
    std::size_t metadata_count() const { return metadata_.size(); }
    const QARow* qa_row(const std::string& instance_id) const;

    void freeze() { frozen_ = true; }
    bool is_frozen() const { return frozen_; }

    /// Self-describing structured-text dump (versioned); test- and
    /// dashboard-only surface.
    std::string snapshot() const;

    Gateway& gateway() const { return gateway_; }

private:
    struct Collection {
        std::vector<std::string> ids; // insertion order
        std::vector<std::string> texts;
        std::vector<Embedding> embeddings;
        std::map<std::string, std::size_t> index;
    };

    const Collection& collection_ref(const std::string& name) const;
    Collection& writable_collection(const std::string& name);

    Gateway& gateway_;
    std::size_t embed_dim_;
    std::map<std::string, Collection> collections_;
    KnowledgeGraph graph_;
    std::map<std::string, QARow> metadata_;
    bool frozen_ = false;
};

} // namespace graphtune
