#include "graphtune/stores.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <nlohmann/json.hpp>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"

namespace graphtune {

Embedding Embedding::of(std::vector<double> v) {
    Embedding e;
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    e.vector = std::move(v);
    e.norm = std::sqrt(norm_sq);
    return e;
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double dot = 0.0;
    const std::size_t n = std::min(a.vector.size(), b.vector.size());
    for (std::size_t i = 0; i < n; ++i) dot += a.vector[i] * b.vector[i];
    return dot / (a.norm * b.norm);
}

namespace {

bool known_collection(const std::string& name) {
    return name == "chunks" || name == "summaries" || name == "nodes";
}

} // namespace

TrialStores::TrialStores(Gateway& gateway, std::size_t embed_dim)
    : gateway_(gateway), embed_dim_(embed_dim) {
    reset_all();
}

void TrialStores::reset_all() {
    collections_.clear();
    for (const char* name : {"chunks", "summaries", "nodes"}) collections_[name] = {};
    graph_ = {};
    metadata_.clear();
    frozen_ = false;
}

Embedding TrialStores::embed(const std::string& text) const {
    std::vector<double> v = gateway_.embed_text(text);
    if (v.size() != embed_dim_)
        throw Error("embedding dimension changed mid-study: got " + std::to_string(v.size()) +
                    ", expected " + std::to_string(embed_dim_));
    return Embedding::of(std::move(v));
}

const TrialStores::Collection& TrialStores::collection_ref(const std::string& name) const {
    auto it = collections_.find(name);
    if (it == collections_.end()) throw UnknownCollectionError(name);
    return it->second;
}

TrialStores::Collection& TrialStores::writable_collection(const std::string& name) {
    if (!known_collection(name)) throw UnknownCollectionError(name);
    if (frozen_) throw Error("stores are frozen; reset_all() before writing");
    return collections_[name];
}

void TrialStores::index_items(const std::string& collection,
                              const std::vector<std::pair<std::string, std::string>>& items) {
    Collection& c = writable_collection(collection);
    for (const auto& [id, text] : items) {
        if (c.index.count(id)) throw DuplicateIdError(collection, id);
        c.index.emplace(id, c.ids.size());
        c.ids.push_back(id);
        c.texts.push_back(text);
        c.embeddings.push_back(embed(text));
    }
}

std::vector<VectorHit> TrialStores::vector_search(const std::string& collection,
                                                  const std::string& query, std::size_t k) const {
    if (k < 1) throw Error("vector_search requires k >= 1");
    const Collection& c = collection_ref(collection);
    // Exact linear scan; desk-scale collections make approximate indexes
    // unnecessary and exactness keeps the tie-break fully deterministic.
    Embedding q = embed(query);

    std::vector<VectorHit> hits;
    hits.reserve(c.ids.size());
    for (std::size_t i = 0; i < c.ids.size(); ++i)
        hits.push_back({c.ids[i], collection, cosine(q, c.embeddings[i])});
    std::sort(hits.begin(), hits.end(), [](const VectorHit& a, const VectorHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::size_t TrialStores::collection_size(const std::string& collection) const {
    return collection_ref(collection).ids.size();
}

std::vector<std::string> TrialStores::collection_ids(const std::string& collection) const {
    return collection_ref(collection).ids;
}

const std::string* TrialStores::item_text(const std::string& collection,
                                          const std::string& item_id) const {
    const Collection& c = collection_ref(collection);
    auto it = c.index.find(item_id);
    if (it == c.index.end()) return nullptr;
    return &c.texts[it->second];
}

void TrialStores::set_graph(KnowledgeGraph graph) {
    if (frozen_) throw Error("stores are frozen; reset_all() before writing");
    graph_ = std::move(graph);
}

std::vector<Triplet> TrialStores::neighborhood(const std::string& node_id, int radius) const {
    if (radius < 1) throw Error("neighborhood radius must be >= 1");
    if (!graph_.nodes.count(node_id)) throw UnknownNodeError(node_id);

    // Undirected adjacency over triplets.
    std::map<std::string, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < graph_.triplets.size(); ++i) {
        incident[graph_.triplets[i].subject_id].push_back(i);
        incident[graph_.triplets[i].object_id].push_back(i);
    }

    // Nodes within distance radius-1 of the start.
    std::map<std::string, int> distance{{node_id, 0}};
    std::deque<std::string> frontier{node_id};
    while (!frontier.empty()) {
        std::string current = frontier.front();
        frontier.pop_front();
        int d = distance[current];
        if (d >= radius - 1) continue;
        auto it = incident.find(current);
        if (it == incident.end()) continue;
        for (std::size_t ti : it->second) {
            const Triplet& t = graph_.triplets[ti];
            for (const std::string& next : {t.subject_id, t.object_id}) {
                if (!distance.count(next)) {
                    distance.emplace(next, d + 1);
                    frontier.push_back(next);
                }
            }
        }
    }

    std::vector<Triplet> result;
    for (const auto& t : graph_.triplets)
        if (distance.count(t.subject_id) || distance.count(t.object_id)) result.push_back(t);
    std::sort(result.begin(), result.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.subject_id, a.predicate, a.object_id) <
               std::tie(b.subject_id, b.predicate, b.object_id);
    });
    return result;
}

void TrialStores::put_qa(QARow row) {
    if (frozen_) throw Error("stores are frozen; reset_all() before writing");
    std::string id = row.instance_id;
    metadata_[std::move(id)] = std::move(row);
}

const QARow* TrialStores::qa_row(const std::string& instance_id) const {
    auto it = metadata_.find(instance_id);
    return it == metadata_.end() ? nullptr : &it->second;
}

std::string TrialStores::snapshot() const {
    nlohmann::ordered_json j;
    j["format"] = "graphtune-snapshot";
    j["version"] = 1;
    j["embed_dim"] = embed_dim_;

    nlohmann::ordered_json cols;
    for (const auto& [name, c] : collections_) {
        nlohmann::ordered_json items = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < c.ids.size(); ++i) {
            nlohmann::ordered_json item;
            item["id"] = c.ids[i];
            item["text"] = c.texts[i];
            item["embedding"] = c.embeddings[i].vector;
            items.push_back(std::move(item));
        }
        cols[name] = std::move(items);
    }
    j["collections"] = std::move(cols);

    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& [id, node] : graph_.nodes) {
        nlohmann::ordered_json n;
        n["node_id"] = node.node_id;
        n["name"] = node.name;
        n["entity_type"] = node.entity_type;
        n["description"] = node.description;
        n["provenance"] = node.provenance;
        nodes.push_back(std::move(n));
    }
    j["graph"]["nodes"] = std::move(nodes);

    nlohmann::ordered_json triplets = nlohmann::ordered_json::array();
    for (const auto& t : graph_.triplets) {
        nlohmann::ordered_json e;
        e["subject"] = t.subject_id;
        e["predicate"] = t.predicate;
        e["object"] = t.object_id;
        e["provenance"] = t.provenance;
        triplets.push_back(std::move(e));
    }
    j["graph"]["triplets"] = std::move(triplets);
    j["graph"]["summaries"] = graph_.summaries;

    nlohmann::ordered_json qa = nlohmann::ordered_json::array();
    for (const auto& [id, row] : metadata_) {
        nlohmann::ordered_json r;
        r["instance_id"] = row.instance_id;
        r["question"] = row.question;
        r["gold_answer"] = row.gold_answer;
        r["aliases"] = row.aliases;
        qa.push_back(std::move(r));
    }
    j["metadata"] = std::move(qa);

    return j.dump(2);
}

} // namespace graphtune
