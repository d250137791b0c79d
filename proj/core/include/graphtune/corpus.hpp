#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace graphtune {

struct Passage {
    std::string title;
    std::string body;

    bool operator==(const Passage&) const = default;
};

struct QAInstance {
    std::string id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> gold_aliases; // extra accepted answers, grader only
    std::vector<Passage> passages;
};

struct CorpusSplit {
    std::vector<QAInstance> train;
    std::vector<QAInstance> test;
    std::uint64_t seed = 0;
    std::set<std::string> exclusion_ids;
};

struct CorpusDocument {
    std::string doc_id;
    std::string title;
    std::string text;
    std::string content_hash; // stable digest of the passage text
};

enum class DatasetAdapter { hotpotqa, twowiki, musique };

DatasetAdapter adapter_from_name(const std::string& name); // throws UnknownAdapterError
std::string adapter_name(DatasetAdapter adapter);

/// Loads a benchmark file under the named adapter. hotpotqa/twowiki files are
/// JSON arrays with `_id`, `question`, `answer` and `context` as
/// [title, [sentence, ...]] pairs (sentences joined with single spaces);
/// musique files are JSONL (or a JSON array) with `id`, `question`, `answer`
/// and `paragraphs` carrying `title` + `paragraph_text`.
std::vector<QAInstance> load_benchmark(const std::filesystem::path& path, DatasetAdapter adapter);

/// Reads an exclusion list: one instance id per line, '#' comments allowed.
std::set<std::string> load_exclusion_list(const std::filesystem::path& path);

/// Removes excluded ids, applies a seeded deterministic permutation
/// (Fisher-Yates over std::mt19937_64), and takes the first n_train instances
/// as train and the next n_test as test. Pure function of its inputs.
CorpusSplit make_split(const std::vector<QAInstance>& instances,
                       const std::set<std::string>& exclusion_ids, std::uint64_t seed,
                       std::size_t n_train, std::size_t n_test);

/// One document per distinct passage across the instances, deduplicated by
/// content hash of the passage text; first-seen title wins. Deterministic
/// ordering by (title, content_hash).
std::vector<CorpusDocument> corpus_documents(const std::vector<QAInstance>& instances);

} // namespace graphtune
