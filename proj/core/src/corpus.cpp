#include "graphtune/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "graphtune/errors.hpp"
#include "graphtune/rng.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

DatasetAdapter adapter_from_name(const std::string& name) {
    if (name == "hotpotqa") return DatasetAdapter::hotpotqa;
    if (name == "twowiki") return DatasetAdapter::twowiki;
    if (name == "musique") return DatasetAdapter::musique;
    throw UnknownAdapterError(name);
}

std::string adapter_name(DatasetAdapter adapter) {
    switch (adapter) {
    case DatasetAdapter::hotpotqa: return "hotpotqa";
    case DatasetAdapter::twowiki: return "twowiki";
    case DatasetAdapter::musique: return "musique";
    }
    return "hotpotqa";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open dataset file");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string where(const std::filesystem::path& path, std::size_t record) {
    return path.string() + " record " + std::to_string(record);
}

// Some benchmark exports carry answer lists; the first entry is the gold
// answer and the rest are aliases for the correctness grader.
void assign_answer(QAInstance& instance, const nlohmann::json& answer) {
    if (answer.is_array()) {
        for (const auto& entry : answer) {
            if (instance.gold_answer.empty())
                instance.gold_answer = entry.get<std::string>();
            else
                instance.gold_aliases.push_back(entry.get<std::string>());
        }
    } else {
        instance.gold_answer = answer.get<std::string>();
    }
}

// hotpotqa / twowiki record: context entries are [title, [sentence, ...]];
// sentences are joined with single spaces into one passage body.
QAInstance parse_wiki_record(const nlohmann::json& record, const std::string& location) {
    QAInstance instance;
    try {
        instance.id = record.at("_id").get<std::string>();
        instance.question = record.at("question").get<std::string>();
        assign_answer(instance, record.at("answer"));
        for (const auto& entry : record.at("context")) {
            Passage passage;
            passage.title = entry.at(0).get<std::string>();
            std::string body;
            for (const auto& sentence : entry.at(1)) {
                std::string s = sentence.get<std::string>();
                if (s.empty()) continue;
                if (!body.empty()) body.push_back(' ');
                body += s;
            }
            passage.body = collapse_whitespace(body);
            if (!passage.body.empty()) instance.passages.push_back(std::move(passage));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(location, e.what());
    }
    return instance;
}

QAInstance parse_musique_record(const nlohmann::json& record, const std::string& location) {
    QAInstance instance;
    try {
        instance.id = record.at("id").get<std::string>();
        instance.question = record.at("question").get<std::string>();
        assign_answer(instance, record.at("answer"));
        if (record.contains("answer_aliases"))
            for (const auto& alias : record.at("answer_aliases"))
                instance.gold_aliases.push_back(alias.get<std::string>());
        for (const auto& paragraph : record.at("paragraphs")) {
            Passage passage;
            passage.title = paragraph.at("title").get<std::string>();
            passage.body = collapse_whitespace(paragraph.at("paragraph_text").get<std::string>());
            if (!passage.body.empty()) instance.passages.push_back(std::move(passage));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(location, e.what());
    }
    return instance;
}

void check_instance(const QAInstance& instance, const std::string& location) {
    if (instance.id.empty()) throw ParseError(location, "empty instance id");
    if (instance.question.empty()) throw ParseError(location, "empty question");
    if (instance.gold_answer.empty()) throw ParseError(location, "empty gold answer");
    if (instance.passages.empty()) throw ParseError(location, "instance has no passages");
}

// musique ships as JSONL; some mirrors re-wrap it as a JSON array. Sniff the
// first non-whitespace byte.
std::vector<nlohmann::json> parse_records(const std::string& content,
                                          const std::filesystem::path& path) {
    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    std::vector<nlohmann::json> records;
    if (content[first] == '[') {
        nlohmann::json root;
        try {
            root = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), e.what());
        }
        for (auto& record : root) records.push_back(std::move(record));
        return records;
    }
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        ++line_number;
        std::string_view line(content.data() + pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            records.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + " line " + std::to_string(line_number), e.what());
        }
    }
    return records;
}

} // namespace

std::vector<QAInstance> load_benchmark(const std::filesystem::path& path, DatasetAdapter adapter) {
    std::string content = read_file(path);
    std::vector<nlohmann::json> records = parse_records(content, path);
    if (records.empty()) throw EmptyDatasetError(path.string());

    std::vector<QAInstance> instances;
    instances.reserve(records.size());
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        QAInstance instance = adapter == DatasetAdapter::musique
                                  ? parse_musique_record(records[i], where(path, i))
                                  : parse_wiki_record(records[i], where(path, i));
        check_instance(instance, where(path, i));
        if (!seen_ids.insert(instance.id).second)
            throw ParseError(where(path, i), "duplicate instance id " + instance.id);
        instances.push_back(std::move(instance));
    }
    return instances;
}

std::set<std::string> load_exclusion_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open exclusion list: " + path.string());
    std::set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string id = collapse_whitespace(line);
        if (!id.empty()) ids.insert(id);
    }
    return ids;
}

CorpusSplit make_split(const std::vector<QAInstance>& instances,
                       const std::set<std::string>& exclusion_ids, std::uint64_t seed,
                       std::size_t n_train, std::size_t n_test) {
    std::vector<QAInstance> pool;
    pool.reserve(instances.size());
    for (const auto& instance : instances)
        if (!exclusion_ids.count(instance.id)) pool.push_back(instance);

    if (pool.size() < n_train + n_test)
        throw InsufficientInstancesError(n_train + n_test, pool.size());

    Rng rng(seed);
    rng.shuffle(pool);

    CorpusSplit split;
    split.seed = seed;
    split.exclusion_ids = exclusion_ids;
    split.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                      pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
    return split;
}

std::vector<CorpusDocument> corpus_documents(const std::vector<QAInstance>& instances) {
    std::map<std::string, CorpusDocument> by_hash;
    for (const auto& instance : instances) {
        for (const auto& passage : instance.passages) {
            std::string hash = hex64(fnv1a64(passage.body));
            if (by_hash.count(hash)) continue;
            CorpusDocument doc;
            doc.doc_id = "d" + hash;
            doc.title = passage.title;
            doc.text = passage.body;
            doc.content_hash = hash;
            by_hash.emplace(std::move(hash), std::move(doc));
        }
    }
    std::vector<CorpusDocument> docs;
    docs.reserve(by_hash.size());
    for (auto& [hash, doc] : by_hash) docs.push_back(std::move(doc));
    std::sort(docs.begin(), docs.end(), [](const CorpusDocument& a, const CorpusDocument& b) {
        return std::tie(a.title, a.content_hash) < std::tie(b.title, b.content_hash);
    });
    return docs;
}

} // namespace graphtune
