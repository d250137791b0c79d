#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "graphtune/corpus.hpp"
#include "graphtune/errors.hpp"
#include "graphtune/text.hpp"

using namespace graphtune;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path path = fs::temp_directory_path() / ("gt_corpus_" + name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

std::vector<QAInstance> synthetic_instances(std::size_t n) {
    std::vector<QAInstance> instances;
    for (std::size_t i = 0; i < n; ++i) {
        QAInstance q;
        q.id = "q" + std::to_string(i);
        q.question = "question " + std::to_string(i);
        q.gold_answer = "answer";
        q.passages.push_back({"T" + std::to_string(i), "Body " + std::to_string(i) + "."});
        instances.push_back(std::move(q));
    }
    return instances;
}

} // namespace

TEST_CASE("hotpotqa adapter joins sentence lists with single spaces") {
    fs::path file = write_temp("hotpot.json", R"([
      {"_id": "h1", "question": "Q?", "answer": "A",
       "context": [["Alpha", ["s1.", "s2."]], ["Beta", [" s3. ", "s4."]]]}
    ])");
    auto instances = load_benchmark(file, DatasetAdapter::hotpotqa);
    REQUIRE(instances.size() == 1);
    REQUIRE(instances[0].passages.size() == 2);
    CHECK(instances[0].passages[0].title == "Alpha");
    CHECK(instances[0].passages[0].body == "s1. s2.");
    CHECK(instances[0].passages[1].body == "s3. s4.");
}

TEST_CASE("twowiki uses the same shape as hotpotqa") {
    fs::path file = write_temp("twowiki.json", R"([
      {"_id": "w1", "question": "Q?", "answer": "A",
       "context": [["Gamma", ["only sentence."]]]}
    ])");
    auto instances = load_benchmark(file, DatasetAdapter::twowiki);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].passages[0].title == "Gamma");
}

TEST_CASE("musique adapter reads jsonl paragraphs preserving order") {
    std::string line1 = R"({"id": "m1", "question": "Q?", "answer": "A", "answer_aliases": ["A2"],)"
                        R"( "paragraphs": [{"title": "P1", "paragraph_text": "first."},)"
                        R"( {"title": "P2", "paragraph_text": "second."}]})";
    std::string line2 = R"({"id": "m2", "question": "Q2?", "answer": "B",)"
                        R"( "paragraphs": [{"title": "P3", "paragraph_text": "third."}]})";
    fs::path file = write_temp("musique.jsonl", line1 + "\n" + line2 + "\n");
    auto instances = load_benchmark(file, DatasetAdapter::musique);
    REQUIRE(instances.size() == 2);
    REQUIRE(instances[0].passages.size() == 2);
    CHECK(instances[0].passages[0].title == "P1");
    CHECK(instances[0].passages[1].title == "P2");
    CHECK(instances[0].gold_aliases == std::vector<std::string>{"A2"});

    // the same records wrapped as a JSON array also parse
    fs::path arr = write_temp("musique_arr.json", "[" + line1 + ",\n" + line2 + "]");
    CHECK(load_benchmark(arr, DatasetAdapter::musique).size() == 2);
}

TEST_CASE("list-shaped gold answers reduce to first string plus aliases") {
    fs::path file = write_temp("aliases.json", R"([
      {"_id": "h1", "question": "Q?", "answer": ["New York City", "NYC", "New York"],
       "context": [["T", ["s."]]]}
    ])");
    auto instances = load_benchmark(file, DatasetAdapter::hotpotqa);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].gold_answer == "New York City");
    CHECK(instances[0].gold_aliases == std::vector<std::string>{"NYC", "New York"});
}

TEST_CASE("empty and malformed datasets raise typed errors") {
    CHECK_THROWS_AS(load_benchmark(write_temp("empty.json", ""), DatasetAdapter::hotpotqa),
                    EmptyDatasetError);
    CHECK_THROWS_AS(load_benchmark(write_temp("empty_arr.json", "[]"), DatasetAdapter::hotpotqa),
                    EmptyDatasetError);
    CHECK_THROWS_AS(load_benchmark(write_temp("bad.json", "[{\"nope\": 1}]"),
                                   DatasetAdapter::hotpotqa),
                    ParseError);
    CHECK_THROWS_AS(load_benchmark("/no/such/file.json", DatasetAdapter::hotpotqa), ParseError);
    CHECK_THROWS_AS(adapter_from_name("csv"), UnknownAdapterError);

    // record-level problems name the record
    fs::path dup = write_temp("dup.json", R"([
      {"_id": "x", "question": "Q?", "answer": "A", "context": [["T", ["s."]]]},
      {"_id": "x", "question": "Q?", "answer": "A", "context": [["T", ["s."]]]}
    ])");
    CHECK_THROWS_WITH_AS(load_benchmark(dup, DatasetAdapter::hotpotqa),
                         doctest::Contains("record 1"), ParseError);
}

TEST_CASE("make_split sizes, determinism, and exclusions") {
    auto instances = synthetic_instances(40);

    CorpusSplit split = make_split(instances, {}, 7, 24, 12);
    CHECK(split.train.size() == 24);
    CHECK(split.test.size() == 12);

    // disjoint by id
    std::set<std::string> train_ids, test_ids;
    for (const auto& q : split.train) train_ids.insert(q.id);
    for (const auto& q : split.test) test_ids.insert(q.id);
    for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);

    // pure function of its inputs
    CorpusSplit again = make_split(instances, {}, 7, 24, 12);
    for (std::size_t i = 0; i < 24; ++i) CHECK(split.train[i].id == again.train[i].id);
    for (std::size_t i = 0; i < 12; ++i) CHECK(split.test[i].id == again.test[i].id);

    // a different seed permutes
    CorpusSplit other = make_split(instances, {}, 8, 24, 12);
    bool any_difference = false;
    for (std::size_t i = 0; i < 24; ++i) any_difference |= split.train[i].id != other.train[i].id;
    CHECK(any_difference);

    // excluded ids appear on neither side
    CorpusSplit excl = make_split(instances, {"q0", "q1"}, 7, 24, 12);
    for (const auto& q : excl.train) CHECK(q.id != "q0");
    for (const auto& q : excl.test) CHECK(q.id != "q0");
}

TEST_CASE("make_split rejects pools that are too small") {
    auto instances = synthetic_instances(36);
    CHECK_THROWS_AS(make_split(instances, {"q0"}, 7, 24, 12), InsufficientInstancesError);
    CHECK_NOTHROW(make_split(instances, {}, 7, 24, 12));
}

TEST_CASE("corpus_documents dedups by content hash with deterministic order") {
    QAInstance a;
    a.id = "a";
    a.question = "q";
    a.gold_answer = "g";
    a.passages.push_back({"Shared", "Same body text."});
    a.passages.push_back({"OnlyA", "A body."});

    QAInstance b = a;
    b.id = "b";
    b.passages = {{"Shared", "Same body text."}, {"OnlyB", "B body."}};

    auto docs = corpus_documents({a, b});
    CHECK(docs.size() == 3); // shared passage collapses

    std::set<std::string> hashes;
    for (const auto& doc : docs) {
        CHECK(hashes.insert(doc.content_hash).second); // no duplicate hashes
        CHECK(doc.content_hash == hex64(fnv1a64(doc.text)));
        CHECK(doc.doc_id == "d" + doc.content_hash);
    }

    // ordering by (title, content_hash)
    for (std::size_t i = 1; i < docs.size(); ++i)
        CHECK(std::tie(docs[i - 1].title, docs[i - 1].content_hash) <
              std::tie(docs[i].title, docs[i].content_hash));

    CHECK(corpus_documents({}).empty());

    // upper bound: never more documents than passages
    auto many = synthetic_instances(24);
    CHECK(corpus_documents(many).size() <= 24);
}

TEST_CASE("exclusion list parsing with comments") {
    fs::path file = write_temp("excl.txt", "# header\nq1\n q2  # trailing\n\nq3\n");
    auto ids = load_exclusion_list(file);
    CHECK(ids == std::set<std::string>{"q1", "q2", "q3"});
}

TEST_CASE("bundled toy benchmark loads with 36 well-formed instances") {
    fs::path data = fs::path(GT_REPO_ROOT) / "data" / "toy_hotpot.json";
    auto instances = load_benchmark(data, DatasetAdapter::hotpotqa);
    CHECK(instances.size() == 36);
    for (const auto& q : instances) {
        CHECK_FALSE(q.question.empty());
        CHECK_FALSE(q.gold_answer.empty());
        CHECK(q.passages.size() >= 1);
    }
    CHECK_NOTHROW(make_split(instances, {}, 7, 24, 12));
}
