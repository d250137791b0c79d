#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "graphtune/chunking.hpp"
#include "graphtune/errors.hpp"
#include "graphtune/rng.hpp"
#include "graphtune/text.hpp"

using namespace graphtune;

namespace {

CorpusDocument doc_of(std::string text) {
    CorpusDocument doc;
    doc.doc_id = "dtest";
    doc.title = "T";
    doc.text = std::move(text);
    doc.content_hash = hex64(fnv1a64(doc.text));
    return doc;
}

// Builds one sentence of exactly `tokens` tokens (n-1 words plus the period).
std::string sentence_of(std::size_t tokens, const std::string& stem) {
    std::string s;
    for (std::size_t i = 0; i + 1 < tokens; ++i) {
        if (!s.empty()) s.push_back(' ');
        s += stem + std::to_string(i);
    }
    s.push_back('.');
    return s;
}

std::string rebuild(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& chunk : chunks) {
        if (!out.empty()) out.push_back(' ');
        out += chunk.text;
    }
    return out;
}

} // namespace

TEST_CASE("small document fits in one chunk") {
    auto chunks = chunk_document(doc_of("just ten tokens in this tiny document body here now"), 200);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].token_count == 10);
    CHECK(chunks[0].ordinal == 0);
    CHECK(chunks[0].chunk_id == "dtest#0");
}

TEST_CASE("greedy packing of five 100-token sentences at budget 250 gives [2,2,1]") {
    // oracle: hand-simulated greedy packing — 100+100 fits, +100 would not
    std::string text;
    for (int i = 0; i < 5; ++i) {
        if (!text.empty()) text.push_back(' ');
        text += sentence_of(100, "s" + std::to_string(i) + "w");
    }
    auto chunks = chunk_document(doc_of(text), 250);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].token_count == 200);
    CHECK(chunks[1].token_count == 200);
    CHECK(chunks[2].token_count == 100);

    // sentence counts per chunk: terminators survive intact
    CHECK(split_sentences(chunks[0].text).size() == 2);
    CHECK(split_sentences(chunks[1].text).size() == 2);
    CHECK(split_sentences(chunks[2].text).size() == 1);
}

TEST_CASE("a single 300-token sentence splits on token boundaries into 200+100") {
    auto chunks = chunk_document(doc_of(sentence_of(300, "w")), 200);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].token_count == 200);
    CHECK(chunks[1].token_count == 100);
}

TEST_CASE("empty document yields an empty chunk list") {
    CHECK(chunk_document(doc_of(""), 200).empty());
    CHECK(chunk_document(doc_of("   \n\t "), 200).empty());
}

TEST_CASE("chunk_size below 1 is rejected") {
    CHECK_THROWS_AS(chunk_document(doc_of("text"), 0), Error);
}

TEST_CASE("ordinals are contiguous and ids carry them") {
    auto chunks = chunk_document(doc_of(sentence_of(500, "w")), 100);
    REQUIRE(chunks.size() == 5);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        CHECK(chunks[i].ordinal == i);
        CHECK(chunks[i].chunk_id == "dtest#" + std::to_string(i));
        CHECK(chunks[i].doc_id == "dtest");
    }
}

namespace {

// Deterministic sentence-shaped corpus for the coverage/budget properties.
std::vector<std::string> property_corpus() {
    static const char* words[] = {"river", "bridge", "market", "tower", "harvest", "lantern",
                                  "Kessel", "Veldoria", "council", "granary", "ferry", "CA"};
    Rng rng(99);
    std::vector<std::string> docs;
    for (int d = 0; d < 25; ++d) {
        std::string text;
        std::size_t sentences = 1 + rng.below(40);
        for (std::size_t s = 0; s < sentences; ++s) {
            std::size_t length = 3 + rng.below(30);
            std::string sentence;
            for (std::size_t w = 0; w < length; ++w) {
                if (!sentence.empty()) sentence.push_back(' ');
                sentence += words[rng.below(12)];
                if (rng.below(8) == 0) sentence += ",";
            }
            sentence += (rng.below(3) == 0) ? "!" : ".";
            if (!text.empty()) text.push_back(' ');
            text += sentence;
        }
        docs.push_back(std::move(text));
    }
    return docs;
}

} // namespace

TEST_CASE("coverage: chunks reconstruct the normalized document, no token lost") {
    for (const auto& text : property_corpus()) {
        std::string canonical = collapse_whitespace(text);
        for (std::int64_t size : {200, 1000, 2000}) {
            auto chunks = chunk_document(doc_of(text), size);
            CHECK(rebuild(chunks) == canonical);
            std::size_t total = 0;
            for (const auto& chunk : chunks) total += chunk.token_count;
            CHECK(total == count_tokens(canonical));
        }
    }
}

TEST_CASE("budget: every chunk stays within chunk_size tokens") {
    for (const auto& text : property_corpus()) {
        for (std::int64_t size : {200, 1000, 2000}) {
            for (const auto& chunk : chunk_document(doc_of(text), size)) {
                CHECK(chunk.token_count <= static_cast<std::size_t>(size));
                CHECK(chunk.token_count == count_tokens(chunk.text)); // self-consistent
                CHECK(chunk.token_count > 0);
            }
        }
    }
}
