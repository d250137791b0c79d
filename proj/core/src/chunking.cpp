#include "graphtune/chunking.hpp"

#include "graphtune/errors.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

namespace {

struct Piece {
    std::string text;
    std::size_t tokens = 0;
};

// Splits one oversized sentence on token boundaries. Splits prefer whitespace
// (word) boundaries; only a single word carrying more than chunk_size tokens
// is ever cut mid-word, between two of its tokens.
void split_sentence(const std::string& sentence, std::size_t budget, std::vector<Piece>& out) {
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos < sentence.size()) {
        std::size_t end = sentence.find(' ', pos);
        if (end == std::string::npos) end = sentence.size();
        if (end > pos) words.push_back(sentence.substr(pos, end - pos));
        pos = end + 1;
    }

    Piece current;
    auto flush = [&] {
        if (!current.text.empty()) out.push_back(std::move(current));
        current = {};
    };

    for (const auto& word : words) {
        std::size_t word_tokens = count_tokens(word);
        if (word_tokens > budget) {
            flush();
            std::vector<Token> tokens = tokenize(word);
            Piece sub;
            for (const auto& token : tokens) {
                if (sub.tokens == budget) {
                    out.push_back(std::move(sub));
                    sub = {};
                }
                sub.text += token.text;
                ++sub.tokens;
            }
            if (!sub.text.empty()) out.push_back(std::move(sub));
            continue;
        }
        if (current.tokens + word_tokens > budget) flush();
        if (!current.text.empty()) current.text.push_back(' ');
        current.text += word;
        current.tokens += word_tokens;
    }
    flush();
}

} // namespace

std::vector<Chunk> chunk_document(const CorpusDocument& doc, std::int64_t chunk_size) {
    if (chunk_size < 1) throw Error("chunk_size must be >= 1");
    const std::size_t budget = static_cast<std::size_t>(chunk_size);

    std::string canonical = collapse_whitespace(doc.text);
    if (canonical.empty()) return {};

    std::vector<Piece> pieces;
    for (const auto& sentence : split_sentences(canonical)) {
        std::size_t tokens = count_tokens(sentence);
        if (tokens <= budget) {
            pieces.push_back({sentence, tokens});
        } else {
            split_sentence(sentence, budget, pieces);
        }
    }

    std::vector<Chunk> chunks;
    Chunk current;
    auto flush = [&] {
        if (current.text.empty()) return;
        current.doc_id = doc.doc_id;
        current.ordinal = chunks.size();
        current.chunk_id = doc.doc_id + "#" + std::to_string(current.ordinal);
        chunks.push_back(std::move(current));
        current = {};
    };

    for (auto& piece : pieces) {
        if (current.token_count + piece.tokens > budget) flush();
        if (!current.text.empty()) current.text.push_back(' ');
        current.text += piece.text;
        current.token_count += piece.tokens;
    }
    flush();
    return chunks;
}

} // namespace graphtune
