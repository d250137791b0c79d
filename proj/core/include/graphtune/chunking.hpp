#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphtune/corpus.hpp"

namespace graphtune {

struct Chunk {
    std::string chunk_id; // "<doc_id>#<ordinal>"
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t token_count = 0;
};

/// Sentence-first chunking: whole sentences are packed greedily into chunks of
/// at most chunk_size tokens; a sentence that alone exceeds the budget is
/// split on token boundaries. The document text is whitespace-normalized
/// first, so joining the chunk texts with single spaces reconstructs it.
/// Token counts follow count_tokens(); the budget is approximate model
/// tokens, traded for platform-stable determinism.
std::vector<Chunk> chunk_document(const CorpusDocument& doc, std::int64_t chunk_size);

} // namespace graphtune
