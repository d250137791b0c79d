#include "graphtune/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <openssl/evp.h>

#include "graphtune/errors.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

std::string role_name(TemplateRole role) {
    switch (role) {
    case TemplateRole::graph_extraction: return "graph_extraction";
    case TemplateRole::qa_system: return "qa_system";
    case TemplateRole::grading: return "grading";
    case TemplateRole::summarization: return "summarization";
    }
    return "qa_system";
}

TemplateRole role_from_name(const std::string& name) {
    if (name == "graph_extraction") return TemplateRole::graph_extraction;
    if (name == "qa_system") return TemplateRole::qa_system;
    if (name == "grading") return TemplateRole::grading;
    if (name == "summarization") return TemplateRole::summarization;
    throw Error("unknown template role: " + name);
}

namespace {

const char* kExtractionFormatHint =
    "Return one fenced block with lines of the form:\n"
    "ENTITY name | type | description\n"
    "REL subject | predicate | object";

} // namespace

TemplateRegistry TemplateRegistry::with_defaults() {
    TemplateRegistry registry;

    registry.add({"default", TemplateRole::qa_system,
                  "You are a helpful assistant answering questions from retrieved context.\n"
                  "Use the context to answer in a complete, conversational sentence.\n\n"
                  "Context:\n{context}\n\nQuestion: {question}\n\nAnswer:"});
    registry.add({"concise", TemplateRole::qa_system,
                  "Answer the question using only the retrieved context.\n"
                  "Respond with the shortest exact span that answers the question. "
                  "No explanations.\n\n"
                  "Context:\n{context}\n\nQuestion: {question}\n\nAnswer:"});
    registry.add({"justified", TemplateRole::qa_system,
                  "Answer the question from the retrieved context and briefly justify the answer "
                  "by citing the supporting evidence.\n\n"
                  "Context:\n{context}\n\nQuestion: {question}\n\nAnswer:"});

    registry.add({"default", TemplateRole::graph_extraction,
                  "Extract the entities and relations from the text in a single pass.\n" +
                      std::string(kExtractionFormatHint) + "\n\nText:\n{text}"});
    registry.add({"structured", TemplateRole::graph_extraction,
                  "Read the text carefully, list every entity with a short description, then "
                  "enumerate every relation between the listed entities.\n" +
                      std::string(kExtractionFormatHint) + "\n\nText:\n{text}"});
    registry.add({"incremental", TemplateRole::graph_extraction,
                  "Work sentence by sentence. For each sentence, extract its entities and "
                  "relations, carrying forward entities from earlier sentences when they "
                  "connect.\n" +
                      std::string(kExtractionFormatHint) + "\n\nText:\n{text}"});

    registry.add({"default", TemplateRole::grading,
                  "Grade the predicted answer against the reference.\n"
                  "Question: {question}\nPredicted answer: {prediction}\n"
                  "Reference answer: {gold}\nAccepted aliases: {aliases}\n\n"
                  "Reply with a single correctness score between 0.0 and 1.0, optionally "
                  "followed by a short justification."});

    registry.add({"default", TemplateRole::summarization,
                  "Summarize the passage in one short sentence.\n\nPassage:\n{text}"});

    return registry;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
    templates_[{static_cast<int>(tmpl.role), tmpl.id}] = std::move(tmpl);
}

const PromptTemplate& TemplateRegistry::get(TemplateRole role, const std::string& id) const {
    auto it = templates_.find({static_cast<int>(role), id});
    if (it == templates_.end()) throw UnknownTemplateError(role_name(role) + "/" + id);
    return it->second;
}

bool TemplateRegistry::has(TemplateRole role, const std::string& id) const {
    return templates_.count({static_cast<int>(role), id}) > 0;
}

std::vector<std::string> TemplateRegistry::ids(TemplateRole role) const {
    std::vector<std::string> out;
    for (const auto& [key, tmpl] : templates_)
        if (key.first == static_cast<int>(role)) out.push_back(tmpl.id);
    return out;
}

void TemplateRegistry::load_directory(const std::filesystem::path& root) {
    static const std::pair<const char*, TemplateRole> kSubdirs[] = {
        {"qa", TemplateRole::qa_system},
        {"graph", TemplateRole::graph_extraction},
        {"grading", TemplateRole::grading},
        {"summary", TemplateRole::summarization},
    };
    for (const auto& [subdir, role] : kSubdirs) {
        std::filesystem::path dir = root / subdir;
        if (!std::filesystem::is_directory(dir)) continue;
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".txt")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file, std::ios::binary);
            if (!in) throw IoError("cannot read prompt file: " + file.string());
            std::string body((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
            add({file.stem().string(), role, std::move(body)});
        }
    }
}

std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& variables) {
    const std::string& body = tmpl.body;
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() &&
                   (std::isalnum(static_cast<unsigned char>(body[j])) || body[j] == '_'))
                ++j;
            if (j < body.size() && body[j] == '}' && j > i + 1) {
                std::string name = body.substr(i + 1, j - i - 1);
                auto it = variables.find(name);
                if (it == variables.end()) throw UnboundPlaceholderError(name);
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(body[i]);
        ++i;
    }
    return out;
}

std::string request_digest(const std::string& model, const std::string& rendered,
                           const Decoding& decoding) {
    // Canonical byte layout hashed with SHA-256; any change to it invalidates
    // existing replay caches, hence the digests pinned by the golden test.
    char params[64];
    std::snprintf(params, sizeof(params), "%.6f|%d", decoding.temperature,
                  decoding.max_output_tokens);
    std::string payload = model;
    payload.push_back('\n');
    payload += params;
    payload.push_back('\n');
    payload += rendered;

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(payload.data(), payload.size(), digest, &length, EVP_sha256(), nullptr);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

bool offline_mode() {
    const char* v = std::getenv("GT_OFFLINE");
    return v != nullptr && std::string(v) == "1";
}

std::string Gateway::complete(const CompletionRequest& request) {
    const PromptTemplate& tmpl = registry_.get(request.role, request.template_id);
    std::string rendered = render(tmpl, request.variables);
    switch (tmpl.role) {
    case TemplateRole::graph_extraction: ++counts_.graph_extraction; break;
    case TemplateRole::qa_system: ++counts_.qa_system; break;
    case TemplateRole::grading: ++counts_.grading; break;
    case TemplateRole::summarization: ++counts_.summarization; break;
    }
    return do_complete(tmpl, request, rendered);
}

std::vector<double> Gateway::embed_text(const std::string& text) {
    ++counts_.embeddings;
    return do_embed(text);
}

namespace {

// Function words carry no retrieval signal and would dominate the cosine on
// short texts; the filter list is fixed so vectors stay deterministic.
bool embedding_stopword(const std::string& token) {
    static const std::set<std::string> words = {
        "the", "a",  "an",  "of",  "is",  "was", "were", "are", "be",   "been", "in",   "on",
        "at",  "to", "and", "or",  "for", "with", "from", "by", "its",  "their", "each", "every",
        "it",  "this", "that", "these", "those", "as",  "not", "no",   "which", "what", "who",
        "whom", "where", "when", "why", "how",  "they", "them", "his", "her",  "she",  "he",
    };
    return words.count(token) > 0;
}

} // namespace

std::vector<double> hashed_unigram_embedding(const std::string& text, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    for (const auto& tok : lower_word_tokens(text)) {
        if (embedding_stopword(tok)) continue;
        v[fnv1a64(tok) % dim] += 1.0;
    }
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

} // namespace graphtune
