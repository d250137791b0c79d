#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "graphtune/errors.hpp"
#include "graphtune/evaluation.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/text.hpp"

// Deterministic mock rule engine. The rules are simple but give the objective
// real structure: retrieval quality, prompt choice, and graph density all move
// the scores, so the optimizer has something to find.
//
//   graph_extraction  capitalized-token-sequence entities; co-occurrence
//                     relations with the predicate chosen from a keyword
//                     table ("capital" -> capital_of, default related_to).
//                     Template variants change relation density:
//                       default      adjacent mention pairs per sentence
//                       structured   all mention pairs per sentence
//                       incremental  adjacent pairs plus cross-sentence links
//   summarization     first sentence of the passage
//   qa_system         highest-overlap span selection against the question;
//                     the template modulates the output format:
//                       concise      span tokens not present in the question
//                       default      the full best-matching span
//                       justified    full span plus a justification clause
//                     empty context -> the fixed abstention string "unknown"
//   grading           token-F1 against gold/aliases thresholded to {0,0.5,1}

namespace graphtune {

namespace {

// Capitalized function words never start or form an entity mention.
const std::set<std::string>& capital_stopwords() {
    static const std::set<std::string> words = {
        "The",   "A",      "An",    "It",    "He",    "She",   "They",  "We",     "You",
        "I",     "This",   "That",  "These", "Those", "There", "Here",  "What",   "Which",
        "Who",   "Whom",   "Whose", "When",  "Where", "Why",   "How",   "In",     "On",
        "At",    "By",     "For",   "From",  "To",    "Of",    "And",   "Or",     "But",
        "If",    "As",     "Is",    "Are",   "Was",   "Were",  "Be",    "Been",   "Its",
        "His",   "Her",    "Their", "Our",   "My",    "Your",  "Not",   "No",     "Yes",
        "Then",  "Also",   "After", "Before", "During", "Both", "Each",  "Such",  "Some",
        "Many",  "Most",   "Every", "While", "Since", "Until", "Because", "Although",
    };
    return words;
}

bool is_capitalized(const std::string& word) {
    return !word.empty() && word[0] >= 'A' && word[0] <= 'Z';
}

struct Mention {
    std::string name;
    std::size_t sentence = 0;
};

// Maximal runs of consecutive capitalized word tokens, with leading/trailing
// stopwords trimmed. Punctuation tokens break runs, so "Paris, France" yields
// two mentions.
std::vector<Mention> extract_mentions(const std::string& sentence, std::size_t sentence_index) {
    std::vector<Mention> mentions;
    std::vector<Token> tokens = tokenize(sentence);
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!tokens[i].is_word || !is_capitalized(tokens[i].text)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < tokens.size() && tokens[j].is_word && is_capitalized(tokens[j].text)) ++j;
        std::size_t a = i, b = j;
        while (a < b && capital_stopwords().count(tokens[a].text)) ++a;
        while (b > a && capital_stopwords().count(tokens[b - 1].text)) --b;
        if (a < b) {
            std::string name;
            for (std::size_t k = a; k < b; ++k) {
                if (!name.empty()) name.push_back(' ');
                name += tokens[k].text;
            }
            mentions.push_back({std::move(name), sentence_index});
        }
        i = j;
    }
    return mentions;
}

std::string pick_predicate(const std::string& sentence_lower) {
    static const std::pair<const char*, const char*> kTable[] = {
        {"capital", "capital_of"},   {"born", "born_in"},       {"located", "located_in"},
        {"situated", "located_in"},  {"flows", "flows_through"}, {"wrote", "wrote"},
        {"written", "wrote"},        {"author", "wrote"},        {"directed", "directed"},
        {"founded", "founded"},      {"married", "married_to"},  {"part of", "part_of"},
        {"borders", "borders"},      {"discovered", "discovered"},
    };
    for (const auto& [keyword, predicate] : kTable)
        if (sentence_lower.find(keyword) != std::string::npos) return predicate;
    return "related_to";
}

struct MockRelation {
    std::string subject, predicate, object;
};

std::string render_extraction_block(const std::vector<std::pair<std::string, std::string>>& entities,
                                    const std::vector<MockRelation>& relations) {
    std::string out = "```\n";
    for (const auto& [name, description] : entities)
        out += "ENTITY " + name + " | entity | " + description + "\n";
    for (const auto& rel : relations)
        out += "REL " + rel.subject + " | " + rel.predicate + " | " + rel.object + "\n";
    out += "```";
    return out;
}

std::string mock_extraction(const std::string& text, const std::string& variant) {
    std::vector<std::string> sentences = split_sentences(text);

    std::vector<std::pair<std::string, std::string>> entities; // name -> first description
    std::set<std::string> seen_entities;
    std::vector<MockRelation> relations;
    std::set<std::string> seen_relations;

    auto add_entity = [&](const std::string& name, const std::string& description) {
        if (seen_entities.insert(name).second) entities.emplace_back(name, description);
    };
    auto add_relation = [&](const std::string& s, const std::string& p, const std::string& o) {
        if (s == o) return;
        if (seen_relations.insert(s + "\x1f" + p + "\x1f" + o).second)
            relations.push_back({s, p, o});
    };

    std::vector<std::vector<Mention>> per_sentence;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        per_sentence.push_back(extract_mentions(sentences[si], si));
        // brief descriptions: the head of the first sentence naming the entity
        for (const auto& m : per_sentence.back())
            add_entity(m.name, truncate_tokens(sentences[si], 4));
    }

    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const auto& mentions = per_sentence[si];
        if (mentions.size() < 2) continue;
        std::string lower = ascii_lower(sentences[si]);
        std::string predicate = pick_predicate(lower);
        if (variant == "structured") {
            for (std::size_t a = 0; a < mentions.size(); ++a)
                for (std::size_t b = a + 1; b < mentions.size(); ++b)
                    add_relation(mentions[a].name, predicate, mentions[b].name);
        } else {
            for (std::size_t a = 0; a + 1 < mentions.size(); ++a)
                add_relation(mentions[a].name, predicate, mentions[a + 1].name);
        }
    }

    if (variant == "incremental") {
        for (std::size_t si = 0; si + 1 < sentences.size(); ++si) {
            if (per_sentence[si].empty() || per_sentence[si + 1].empty()) continue;
            add_relation(per_sentence[si].back().name, "related_to",
                         per_sentence[si + 1].front().name);
        }
    }

    return render_extraction_block(entities, relations);
}

std::string first_sentence(const std::string& text) {
    std::vector<std::string> sentences = split_sentences(text);
    return sentences.empty() ? std::string{} : sentences.front();
}

struct SpanChoice {
    std::string text;
    std::size_t overlap = 0;
};

// Candidate spans are the sentence/newline segments of the context; the best
// span maximizes word-token overlap with the question (ties -> earliest).
std::vector<std::string> context_spans(const std::string& context) {
    std::vector<std::string> spans;
    for (auto& s : split_sentences(context)) {
        if (word_tokens(s).empty()) continue; // separator lines etc.
        spans.push_back(std::move(s));
    }
    return spans;
}

std::string mock_answer(const std::string& question, const std::string& context,
                        const std::string& variant) {
    std::vector<std::string> spans = context_spans(context);
    if (spans.empty()) return "unknown";

    std::set<std::string> question_tokens;
    for (const auto& t : lower_word_tokens(question)) question_tokens.insert(t);

    std::size_t best = 0;
    std::size_t best_overlap = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        std::set<std::string> span_tokens;
        for (const auto& t : lower_word_tokens(spans[i])) span_tokens.insert(t);
        std::size_t overlap = 0;
        for (const auto& t : span_tokens) overlap += question_tokens.count(t);
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = i;
        }
    }

    const std::string& span = spans[best];
    if (variant == "concise") {
        // The informative part of the span: its words that the question does
        // not already contain.
        std::string out;
        std::size_t taken = 0;
        for (const auto& w : word_tokens(span)) {
            if (question_tokens.count(ascii_lower(w))) continue;
            if (!out.empty()) out.push_back(' ');
            out += w;
            if (++taken == 6) break;
        }
        return out.empty() ? span : out;
    }
    if (variant == "justified") {
        return span + " This is supported by the retrieved context.";
    }
    return span;
}

std::string mock_grade(const std::string& prediction, const std::string& gold,
                       const std::string& aliases) {
    double best = token_f1(prediction, gold);
    std::size_t start = 0;
    while (start <= aliases.size() && !aliases.empty()) {
        std::size_t end = aliases.find("; ", start);
        if (end == std::string::npos) end = aliases.size();
        if (end > start) best = std::max(best, token_f1(prediction, aliases.substr(start, end - start)));
        if (end == aliases.size()) break;
        start = end + 2;
    }
    if (best >= 0.99) return "1.0";
    if (best >= 0.4) return "0.5 partial overlap with the reference answer";
    return "0.0";
}

class MockGateway final : public Gateway {
public:
    MockGateway(TemplateRegistry registry, std::size_t embed_dim)
        : Gateway(std::move(registry)), embed_dim_(embed_dim) {}

    std::string backend_name() const override { return "mock"; }

protected:
    std::string do_complete(const PromptTemplate& tmpl, const CompletionRequest& request,
                            const std::string& /*rendered*/) override {
        auto var = [&](const char* name) -> const std::string& {
            auto it = request.variables.find(name);
            if (it == request.variables.end()) throw UnboundPlaceholderError(name);
            return it->second;
        };
        switch (tmpl.role) {
        case TemplateRole::graph_extraction: return mock_extraction(var("text"), tmpl.id);
        case TemplateRole::summarization: return first_sentence(var("text"));
        case TemplateRole::qa_system: return mock_answer(var("question"), var("context"), tmpl.id);
        case TemplateRole::grading: return mock_grade(var("prediction"), var("gold"), var("aliases"));
        }
        throw GatewayError(GatewayFault::Fatal, "unsupported template role");
    }

    std::vector<double> do_embed(const std::string& text) override {
        return hashed_unigram_embedding(text, embed_dim_);
    }

private:
    std::size_t embed_dim_;
};

} // namespace

std::unique_ptr<Gateway> make_mock_gateway(TemplateRegistry registry, std::size_t embed_dim) {
    return std::make_unique<MockGateway>(std::move(registry), embed_dim);
}

} // namespace graphtune
