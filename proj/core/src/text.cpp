#include "graphtune/text.hpp"

#include <cctype>

namespace graphtune {

namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

} // namespace

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text)
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        const bool word = is_word_char(c);
        std::size_t start = i;
        while (i < n) {
            unsigned char d = static_cast<unsigned char>(text[i]);
            if (is_space(d) || is_word_char(d) != word) break;
            ++i;
        }
        tokens.push_back({std::string(text.substr(start, i - start)), word});
    }
    return tokens;
}

std::size_t count_tokens(std::string_view text) {
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        const bool word = is_word_char(c);
        while (i < n) {
            unsigned char d = static_cast<unsigned char>(text[i]);
            if (is_space(d) || is_word_char(d) != word) break;
            ++i;
        }
        ++count;
    }
    return count;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text))
        if (t.is_word) out.push_back(std::move(t.text));
    return out;
}

std::vector<std::string> lower_word_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text))
        if (t.is_word) out.push_back(ascii_lower(t.text));
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    const std::size_t n = text.size();

    auto flush = [&](std::size_t end) {
        while (start < end && is_space(static_cast<unsigned char>(text[start]))) ++start;
        std::size_t stop = end;
        while (stop > start && is_space(static_cast<unsigned char>(text[stop - 1]))) --stop;
        if (stop > start) sentences.emplace_back(text.substr(start, stop - start));
        start = end;
    };

    std::size_t i = 0;
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            flush(i);
            ++i;
            start = i;
            continue;
        }
        if (is_terminator(c)) {
            std::size_t j = i;
            while (j < n && is_terminator(text[j])) ++j;
            if (j >= n || is_space(static_cast<unsigned char>(text[j]))) {
                flush(j);
                i = j;
                continue;
            }
            i = j;
            continue;
        }
        ++i;
    }
    flush(n);
    return sentences;
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
    if (max_tokens == 0) return "";
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    std::size_t end = 0;
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        const bool word = is_word_char(c);
        while (i < n) {
            unsigned char d = static_cast<unsigned char>(text[i]);
            if (is_space(d) || is_word_char(d) != word) break;
            ++i;
        }
        ++count;
        end = i;
        if (count == max_tokens) break;
    }
    std::string_view head = text.substr(0, end);
    return std::string(head);
}

} // namespace graphtune
