#include "graphtune/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/rng.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

Metric metric_from_name(const std::string& name) {
    if (name == "em") return Metric::em;
    if (name == "f1") return Metric::f1;
    if (name == "correctness") return Metric::correctness;
    throw Error("unknown metric: " + name + " (expected em | f1 | correctness)");
}

std::string metric_name(Metric m) {
    switch (m) {
    case Metric::em: return "em";
    case Metric::f1: return "f1";
    case Metric::correctness: return "correctness";
    }
    return "f1";
}

nlohmann::ordered_json QuestionScore::to_json() const {
    nlohmann::ordered_json j;
    j["instance_id"] = instance_id;
    j["metric"] = metric_name(metric);
    j["value"] = value;
    if (!error_note.empty()) j["error_note"] = error_note;
    return j;
}

QuestionScore QuestionScore::from_json(const nlohmann::json& j) {
    QuestionScore s;
    s.instance_id = j.at("instance_id").get<std::string>();
    s.metric = metric_from_name(j.at("metric").get<std::string>());
    s.value = j.at("value").get<double>();
    s.error_note = j.value("error_note", std::string{});
    return s;
}

nlohmann::ordered_json ScoreReport::to_json() const {
    nlohmann::ordered_json j;
    j["metric"] = metric_name(metric);
    j["mean"] = mean;
    j["ci_low"] = ci_low;
    j["ci_high"] = ci_high;
    j["resamples"] = resamples;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& q : per_question) rows.push_back(q.to_json());
    j["per_question"] = std::move(rows);
    return j;
}

ScoreReport ScoreReport::from_json(const nlohmann::json& j) {
    ScoreReport r;
    r.metric = metric_from_name(j.at("metric").get<std::string>());
    r.mean = j.at("mean").get<double>();
    r.ci_low = j.at("ci_low").get<double>();
    r.ci_high = j.at("ci_high").get<double>();
    r.resamples = j.at("resamples").get<int>();
    for (const auto& q : j.at("per_question")) r.per_question.push_back(QuestionScore::from_json(q));
    return r;
}

std::string normalize_answer(std::string_view text) {
    // Lowercase, drop ASCII punctuation outright, then re-tokenize on
    // whitespace and remove article tokens.
    std::string lowered;
    lowered.reserve(text.size());
    for (unsigned char c : text) {
        if (c < 0x80 && std::ispunct(c)) continue;
        lowered.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    std::string out;
    std::size_t i = 0;
    const std::size_t n = lowered.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
        if (i == start) break;
        std::string_view tok(lowered.data() + start, i - start);
        if (tok == "a" || tok == "an" || tok == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out.append(tok);
    }
    return out;
}

int exact_match(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

namespace {

std::vector<std::string> normalized_tokens(std::string_view text) {
    std::string norm = normalize_answer(text);
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < norm.size()) {
        std::size_t j = norm.find(' ', i);
        if (j == std::string::npos) j = norm.size();
        if (j > i) toks.emplace_back(norm.substr(i, j - i));
        i = j + 1;
    }
    return toks;
}

} // namespace

double token_f1(std::string_view pred, std::string_view gold) {
    std::vector<std::string> p = normalized_tokens(pred);
    std::vector<std::string> g = normalized_tokens(gold);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;

    std::map<std::string, int> gold_counts;
    for (const auto& t : g) ++gold_counts[t];
    int overlap = 0;
    for (const auto& t : p) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            ++overlap;
            --it->second;
        }
    }
    if (overlap == 0) return 0.0;
    double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
    double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> parse_first_decimal(std::string_view text) {
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];
        bool starts_digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
        bool starts_sign = (c == '-' || c == '+') && i + 1 < n &&
                           std::isdigit(static_cast<unsigned char>(text[i + 1]));
        if (!starts_digit && !starts_sign) continue;
        std::size_t j = i;
        if (starts_sign) ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j < n && text[j] == '.' && j + 1 < n &&
            std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
            ++j;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
        try {
            return std::stod(std::string(text.substr(i, j - i)));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

QuestionScore llm_correctness(const std::string& question, const std::string& pred,
                              const std::string& gold, const std::vector<std::string>& aliases,
                              Gateway& gateway, const std::string& instance_id,
                              const std::string& grading_template) {
    QuestionScore score;
    score.instance_id = instance_id;
    score.metric = Metric::correctness;

    std::string alias_text;
    for (const auto& a : aliases) {
        if (!alias_text.empty()) alias_text += "; ";
        alias_text += a;
    }

    CompletionRequest request;
    request.role = TemplateRole::grading;
    request.template_id = grading_template;
    request.variables = {{"question", question},
                         {"prediction", pred},
                         {"gold", gold},
                         {"aliases", alias_text}};

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string completion;
        try {
            completion = gateway.complete(request);
        } catch (const Error& e) {
            score.value = 0.0;
            score.error_note = e.what();
            return score;
        }
        if (auto parsed = parse_first_decimal(completion)) {
            score.value = std::clamp(*parsed, 0.0, 1.0);
            return score;
        }
    }
    score.value = 0.0;
    score.error_note = "grader output had no parsable score";
    return score;
}

double aggregate(const std::vector<QuestionScore>& per_question) {
    if (per_question.empty()) throw EmptyScoreListError();
    Metric metric = per_question.front().metric;
    double sum = 0.0;
    for (const auto& q : per_question) {
        if (q.metric != metric) throw MixedMetricsError();
        sum += q.value;
    }
    return sum / static_cast<double>(per_question.size());
}

namespace {

// Linear-interpolation percentile over a sorted vector, quantile q in [0,1].
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double pos = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

std::pair<double, double> bootstrap_ci(const std::vector<double>& values, int resamples,
                                       double level, std::uint64_t seed) {
    if (values.size() < 2) throw TooFewValuesError(values.size());
    if (level <= 0.0 || level >= 1.0) throw Error("bootstrap level must be in (0, 1)");
    if (resamples < 1) throw Error("bootstrap resamples must be >= 1");

    Rng rng(seed);
    const std::size_t n = values.size();
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += values[rng.below(n)];
        means.push_back(sum / static_cast<double>(n));
    }
    std::sort(means.begin(), means.end());
    double alpha = (1.0 - level) / 2.0;
    return {percentile_sorted(means, alpha), percentile_sorted(means, 1.0 - alpha)};
}

ScoreReport make_score_report(const std::vector<QuestionScore>& per_question, int resamples,
                              double level, std::uint64_t seed) {
    ScoreReport report;
    report.metric = per_question.empty() ? Metric::f1 : per_question.front().metric;
    report.mean = aggregate(per_question);
    report.resamples = resamples;
    report.per_question = per_question;
    std::vector<double> values;
    values.reserve(per_question.size());
    for (const auto& q : per_question) values.push_back(q.value);
    if (values.size() >= 2) {
        auto [lo, hi] = bootstrap_ci(values, resamples, level, seed);
        report.ci_low = lo;
        report.ci_high = hi;
    } else {
        report.ci_low = report.mean;
        report.ci_high = report.mean;
    }
    return report;
}

} // namespace graphtune
