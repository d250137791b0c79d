#include "graphtune/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "graphtune/errors.hpp"

namespace graphtune {

nlohmann::ordered_json TrialRecord::to_json() const {
    nlohmann::ordered_json j;
    j["trial"] = trial_index;
    j["config"] = config.to_json();
    j["state"] = state == TrialState::complete ? "complete" : "failed";
    if (state == TrialState::complete) j["objective"] = objective;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const auto& q : per_question) scores.push_back(q.to_json());
    j["per_question"] = std::move(scores);
    return j;
}

TrialRecord TrialRecord::from_json(const nlohmann::json& j) {
    TrialRecord r;
    r.trial_index = j.at("trial").get<int>();
    r.config = PipelineConfig::from_json(j.at("config"));
    r.state = j.at("state").get<std::string>() == "failed" ? TrialState::failed
                                                           : TrialState::complete;
    if (r.state == TrialState::complete) r.objective = j.at("objective").get<double>();
    r.started_at = j.at("started_at").get<std::int64_t>();
    r.finished_at = j.at("finished_at").get<std::int64_t>();
    if (j.contains("per_question"))
        for (const auto& q : j.at("per_question"))
            r.per_question.push_back(QuestionScore::from_json(q));
    return r;
}

std::size_t Study::completed_count() const {
    std::size_t n = 0;
    for (const auto& t : trials)
        if (t.state == TrialState::complete) ++n;
    return n;
}

PipelineConfig sample_uniform_config(const SearchSpace& space, Rng& rng) {
    PipelineConfig config;
    for (const auto& dimension : space.dimensions) {
        const std::string& name = dimension_name(dimension);
        if (const auto* cat = std::get_if<CategoricalDimension>(&dimension)) {
            set_field(config, name, cat->values[rng.below(cat->values.size())]);
        } else {
            const auto& num = std::get<IntegerDimension>(dimension);
            set_field(config, name, num.grid_value(rng.below(num.grid_size())));
        }
    }
    return config;
}

std::vector<double> categorical_density(const std::vector<std::string>& group,
                                        const std::vector<std::string>& domain,
                                        double prior_weight) {
    if (domain.empty()) throw Error("categorical density needs a non-empty domain");
    const double denom = prior_weight * static_cast<double>(domain.size()) +
                         static_cast<double>(group.size());
    std::vector<double> p(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) {
        double count = 0.0;
        for (const auto& v : group)
            if (v == domain[i]) count += 1.0;
        p[i] = (prior_weight + count) / denom;
    }
    return p;
}

namespace {

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

} // namespace

std::vector<double> numeric_density(const std::vector<std::int64_t>& group,
                                    const IntegerDimension& dim) {
    if (dim.low > dim.high) throw Error("numeric density needs low <= high");
    const std::size_t cells = dim.grid_size();
    const double step = static_cast<double>(dim.step);
    const double range_low = static_cast<double>(dim.low) - step / 2.0;
    const double range_high = static_cast<double>(dim.high) + step / 2.0;
    const double width = static_cast<double>(dim.high - dim.low);

    const double component_weight = 1.0 / static_cast<double>(group.size() + 1);
    const double bandwidth =
        std::max(step, width / std::sqrt(static_cast<double>(group.size()) + 1.0));

    std::vector<double> mass(cells, component_weight / static_cast<double>(cells));

    for (std::int64_t observation : group) {
        if (observation < dim.low || observation > dim.high)
            throw Error("numeric density observation outside [low, high]");
        const double mu = static_cast<double>(observation);
        const double z = normal_cdf((range_high - mu) / bandwidth) -
                         normal_cdf((range_low - mu) / bandwidth);
        for (std::size_t i = 0; i < cells; ++i) {
            const double center = static_cast<double>(dim.grid_value(i));
            const double a = center - step / 2.0;
            const double b = center + step / 2.0;
            const double cell = normal_cdf((b - mu) / bandwidth) - normal_cdf((a - mu) / bandwidth);
            mass[i] += component_weight * cell / z;
        }
    }
    return mass;
}

namespace {

// Completed trials, best first; ties resolved by trial index so ranking is
// stable under equal objectives.
std::vector<const TrialRecord*> ranked_completed(const Study& study) {
    std::vector<const TrialRecord*> completed;
    for (const auto& t : study.trials)
        if (t.state == TrialState::complete) completed.push_back(&t);
    std::sort(completed.begin(), completed.end(), [](const TrialRecord* a, const TrialRecord* b) {
        if (a->objective != b->objective) return a->objective > b->objective;
        return a->trial_index < b->trial_index;
    });
    return completed;
}

std::size_t pick_best_ratio(const std::vector<std::size_t>& candidates,
                            const std::vector<double>& l, const std::vector<double>& g) {
    std::size_t best = candidates.front();
    double best_ratio = -1.0;
    for (std::size_t cell : candidates) {
        double ratio = l[cell] / std::max(g[cell], 1e-300);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = cell;
        }
    }
    return best;
}

} // namespace

PipelineConfig suggest(const Study& study) {
    if (study.closed) throw StudyClosedError();

    // Stream index = number of recorded trials, so the draw is a pure function
    // of (seed, history).
    Rng rng(mix_seed(study.seed, study.trials.size()));

    std::vector<const TrialRecord*> completed = ranked_completed(study);

    // Startup rule. A history whose objectives are all equal carries no
    // ranking signal either (the good/bad split would anchor on arbitrary
    // early trials), so it keeps exploring uniformly.
    bool all_tied = !completed.empty() &&
                    completed.front()->objective == completed.back()->objective;
    if (completed.size() < static_cast<std::size_t>(study.settings.n_startup) || all_tied) {
        PipelineConfig config = sample_uniform_config(study.space, rng);
        validate_config_or_throw(config, study.space);
        return config;
    }

    const std::size_t n = completed.size();
    const std::size_t n_good =
        static_cast<std::size_t>(std::ceil(study.settings.gamma * static_cast<double>(n)));
    const std::size_t candidates =
        static_cast<std::size_t>(std::max(study.settings.n_candidates, 1));

    PipelineConfig config;
    for (const auto& dimension : study.space.dimensions) {
        const std::string& name = dimension_name(dimension);

        if (const auto* cat = std::get_if<CategoricalDimension>(&dimension)) {
            std::vector<std::string> good, bad;
            for (std::size_t i = 0; i < n; ++i) {
                std::string value = std::get<std::string>(get_field(completed[i]->config, name));
                (i < n_good ? good : bad).push_back(std::move(value));
            }
            std::vector<double> l = categorical_density(good, cat->values, study.settings.prior_weight);
            std::vector<double> g = categorical_density(bad, cat->values, study.settings.prior_weight);
            std::vector<std::size_t> drawn;
            drawn.reserve(candidates);
            for (std::size_t c = 0; c < candidates; ++c) drawn.push_back(rng.weighted_index(l));
            set_field(config, name, cat->values[pick_best_ratio(drawn, l, g)]);
        } else {
            const auto& num = std::get<IntegerDimension>(dimension);
            std::vector<std::int64_t> good, bad;
            for (std::size_t i = 0; i < n; ++i) {
                const auto value = std::get<std::int64_t>(get_field(completed[i]->config, name));
                (i < n_good ? good : bad).push_back(value);
            }
            std::vector<double> l = numeric_density(good, num);
            std::vector<double> g = numeric_density(bad, num);
            std::vector<std::size_t> drawn;
            drawn.reserve(candidates);
            for (std::size_t c = 0; c < candidates; ++c) drawn.push_back(rng.weighted_index(l));
            set_field(config, name, num.grid_value(pick_best_ratio(drawn, l, g)));
        }
    }

    validate_config_or_throw(config, study.space);
    return config;
}

void record(Study& study, const PipelineConfig& config, double objective,
            std::vector<QuestionScore> per_question, std::int64_t started_at,
            std::int64_t finished_at) {
    if (study.closed) throw StudyClosedError();
    validate_config_or_throw(config, study.space);
    if (!std::isfinite(objective) || objective < 0.0 || objective > 1.0)
        throw Error("objective must lie in [0,1], got " + std::to_string(objective));

    TrialRecord record;
    record.trial_index = static_cast<int>(study.trials.size());
    record.config = config;
    record.objective = objective;
    record.per_question = std::move(per_question);
    record.started_at = started_at;
    record.finished_at = finished_at;
    record.state = TrialState::complete;
    study.trials.push_back(std::move(record));
}

void record_failure(Study& study, const PipelineConfig& config, std::int64_t started_at,
                    std::int64_t finished_at) {
    if (study.closed) throw StudyClosedError();
    TrialRecord record;
    record.trial_index = static_cast<int>(study.trials.size());
    record.config = config;
    record.started_at = started_at;
    record.finished_at = finished_at;
    record.state = TrialState::failed;
    study.trials.push_back(std::move(record));
}

const TrialRecord& best_trial(const Study& study) {
    const TrialRecord* best = nullptr;
    for (const auto& t : study.trials) {
        if (t.state != TrialState::complete) continue;
        if (!best || t.objective > best->objective) best = &t;
    }
    if (!best) throw NoCompleteTrialsError();
    return *best;
}

std::vector<std::pair<int, double>> running_max(const Study& study) {
    std::vector<std::pair<int, double>> series;
    bool has_max = false;
    double current = 0.0;
    for (const auto& t : study.trials) {
        if (t.state == TrialState::complete) {
            current = has_max ? std::max(current, t.objective) : t.objective;
            has_max = true;
        }
        if (has_max) series.emplace_back(t.trial_index, current);
    }
    return series;
}

} // namespace graphtune
