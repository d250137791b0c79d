#include <fstream>

#include "graphtune/errors.hpp"
#include "graphtune/runner.hpp"
#include "graphtune/text.hpp"

namespace graphtune {

namespace {

std::string trim(const std::string& text) {
    std::size_t start = text.find_first_not_of(" \t\r");
    if (start == std::string::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r");
    return text.substr(start, end - start + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        std::int64_t v = std::stoll(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigFileError(key, "expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        double v = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigFileError(key, "expected a number, got '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string::npos) comma = value.size();
        std::string item = trim(value.substr(start, comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == value.size()) break;
        start = comma + 1;
    }
    return out;
}

// Integer dimension override: "low:high" or "low:high:step".
IntegerDimension parse_range(const std::string& key, const std::string& name,
                             const std::string& value) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t colon = value.find(':', start);
        if (colon == std::string::npos) colon = value.size();
        parts.push_back(trim(value.substr(start, colon - start)));
        if (colon == value.size()) break;
        start = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3)
        throw ConfigFileError(key, "expected low:high[:step], got '" + value + "'");
    IntegerDimension dim;
    dim.name = name;
    dim.low = parse_int(key, parts[0]);
    dim.high = parse_int(key, parts[1]);
    dim.step = parts.size() == 3 ? parse_int(key, parts[2]) : 1;
    return dim;
}

void replace_dimension(SearchSpace& space, const std::string& key, Dimension dimension) {
    const std::string& name = dimension_name(dimension);
    for (auto& existing : space.dimensions) {
        if (dimension_name(existing) == name) {
            existing = std::move(dimension);
            space.check();
            return;
        }
    }
    throw ConfigFileError(key, "no such search-space dimension: " + name);
}

} // namespace

void apply_study_setting(StudySettings& settings, const std::string& key,
                         const std::string& value) {
    if (key == "dataset") {
        settings.dataset_path = value;
    } else if (key == "adapter") {
        try {
            settings.adapter = adapter_from_name(value);
        } catch (const Error& e) {
            throw ConfigFileError(key, e.what());
        }
    } else if (key == "exclusions") {
        settings.exclusion_list = value;
    } else if (key == "metric") {
        try {
            settings.metric = metric_from_name(value);
        } catch (const Error& e) {
            throw ConfigFileError(key, e.what());
        }
    } else if (key == "n_trials") {
        settings.n_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "n_train") {
        settings.n_train = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "n_test") {
        settings.n_test = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "split_seed") {
        settings.split_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "optimizer_seed") {
        settings.optimizer_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "bootstrap_seed") {
        settings.bootstrap_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "bootstrap_resamples") {
        settings.bootstrap_resamples = static_cast<int>(parse_int(key, value));
    } else if (key == "ci_level") {
        settings.ci_level = parse_real(key, value);
    } else if (key == "backend") {
        if (value != "mock" && value != "replay" && value != "live")
            throw ConfigFileError(key, "expected mock | replay | live, got '" + value + "'");
        settings.backend = value;
    } else if (key == "output_dir") {
        settings.output_dir = value;
    } else if (key == "replay_cache") {
        settings.replay_cache = value;
    } else if (key == "prompts_dir") {
        settings.prompts_dir = value;
    } else if (key == "study_id") {
        settings.study_id = value;
    } else if (key == "tpe.n_startup") {
        settings.tpe.n_startup = static_cast<int>(parse_int(key, value));
    } else if (key == "tpe.gamma") {
        settings.tpe.gamma = parse_real(key, value);
    } else if (key == "tpe.n_candidates") {
        settings.tpe.n_candidates = static_cast<int>(parse_int(key, value));
    } else if (key == "tpe.prior_weight") {
        settings.tpe.prior_weight = parse_real(key, value);
    } else if (key.rfind("space.", 0) == 0) {
        std::string name = key.substr(6);
        const Dimension* existing = settings.space.find(name);
        if (!existing) throw ConfigFileError(key, "no such search-space dimension: " + name);
        if (std::holds_alternative<IntegerDimension>(*existing)) {
            replace_dimension(settings.space, key, parse_range(key, name, value));
        } else {
            CategoricalDimension dim;
            dim.name = name;
            dim.values = split_list(value);
            if (dim.values.empty()) throw ConfigFileError(key, "empty value list");
            replace_dimension(settings.space, key, std::move(dim));
        }
    } else if (key.rfind("baseline.", 0) == 0) {
        std::string name = key.substr(9);
        try {
            if (name == "chunk_size" || name == "top_k")
                set_field(settings.baseline, name, parse_int(key, value));
            else
                set_field(settings.baseline, name, value);
        } catch (const Error& e) {
            throw ConfigFileError(key, e.what());
        }
    } else {
        throw ConfigFileError(key, "unknown setting");
    }
}

StudySettings load_study_settings(const std::filesystem::path& config_file) {
    std::ifstream in(config_file);
    if (!in) throw ConfigFileError(config_file.string(), "cannot open file");

    StudySettings settings;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigFileError(config_file.string() + ":" + std::to_string(line_number),
                                  "expected key = value");
        std::string key = trim(trimmed.substr(0, eq));
        std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty())
            throw ConfigFileError(config_file.string() + ":" + std::to_string(line_number),
                                  "empty key");
        apply_study_setting(settings, key, value);
    }
    return settings;
}

} // namespace graphtune
