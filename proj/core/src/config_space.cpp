#include "graphtune/config_space.hpp"

#include <algorithm>
#include <set>

#include "graphtune/errors.hpp"

namespace graphtune {

bool CategoricalDimension::contains(const std::string& v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
}

std::string CategoricalDimension::bounds_text() const {
    std::string out = "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += values[i];
    }
    out += "}";
    return out;
}

std::size_t IntegerDimension::grid_size() const {
    return static_cast<std::size_t>((high - low) / step) + 1;
}

std::int64_t IntegerDimension::grid_value(std::size_t index) const {
    return low + static_cast<std::int64_t>(index) * step;
}

std::size_t IntegerDimension::nearest_cell(std::int64_t v) const {
    if (v <= low) return 0;
    if (v >= high) return grid_size() - 1;
    // round to nearest multiple of step above low
    std::int64_t offset = v - low;
    std::size_t cell = static_cast<std::size_t>((offset + step / 2) / step);
    return std::min(cell, grid_size() - 1);
}

std::string IntegerDimension::bounds_text() const {
    return "[" + std::to_string(low) + ", " + std::to_string(high) + "]";
}

const std::string& dimension_name(const Dimension& d) {
    return std::visit([](const auto& dim) -> const std::string& { return dim.name; }, d);
}

const Dimension* SearchSpace::find(const std::string& name) const {
    for (const auto& d : dimensions)
        if (dimension_name(d) == name) return &d;
    return nullptr;
}

void SearchSpace::check() const {
    std::set<std::string> names;
    for (const auto& d : dimensions) {
        const std::string& name = dimension_name(d);
        if (!names.insert(name).second) throw Error("duplicate dimension name: " + name);
        if (const auto* cat = std::get_if<CategoricalDimension>(&d)) {
            if (cat->values.empty()) throw Error("empty categorical dimension: " + name);
            std::set<std::string> vals(cat->values.begin(), cat->values.end());
            if (vals.size() != cat->values.size())
                throw Error("duplicate values in categorical dimension: " + name);
        } else {
            const auto& num = std::get<IntegerDimension>(d);
            if (num.low > num.high)
                throw Error("integer dimension " + name + " has low > high");
            if (num.step < 1) throw Error("integer dimension " + name + " has step < 1");
        }
    }
}

nlohmann::ordered_json SearchSpace::to_json() const {
    nlohmann::ordered_json dims = nlohmann::ordered_json::array();
    for (const auto& d : dimensions) {
        nlohmann::ordered_json jd;
        if (const auto* cat = std::get_if<CategoricalDimension>(&d)) {
            jd["name"] = cat->name;
            jd["kind"] = "categorical";
            jd["values"] = cat->values;
        } else {
            const auto& num = std::get<IntegerDimension>(d);
            jd["name"] = num.name;
            jd["kind"] = "integer";
            jd["low"] = num.low;
            jd["high"] = num.high;
            jd["step"] = num.step;
        }
        dims.push_back(std::move(jd));
    }
    nlohmann::ordered_json j;
    j["dimensions"] = std::move(dims);
    return j;
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
    SearchSpace space;
    for (const auto& jd : j.at("dimensions")) {
        const std::string kind = jd.at("kind").get<std::string>();
        if (kind == "categorical") {
            CategoricalDimension cat;
            cat.name = jd.at("name").get<std::string>();
            cat.values = jd.at("values").get<std::vector<std::string>>();
            space.dimensions.emplace_back(std::move(cat));
        } else if (kind == "integer") {
            IntegerDimension num;
            num.name = jd.at("name").get<std::string>();
            num.low = jd.at("low").get<std::int64_t>();
            num.high = jd.at("high").get<std::int64_t>();
            num.step = jd.value("step", std::int64_t{1});
            space.dimensions.emplace_back(std::move(num));
        } else {
            throw Error("unknown dimension kind: " + kind);
        }
    }
    space.check();
    return space;
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["chunk_size"] = chunk_size;
    j["search_type"] = search_type;
    j["top_k"] = top_k;
    j["qa_prompt"] = qa_prompt;
    j["graph_prompt"] = graph_prompt;
    j["task_getter"] = task_getter;
    return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.chunk_size = j.at("chunk_size").get<std::int64_t>();
    c.search_type = j.at("search_type").get<std::string>();
    c.top_k = j.at("top_k").get<std::int64_t>();
    c.qa_prompt = j.at("qa_prompt").get<std::string>();
    c.graph_prompt = j.at("graph_prompt").get<std::string>();
    c.task_getter = j.at("task_getter").get<std::string>();
    return c;
}

ConfigValue get_field(const PipelineConfig& config, const std::string& name) {
    if (name == "chunk_size") return config.chunk_size;
    if (name == "search_type") return config.search_type;
    if (name == "top_k") return config.top_k;
    if (name == "qa_prompt") return config.qa_prompt;
    if (name == "graph_prompt") return config.graph_prompt;
    if (name == "task_getter") return config.task_getter;
    throw Error("unknown config field: " + name);
}

void set_field(PipelineConfig& config, const std::string& name, const ConfigValue& value) {
    auto as_int = [&]() -> std::int64_t {
        if (const auto* v = std::get_if<std::int64_t>(&value)) return *v;
        throw Error("config field " + name + " expects an integer");
    };
    auto as_str = [&]() -> const std::string& {
        if (const auto* v = std::get_if<std::string>(&value)) return *v;
        throw Error("config field " + name + " expects a symbol");
    };
    if (name == "chunk_size")
        config.chunk_size = as_int();
    else if (name == "search_type")
        config.search_type = as_str();
    else if (name == "top_k")
        config.top_k = as_int();
    else if (name == "qa_prompt")
        config.qa_prompt = as_str();
    else if (name == "graph_prompt")
        config.graph_prompt = as_str();
    else if (name == "task_getter")
        config.task_getter = as_str();
    else
        throw Error("unknown config field: " + name);
}

std::string config_value_text(const ConfigValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

SearchSpace default_search_space() {
    SearchSpace space;
    space.dimensions.emplace_back(IntegerDimension{"chunk_size", 200, 2000, 100});
    space.dimensions.emplace_back(
        CategoricalDimension{"search_type", {kSearchChunkCompletion, kSearchGraphCompletion}});
    space.dimensions.emplace_back(IntegerDimension{"top_k", 1, 20, 1});
    space.dimensions.emplace_back(
        CategoricalDimension{"qa_prompt", {"default", "concise", "justified"}});
    space.dimensions.emplace_back(
        CategoricalDimension{"graph_prompt", {"default", "structured", "incremental"}});
    space.dimensions.emplace_back(
        CategoricalDimension{"task_getter", {kTaskWithSummaries, kTaskWithoutSummaries}});
    space.check();
    return space;
}

PipelineConfig baseline_config() {
    PipelineConfig c;
    c.chunk_size = 1024;
    c.search_type = kSearchChunkCompletion;
    c.top_k = 5;
    c.qa_prompt = "default";
    c.graph_prompt = "default";
    c.task_getter = kTaskWithSummaries;
    return c;
}

ValidationResult validate_config(const PipelineConfig& config, const SearchSpace& space) {
    for (const auto& d : space.dimensions) {
        const std::string& name = dimension_name(d);
        ConfigValue value = get_field(config, name);
        if (const auto* cat = std::get_if<CategoricalDimension>(&d)) {
            const auto* s = std::get_if<std::string>(&value);
            if (!s || !cat->contains(*s)) {
                return {false, name,
                        name + "=" + config_value_text(value) + " not in " + cat->bounds_text()};
            }
        } else {
            const auto& num = std::get<IntegerDimension>(d);
            const auto* i = std::get_if<std::int64_t>(&value);
            if (!i || !num.contains(*i)) {
                return {false, name,
                        name + "=" + config_value_text(value) + " outside " + num.bounds_text()};
            }
        }
    }
    return {};
}

void validate_config_or_throw(const PipelineConfig& config, const SearchSpace& space) {
    ValidationResult r = validate_config(config, space);
    if (r.ok) return;
    const Dimension* d = space.find(r.field);
    std::string bounds;
    if (d) {
        if (const auto* cat = std::get_if<CategoricalDimension>(d)) {
            // Template dimensions reject with the template-specific error.
            if (r.field == "qa_prompt" || r.field == "graph_prompt")
                throw UnknownTemplateError(config_value_text(get_field(config, r.field)));
            bounds = cat->bounds_text();
        } else {
            bounds = std::get<IntegerDimension>(*d).bounds_text();
        }
    }
    throw OutOfDomainError(r.field, config_value_text(get_field(config, r.field)), bounds);
}

} // namespace graphtune
