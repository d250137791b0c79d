#include <fcntl.h>
#include <unistd.h>

#include <fstream>

#include "graphtune/errors.hpp"
#include "graphtune/optimizer.hpp"

namespace graphtune {

namespace {

nlohmann::ordered_json header_json(const Study& study) {
    nlohmann::ordered_json j;
    j["format"] = "graphtune-study";
    j["version"] = 1;
    j["study_id"] = study.study_id;
    j["metric"] = metric_name(study.metric);
    j["seed"] = study.seed;
    nlohmann::ordered_json settings;
    settings["n_startup"] = study.settings.n_startup;
    settings["gamma"] = study.settings.gamma;
    settings["n_candidates"] = study.settings.n_candidates;
    settings["prior_weight"] = study.settings.prior_weight;
    j["settings"] = std::move(settings);
    j["space"] = study.space.to_json();
    return j;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to study log: " + path.string());
    out << line << "\n";
    out.flush();
    if (!out) throw IoError("write failed on study log: " + path.string());
}

} // namespace

StudyLog::StudyLog(std::filesystem::path path, const Study& study)
    : path_(std::move(path)), lock_path_(path_) {
    lock_path_ += ".lock";
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());

    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw Error("study is locked by another process (remove " + lock_path_.string() +
                    " if stale)");
    ::close(fd);

    if (!std::filesystem::exists(path_)) {
        append_line(path_, header_json(study).dump());
        for (const auto& trial : study.trials) append_line(path_, trial.to_json().dump());
    }
}

StudyLog::~StudyLog() {
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

void StudyLog::append(const TrialRecord& record) {
    append_line(path_, record.to_json().dump());
}

bool StudyLog::exists(const std::filesystem::path& path) {
    return std::filesystem::exists(path);
}

Study StudyLog::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open study log: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), "empty study log");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + " line 1", e.what());
    }
    if (header.value("format", "") != "graphtune-study")
        throw ParseError(path.string(), "not a graphtune study log");
    if (header.value("version", 0) != 1)
        throw ParseError(path.string(), "unsupported study log version");

    Study study;
    study.study_id = header.at("study_id").get<std::string>();
    study.metric = metric_from_name(header.at("metric").get<std::string>());
    study.seed = header.at("seed").get<std::uint64_t>();
    const auto& settings = header.at("settings");
    study.settings.n_startup = settings.at("n_startup").get<int>();
    study.settings.gamma = settings.at("gamma").get<double>();
    study.settings.n_candidates = settings.at("n_candidates").get<int>();
    study.settings.prior_weight = settings.at("prior_weight").get<double>();
    study.space = SearchSpace::from_json(header.at("space"));

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + " line " + std::to_string(line_number), e.what());
        }
        TrialRecord record = TrialRecord::from_json(j);
        if (record.trial_index != static_cast<int>(study.trials.size()))
            throw ParseError(path.string() + " line " + std::to_string(line_number),
                             "trial indices must be dense from 0");
        study.trials.push_back(std::move(record));
    }
    return study;
}

} // namespace graphtune
