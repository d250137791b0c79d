#include <cstdio>
#include <fstream>

#include "graphtune/errors.hpp"
#include "graphtune/runner.hpp"

namespace graphtune {

namespace {

std::string fixed6(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

std::string gain_cell(const std::optional<double>& gain) {
    if (!gain) return "--";
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.1f", *gain * 100.0);
    return buffer;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed on " + path.string());
}

std::string html_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

// Inline SVG line chart of the running maximum; no external assets.
std::string running_max_svg(const std::vector<std::pair<int, double>>& series) {
    const int width = 640, height = 280, pad = 40;
    std::string svg = "<svg viewBox=\"0 0 " + std::to_string(width) + " " +
                      std::to_string(height) +
                      "\" xmlns=\"http://www.w3.org/2000/svg\" class=\"chart\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"#fafafa\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        double frac = tick / 4.0;
        int y = height - pad - static_cast<int>(frac * (height - 2 * pad));
        svg += "<line x1=\"" + std::to_string(pad) + "\" y1=\"" + std::to_string(y) + "\" x2=\"" +
               std::to_string(width - pad) + "\" y2=\"" + std::to_string(y) +
               "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"6\" y=\"" + std::to_string(y + 4) + "\" font-size=\"11\">" +
               fixed6(frac).substr(0, 4) + "</text>\n";
    }
    if (!series.empty()) {
        int max_trial = series.back().first;
        std::string points;
        for (const auto& [trial, value] : series) {
            double fx = max_trial == 0 ? 0.0
                                       : static_cast<double>(trial) / static_cast<double>(max_trial);
            double x = pad + fx * (width - 2 * pad);
            double y = height - pad - value * (height - 2 * pad);
            if (!points.empty()) points += " ";
            points += fixed6(x) + "," + fixed6(y);
        }
        svg += "<polyline fill=\"none\" stroke=\"#2a6fb0\" stroke-width=\"2\" points=\"" + points +
               "\"/>\n";
    }
    svg += "<text x=\"" + std::to_string(width / 2 - 20) + "\" y=\"" + std::to_string(height - 8) +
           "\" font-size=\"11\">trial</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string bar_pair(const std::string& label, double baseline, double optimized) {
    auto bar = [](const char* color, double value) {
        int w = static_cast<int>(value * 300.0);
        return "<div class=\"bar\" style=\"width:" + std::to_string(w) + "px;background:" + color +
               "\"></div><span>" + fixed6(value) + "</span>";
    };
    std::string out = "<div class=\"pair\"><h3>" + html_escape(label) + "</h3>";
    out += "<div class=\"row\"><em>baseline</em>" + bar("#b0b0b0", baseline) + "</div>";
    out += "<div class=\"row\"><em>optimized</em>" + bar("#2a6fb0", optimized) + "</div></div>\n";
    return out;
}

std::string per_question_table(const ScoreReport& report) {
    std::string out = "<table><tr><th>instance</th><th>score</th><th>note</th></tr>\n";
    for (const auto& q : report.per_question) {
        out += "<tr><td>" + html_escape(q.instance_id) + "</td><td>" + fixed6(q.value) +
               "</td><td>" + html_escape(q.error_note) + "</td></tr>\n";
    }
    out += "</table>\n";
    return out;
}

} // namespace

nlohmann::ordered_json StudyReport::to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "graphtune-report";
    j["version"] = 1;
    j["study_id"] = study_id;
    j["benchmark"] = benchmark;
    j["metric"] = metric_name(metric);
    j["best_trial_index"] = best_trial_index;
    j["best_config"] = best_config.to_json();
    j["baseline"]["train"] = baseline_train.to_json();
    j["baseline"]["holdout"] = baseline_holdout.to_json();
    j["optimized"]["train"] = optimized_train.to_json();
    j["optimized"]["holdout"] = optimized_holdout.to_json();

    auto gain_json = [](const std::optional<double>& g) -> nlohmann::ordered_json {
        if (!g) return nullptr;
        return *g;
    };
    j["relative_gain"]["train"] =
        gain_json(relative_gain(baseline_train.mean, optimized_train.mean));
    j["relative_gain"]["holdout"] =
        gain_json(relative_gain(baseline_holdout.mean, optimized_holdout.mean));

    nlohmann::ordered_json trials = nlohmann::ordered_json::array();
    for (const auto& t : trial_points) {
        nlohmann::ordered_json p;
        p["trial"] = t.trial_index;
        p["state"] = t.state == TrialState::complete ? "complete" : "failed";
        if (t.state == TrialState::complete) p["objective"] = t.objective;
        trials.push_back(std::move(p));
    }
    j["trials"] = std::move(trials);

    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& [trial, value] : running_max_series)
        series.push_back(nlohmann::ordered_json::array({trial, value}));
    j["running_max"] = std::move(series);
    return j;
}

StudyReport StudyReport::from_json(const nlohmann::json& j) {
    StudyReport r;
    r.study_id = j.at("study_id").get<std::string>();
    r.benchmark = j.at("benchmark").get<std::string>();
    r.metric = metric_from_name(j.at("metric").get<std::string>());
    r.best_trial_index = j.at("best_trial_index").get<int>();
    r.best_config = PipelineConfig::from_json(j.at("best_config"));
    r.baseline_train = ScoreReport::from_json(j.at("baseline").at("train"));
    r.baseline_holdout = ScoreReport::from_json(j.at("baseline").at("holdout"));
    r.optimized_train = ScoreReport::from_json(j.at("optimized").at("train"));
    r.optimized_holdout = ScoreReport::from_json(j.at("optimized").at("holdout"));
    for (const auto& p : j.at("trials")) {
        TrialPoint t;
        t.trial_index = p.at("trial").get<int>();
        t.state = p.at("state").get<std::string>() == "failed" ? TrialState::failed
                                                               : TrialState::complete;
        if (t.state == TrialState::complete) t.objective = p.at("objective").get<double>();
        r.trial_points.push_back(t);
    }
    for (const auto& entry : j.at("running_max"))
        r.running_max_series.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
    return r;
}

void emit_report(const StudyReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    write_file(out_dir / "report.json", report.to_json().dump(2) + "\n");

    // summary.csv: one row per phase, mirroring the baseline/optimized/gain
    // table layout.
    std::string csv =
        "benchmark,metric,phase,baseline,baseline_ci_low,baseline_ci_high,"
        "optimized,optimized_ci_low,optimized_ci_high,relative_gain_pct\n";
    struct PhaseRow {
        const char* phase;
        const ScoreReport* baseline;
        const ScoreReport* optimized;
    };
    for (const auto& row : {PhaseRow{"train", &report.baseline_train, &report.optimized_train},
                            PhaseRow{"holdout", &report.baseline_holdout,
                                     &report.optimized_holdout}}) {
        csv += report.benchmark + "," + metric_name(report.metric) + "," + row.phase + "," +
               fixed6(row.baseline->mean) + "," + fixed6(row.baseline->ci_low) + "," +
               fixed6(row.baseline->ci_high) + "," + fixed6(row.optimized->mean) + "," +
               fixed6(row.optimized->ci_low) + "," + fixed6(row.optimized->ci_high) + "," +
               gain_cell(StudyReport::relative_gain(row.baseline->mean, row.optimized->mean)) +
               "\n";
    }
    write_file(out_dir / "summary.csv", csv);

    // running_max.csv: the learning-curve series.
    std::string series_csv = "trial,objective,running_max\n";
    std::map<int, const TrialPoint*> points;
    for (const auto& t : report.trial_points) points[t.trial_index] = &t;
    for (const auto& [trial, value] : report.running_max_series) {
        auto it = points.find(trial);
        std::string objective =
            (it != points.end() && it->second->state == TrialState::complete)
                ? fixed6(it->second->objective)
                : "";
        series_csv += std::to_string(trial) + "," + objective + "," + fixed6(value) + "\n";
    }
    write_file(out_dir / "running_max.csv", series_csv);

    // dashboard.html: fully self-contained (inline styles + SVG, no fetches).
    std::string html = "<!doctype html>\n<html><head><meta charset=\"utf-8\">\n<title>" +
                       html_escape(report.study_id) + "</title>\n<style>\n"
                       "body{font-family:sans-serif;margin:2em;max-width:900px}\n"
                       "table{border-collapse:collapse}td,th{border:1px solid #ccc;"
                       "padding:4px 8px;font-size:13px}\n"
                       ".bar{display:inline-block;height:14px;margin-right:6px;"
                       "vertical-align:middle}\n"
                       ".row{margin:4px 0}.row em{display:inline-block;width:80px}\n"
                       ".pair{margin-bottom:1em}\n"
                       "</style></head><body>\n";
    html += "<h1>" + html_escape(report.study_id) + "</h1>\n";
    html += "<p>benchmark: <b>" + html_escape(report.benchmark) + "</b>, metric: <b>" +
            metric_name(report.metric) + "</b>, best trial: <b>#" +
            std::to_string(report.best_trial_index) + "</b></p>\n";
    html += "<p>best config: <code>" + html_escape(report.best_config.to_json().dump()) +
            "</code></p>\n";
    html += "<h2>Running maximum</h2>\n" + running_max_svg(report.running_max_series);
    html += "<h2>Baseline vs optimized</h2>\n";
    html += bar_pair("train", report.baseline_train.mean, report.optimized_train.mean);
    html += bar_pair("holdout", report.baseline_holdout.mean, report.optimized_holdout.mean);
    html += "<h2>Hold-out per-question scores</h2>\n" + per_question_table(report.optimized_holdout);
    html += "<h2>Train per-question scores (best trial)</h2>\n" +
            per_question_table(report.optimized_train);
    html += "</body></html>\n";
    write_file(out_dir / "dashboard.html", html);
}

} // namespace graphtune
