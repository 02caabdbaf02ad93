#include "faithcheck/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::analysis {

using nlohmann::json;

namespace {

constexpr const char* kBaseTasks[] = {"gold_full", "gold_sent", "intrinsic_sent",
                                      "extrinsic_sent"};

const char* kind_of(corpus::Variant v) {
    return v == corpus::Variant::MixedIntrinsic ? "intrinsic" : "extrinsic";
}

}  // namespace

void RunRecord::validate() const {
    if (predicted_score.has_value() == failure.has_value())
        throw SchemaError("record " + pair_id +
                          ": exactly one of predicted_score/failure must be set");
    if (predicted_score && (*predicted_score < 1.0 || *predicted_score > 5.0))
        throw SchemaError("record " + pair_id + ": predicted_score outside [1,5]");
    if (expected_score < 1 || expected_score > 5)
        throw SchemaError("record " + pair_id + ": expected_score outside 1..5");
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open run records: " + path.string());
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            RunRecord r;
            r.pair_id = j.at("pair_id").get<std::string>();
            r.model = j.at("model").get<std::string>();
            r.backend = j.at("backend").get<std::string>();
            if (j.contains("predicted_score") && !j["predicted_score"].is_null())
                r.predicted_score = j["predicted_score"].get<double>();
            r.expected_score = j.at("expected_score").get<int>();
            r.variant = corpus::variant_from_name(j.at("variant").get<std::string>());
            if (j.contains("hallucination_pct")) {
                const auto& f = j["hallucination_pct"];
                r.hallucination_pct = corpus::Fraction{
                    f.at("k").get<std::int64_t>(), f.at("n").get<std::int64_t>()};
            }
            if (j.contains("failure") && !j["failure"].is_null())
                r.failure = j["failure"].get<std::string>();
            if (j.contains("usage")) {
                const auto& u = j["usage"];
                r.usage.latency_seconds = u.value("latency_seconds", 0.0);
                r.usage.prompt_tokens = u.value("prompt_tokens", 0L);
                r.usage.completion_tokens = u.value("completion_tokens", 0L);
                r.usage.cost_usd = u.value("cost_usd", 0.0);
                r.usage.token_counts_estimated = u.value("estimated", false);
            }
            r.validate();
            records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

namespace {

json record_to_json(const RunRecord& r) {
    json j;
    j["pair_id"] = r.pair_id;
    j["model"] = r.model;
    j["backend"] = r.backend;
    if (r.predicted_score) j["predicted_score"] = *r.predicted_score;
    j["expected_score"] = r.expected_score;
    j["variant"] = corpus::variant_name(r.variant);
    if (r.hallucination_pct)
        j["hallucination_pct"] = {{"k", r.hallucination_pct->k},
                                  {"n", r.hallucination_pct->n}};
    if (r.failure) j["failure"] = *r.failure;
    j["usage"] = {{"latency_seconds", r.usage.latency_seconds},
                  {"prompt_tokens", r.usage.prompt_tokens},
                  {"completion_tokens", r.usage.completion_tokens},
                  {"cost_usd", r.usage.cost_usd},
                  {"estimated", r.usage.token_counts_estimated}};
    return j;
}

}  // namespace

void save_records(const std::vector<RunRecord>& records,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write run records: " + path.string());
    for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

void residuals(const std::vector<RunRecord>& records, RunReport& report) {
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
    std::map<std::string, std::pair<std::size_t, std::size_t>> failures;  // failed/total

    std::size_t scoreable = 0;
    for (const auto& r : records) {
        auto& f = failures[r.model];
        ++f.second;
        if (r.failure) {
            ++f.first;
            continue;
        }
        ++scoreable;
        auto& cell = sums[{r.model, corpus::variant_name(r.variant)}];
        cell.first += std::abs(r.expected_score - *r.predicted_score);
        ++cell.second;
    }
    if (scoreable == 0)
        throw EmptyAfterFiltering("no scoreable records after dropping failures");

    for (const auto& [key, sum] : sums)
        report.per_task_residual[key] = {sum.first / static_cast<double>(sum.second),
                                         sum.second};

    std::set<std::string> models;
    for (const auto& [key, cell] : report.per_task_residual) models.insert(key.first);
    for (const auto& model : models) {
        double macro = 0, micro = 0;
        std::size_t tasks = 0, pairs = 0;
        for (const char* task : kBaseTasks) {
            const auto it = report.per_task_residual.find({model, task});
            if (it == report.per_task_residual.end()) continue;
            macro += it->second.mean;
            micro += it->second.mean * static_cast<double>(it->second.n);
            pairs += it->second.n;
            ++tasks;
        }
        if (tasks > 0) {
            report.all_tasks_mean[model] = macro / static_cast<double>(tasks);
            report.all_tasks_micro_mean[model] =
                micro / static_cast<double>(pairs);
        }
    }

    for (const auto& [model, f] : failures)
        report.failure_rate[model] =
            static_cast<double>(f.first) / static_cast<double>(f.second);
}

void progression(const std::vector<RunRecord>& records, RunReport& report) {
    std::map<ProgressionKey, std::pair<double, std::size_t>> sums;
    for (const auto& r : records) {
        if (!corpus::is_mixed(r.variant) || r.failure) continue;
        if (!r.hallucination_pct)
            throw MissingPct("mixed record " + r.pair_id +
                             " has no hallucination_pct");
        const ProgressionKey key{r.model, kind_of(r.variant),
                                 r.hallucination_pct->normalized()};
        auto& cell = sums[key];
        cell.first += *r.predicted_score;
        ++cell.second;
    }
    for (const auto& [key, sum] : sums)
        report.progression[key] = {sum.first / static_cast<double>(sum.second),
                                   sum.second};

    // deltas between consecutive pcts, ascending: score(p_i) - score(p_{i+1})
    std::map<std::pair<std::string, std::string>,
             std::vector<std::pair<corpus::Fraction, double>>> curves;
    for (const auto& [key, cell] : report.progression)
        curves[{std::get<0>(key), std::get<1>(key)}].emplace_back(std::get<2>(key),
                                                                  cell.mean);
    for (auto& [key, curve] : curves) {
        std::sort(curve.begin(), curve.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> deltas;
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
            deltas.push_back(curve[i].second - curve[i + 1].second);
        report.deltas[key] = std::move(deltas);
    }
}

void usage_summary(const std::vector<RunRecord>& records, RunReport& report) {
    std::map<std::string, std::tuple<double, double, double, std::size_t>> sums;
    for (const auto& r : records) {
        if (r.failure) continue;
        auto& [latency, tokens, cost, n] = sums[r.model];
        latency += r.usage.latency_seconds;
        tokens += static_cast<double>(r.usage.completion_tokens);
        cost += r.usage.cost_usd;
        ++n;
    }
    for (const auto& [model, sum] : sums) {
        const auto& [latency, tokens, cost, n] = sum;
        const auto count = static_cast<double>(n);
        report.usage_summary[model] =
            UsageSummary{latency / count, tokens / count, cost / count, n};
    }
}

RunReport build_report(const std::vector<RunRecord>& records) {
    RunReport report;
    residuals(records, report);
    progression(records, report);
    usage_summary(records, report);
    return report;
}

std::map<ProgressionKey, double> sensitivity_gap(
    const std::vector<RunRecord>& reasoning_records,
    const std::vector<RunRecord>& score_only_records) {
    auto ids = [](const std::vector<RunRecord>& records) {
        std::set<std::string> s;
        for (const auto& r : records) s.insert(r.pair_id);
        return s;
    };
    const auto a = ids(reasoning_records), b = ids(score_only_records);
    if (a != b) {
        std::string missing;
        std::size_t shown = 0;
        for (const auto& id : a)
            if (!b.count(id) && shown < 5) {
                missing += " " + id;
                ++shown;
            }
        for (const auto& id : b)
            if (!a.count(id) && shown < 5) {
                missing += " " + id;
                ++shown;
            }
        throw PairSetMismatch("runs cover different pairs, e.g." + missing);
    }

    RunReport with, without;
    progression(reasoning_records, with);
    progression(score_only_records, without);

    std::map<ProgressionKey, double> gaps;
    for (const auto& [key, cell] : with.progression) {
        // score-only runs label the model either identically or with an
        // "-so" suffix
        auto it = without.progression.find(key);
        if (it == without.progression.end())
            it = without.progression.find({std::get<0>(key) + "-so",
                                           std::get<1>(key), std::get<2>(key)});
        if (it != without.progression.end())
            gaps[key] = it->second.mean - cell.mean;
    }
    return gaps;
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report file: " + path.string());
    out << content;
}

json report_to_json(const RunReport& report) {
    json j;
    j["per_task_residual"] = json::array();
    for (const auto& [key, cell] : report.per_task_residual)
        j["per_task_residual"].push_back({{"model", key.first},
                                          {"task", key.second},
                                          {"residual", cell.mean},
                                          {"n", cell.n}});
    j["all_tasks_mean"] = report.all_tasks_mean;
    j["all_tasks_micro_mean"] = report.all_tasks_micro_mean;
    j["progression"] = json::array();
    for (const auto& [key, cell] : report.progression)
        j["progression"].push_back({{"model", std::get<0>(key)},
                                    {"kind", std::get<1>(key)},
                                    {"pct_k", std::get<2>(key).k},
                                    {"pct_n", std::get<2>(key).n},
                                    {"pct", std::get<2>(key).value()},
                                    {"mean_score", cell.mean},
                                    {"n", cell.n}});
    j["deltas"] = json::array();
    for (const auto& [key, values] : report.deltas)
        j["deltas"].push_back(
            {{"model", key.first}, {"kind", key.second}, {"steps", values}});
    j["usage_summary"] = json::object();
    for (const auto& [model, u] : report.usage_summary)
        j["usage_summary"][model] = {
            {"mean_latency_seconds", u.mean_latency_seconds},
            {"mean_completion_tokens", u.mean_completion_tokens},
            {"mean_cost_usd", u.mean_cost_usd},
            {"n", u.n}};
    j["failure_rate"] = report.failure_rate;
    return j;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::vector<RunRecord>& records,
    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    {
        std::string csv = "model,task,residual,n\n";
        for (const auto& [key, cell] : report.per_task_residual)
            csv += key.first + "," + key.second + "," + format_double(cell.mean) +
                   "," + std::to_string(cell.n) + "\n";
        for (const auto& [model, mean] : report.all_tasks_mean)
            csv += model + ",all_tasks_macro," + format_double(mean) + ",4\n";
        for (const auto& [model, mean] : report.all_tasks_micro_mean)
            csv += model + ",all_tasks_micro," + format_double(mean) + ",0\n";
        const auto path = out_dir / "residuals.csv";
        write_file(path, csv);
        written.push_back(path);
    }
    {
        std::string csv = "model,kind,pct,mean_score,n\n";
        for (const auto& [key, cell] : report.progression)
            csv += std::get<0>(key) + "," + std::get<1>(key) + "," +
                   format_double(std::get<2>(key).value()) + "," +
                   format_double(cell.mean) + "," + std::to_string(cell.n) + "\n";
        const auto path = out_dir / "progression.csv";
        write_file(path, csv);
        written.push_back(path);
    }
    {
        std::string csv = "model,mean_latency_seconds,mean_completion_tokens,mean_cost_usd,n\n";
        for (const auto& [model, u] : report.usage_summary)
            csv += model + "," + format_double(u.mean_latency_seconds) + "," +
                   format_double(u.mean_completion_tokens) + "," +
                   format_double(u.mean_cost_usd) + "," + std::to_string(u.n) + "\n";
        const auto path = out_dir / "usage.csv";
        write_file(path, csv);
        written.push_back(path);
    }
    {
        std::string csv = "model,backend,pair_id,failure\n";
        for (const auto& r : records)
            if (r.failure)
                csv += r.model + "," + r.backend + "," + r.pair_id + "," +
                       *r.failure + "\n";
        const auto path = out_dir / "failures.csv";
        write_file(path, csv);
        written.push_back(path);
    }
    {
        const auto path = out_dir / "report.json";
        write_file(path, report_to_json(report).dump(1) + "\n");
        written.push_back(path);
    }
    return written;
}

std::filesystem::path emit_sensitivity(
    const std::map<ProgressionKey, double>& gaps,
    const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::string csv = "model,kind,pct,gap\n";
    for (const auto& [key, gap] : gaps)
        csv += std::get<0>(key) + "," + std::get<1>(key) + "," +
               format_double(std::get<2>(key).value()) + "," +
               format_double(gap) + "\n";
    const auto path = out_dir / "sensitivity.csv";
    write_file(path, csv);
    return path;
}

}  // namespace faithcheck::analysis
