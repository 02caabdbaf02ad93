#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "faithcheck/corpus.hpp"
#include "faithcheck/judge.hpp"

namespace faithcheck::analysis {

// One scored pair from one backend run.
struct RunRecord {
    std::string pair_id;
    std::string model;
    std::string backend;  // judge | judge-so | nli | baseline
    std::optional<double> predicted_score;  // absent iff failure is set
    int expected_score = 0;
    corpus::Variant variant = corpus::Variant::GoldFull;
    std::optional<corpus::Fraction> hallucination_pct;
    judge::Usage usage;
    std::optional<std::string> failure;

    void validate() const;
};

std::vector<RunRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<RunRecord>& records,
                  const std::filesystem::path& path);

struct MeanCell {
    double mean = 0.0;
    std::size_t n = 0;
};

struct UsageSummary {
    double mean_latency_seconds = 0.0;
    double mean_completion_tokens = 0.0;
    double mean_cost_usd = 0.0;
    std::size_t n = 0;
};

// pct keys normalized so 1/5 from different n group together
using ProgressionKey = std::tuple<std::string, std::string, corpus::Fraction>;

struct RunReport {
    // (model, task) -> mean |expected - predicted|
    std::map<std::pair<std::string, std::string>, MeanCell> per_task_residual;
    // unweighted mean over the four base tasks (macro)
    std::map<std::string, double> all_tasks_mean;
    // pair-weighted mean over the four base tasks, for transparency
    std::map<std::string, double> all_tasks_micro_mean;
    // (model, kind, pct) -> mean predicted score
    std::map<ProgressionKey, MeanCell> progression;
    // (model, kind) -> score drops between consecutive pcts
    std::map<std::pair<std::string, std::string>, std::vector<double>> deltas;
    std::map<std::string, UsageSummary> usage_summary;
    std::map<std::string, double> failure_rate;
};

// Residual aggregation; failures are excluded from means but feed
// failure_rate. Throws EmptyAfterFiltering when nothing scoreable remains.
void residuals(const std::vector<RunRecord>& records, RunReport& report);

// Mean predicted score per (model, kind, pct) over Mixed records, plus
// consecutive deltas. Throws MissingPct on a Mixed record without pct.
void progression(const std::vector<RunRecord>& records, RunReport& report);

void usage_summary(const std::vector<RunRecord>& records, RunReport& report);

RunReport build_report(const std::vector<RunRecord>& records);

// score_only_mean - reasoning_mean per (model, kind, pct); positive gaps
// at high pct mean the score-only run was more lenient.
std::map<ProgressionKey, double> sensitivity_gap(
    const std::vector<RunRecord>& reasoning_records,
    const std::vector<RunRecord>& score_only_records);

// residuals.csv, progression.csv, usage.csv, failures.csv, report.json.
// Returns the files written. Deterministic bytes for a given record set.
std::vector<std::filesystem::path> emit_report(
    const RunReport& report, const std::vector<RunRecord>& records,
    const std::filesystem::path& out_dir);

std::filesystem::path emit_sensitivity(
    const std::map<ProgressionKey, double>& gaps,
    const std::filesystem::path& out_dir);

// shortest round-trip decimal representation
std::string format_double(double value);

}  // namespace faithcheck::analysis
