#pragma once

#include "structmem/agreement.hpp"
#include "structmem/baselines.hpp"
#include "structmem/config.hpp"
#include "structmem/consolidation.hpp"
#include "structmem/dataset.hpp"
#include "structmem/graph.hpp"
#include "structmem/retrieval.hpp"
#include "structmem/store.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace structmem {

struct CostPoint {
    std::size_t turn_index = 0;  // 1-based
    std::int64_t cumulative_input_tokens = 0;
    std::int64_t cumulative_output_tokens = 0;
    std::int64_t cumulative_calls = 0;
    double cumulative_wall_seconds = 0.0;
};

struct BuildArtifacts {
    MemoryStore store;
    std::optional<MemoryGraph> graph;
    LedgerSnapshot usage{};
    std::vector<CostPoint> cost_curve;
    std::vector<CycleRecord> cycles;
    std::vector<std::string> events;
    std::size_t utterances_total = 0;
    std::size_t utterances_failed = 0;
};

/// Ingests the conversation in dialogue order through the selected
/// paradigm. Structmem consolidates on the time-threshold trigger and
/// force-flushes a non-empty buffer at the end. Provider failures skip the
/// utterance and are logged; the build continues.
BuildArtifacts run_build(const Conversation& conv, const RunConfig& config,
                         const PromptSet& prompts, Provider& provider, Clock& clock);

struct TypeAccuracy {
    std::size_t correct = 0;
    std::size_t answered = 0;  // scored items
    std::size_t unscored = 0;

    double accuracy() const {
        return answered ? static_cast<double>(correct) / static_cast<double>(answered) : 0.0;
    }
    bool operator==(const TypeAccuracy&) const = default;
};

struct JudgeVerdictRecord {
    std::string question_id;
    std::string judge;
    std::string verdict;  // "correct" | "incorrect" | "unscored"
    std::string raw;
    bool operator==(const JudgeVerdictRecord&) const = default;
};

struct JudgeScores {
    std::string judge;
    std::map<std::string, TypeAccuracy> per_type;
    TypeAccuracy overall;
    bool operator==(const JudgeScores&) const = default;
};

struct RunReport {
    std::string conversation_id;
    Paradigm paradigm = Paradigm::structmem;
    std::vector<JudgeScores> scores;  // first judge is the primary one
    LedgerSnapshot build_usage{};
    LedgerSnapshot eval_usage{};
    std::vector<QAResult> results;
    std::vector<JudgeVerdictRecord> verdicts;
    std::optional<AgreementReport> agreement;
    nlohmann::json config_snapshot;
    std::vector<std::string> skipped_log;
    std::size_t skipped_questions = 0;

    const JudgeScores* primary() const { return scores.empty() ? nullptr : &scores.front(); }

    nlohmann::json to_json() const;
    static RunReport from_json(const nlohmann::json& j);
    bool operator==(const RunReport&) const = default;
};

/// "CORRECT"/"WRONG" (case-insensitive leading token, then a word search);
/// anything else is unscored.
std::string parse_judge_verdict(const std::string& raw);

/// Answers every mapped QA item through the paradigm's answer op, then has
/// every judge issue one verdict per question. Failed answers score
/// incorrect without a judge call; judge failures leave the item unscored
/// and out of the denominators.
RunReport run_eval(const Conversation& conv, const MemoryStore& store,
                   const MemoryGraph* graph, const RunConfig& config,
                   const PromptSet& prompts, Provider& answerer,
                   const std::vector<std::pair<std::string, Provider*>>& judges,
                   const LedgerSnapshot& build_usage = {});

/// report.json (machine readable) + report.txt (cost table).
void emit_report(const RunReport& report, const std::filesystem::path& dir);
RunReport load_report(const std::filesystem::path& json_path);

/// Aligned text table mirroring the usual cost-columns layout: accuracy by
/// type, build tokens in millions (3 decimals), calls, wall seconds.
std::string report_table(const std::vector<RunReport>& reports);

void write_cost_curve(const std::vector<CostPoint>& curve, const std::filesystem::path& path);

struct Manifest {
    std::string command_line;
    std::string config_hash;
    std::map<std::string, std::string> prompt_hashes;
    std::uint64_t seed = 0;
    std::string created_at;
    std::map<std::string, std::string> outputs;  // logical name -> relative path

    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest load_manifest(const std::filesystem::path& dir);

/// Persists store/graph/ledger/cost curve/build log under `dir` and returns
/// the output map for the manifest.
std::map<std::string, std::string> persist_build(const BuildArtifacts& artifacts,
                                                 const std::filesystem::path& dir);

}  // namespace structmem
