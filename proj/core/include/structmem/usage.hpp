#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <atomic>
#include <cstdint>
#include <string_view>

namespace structmem {

/// Pipeline stages metered separately, matching the cost breakdown the
/// reports print.
enum class Stage {
    extraction_fact,
    extraction_rel,
    consolidation,
    graph_entity,
    graph_entity_dedup,
    graph_relation,
    graph_relation_dedup,
    embedding,
    qa,
    judge,
};

constexpr std::size_t kStageCount = 10;

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

struct StageTotals {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t calls = 0;
    double wall_seconds = 0.0;

    StageTotals& operator+=(const StageTotals& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        calls += o.calls;
        wall_seconds += o.wall_seconds;
        return *this;
    }
    bool operator==(const StageTotals&) const = default;
};

using LedgerSnapshot = std::array<StageTotals, kStageCount>;

nlohmann::json snapshot_to_json(const LedgerSnapshot& snap);
LedgerSnapshot snapshot_from_json(const nlohmann::json& j);
StageTotals snapshot_total(const LedgerSnapshot& snap);
StageTotals snapshot_total_chat(const LedgerSnapshot& snap);  // excludes embedding

/// Per-stage counters behind the cost columns of the run reports. Safe for
/// concurrent increments; counters are monotone non-decreasing.
class UsageLedger {
public:
    UsageLedger() = default;
    UsageLedger(const UsageLedger&) = delete;
    UsageLedger& operator=(const UsageLedger&) = delete;

    void record(Stage stage, std::int64_t input_tokens, std::int64_t output_tokens,
                double wall_seconds);

    void merge(const LedgerSnapshot& snap);

    StageTotals stage(Stage s) const;
    StageTotals total() const;
    StageTotals total_chat() const;  // all stages except embedding

    LedgerSnapshot snapshot() const;

    nlohmann::json to_json() const { return snapshot_to_json(snapshot()); }
    static LedgerSnapshot from_json(const nlohmann::json& j) { return snapshot_from_json(j); }

private:
    struct Cell {
        std::atomic<std::int64_t> input_tokens{0};
        std::atomic<std::int64_t> output_tokens{0};
        std::atomic<std::int64_t> calls{0};
        std::atomic<double> wall_seconds{0.0};
    };
    std::array<Cell, kStageCount> cells_;
};

}  // namespace structmem
