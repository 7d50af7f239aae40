#include "structmem/usage.hpp"

#include "structmem/errors.hpp"

namespace structmem {

namespace {
constexpr std::array<std::string_view, kStageCount> kStageNames = {
    "extraction_fact",  "extraction_rel", "consolidation",  "graph_entity",
    "graph_entity_dedup", "graph_relation", "graph_relation_dedup",
    "embedding",        "qa",             "judge",
};
}

std::string_view to_string(Stage s) {
    return kStageNames[static_cast<std::size_t>(s)];
}

Stage stage_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kStageCount; ++i) {
        if (kStageNames[i] == s) return static_cast<Stage>(i);
    }
    throw Error("unknown stage: '" + std::string(s) + "'");
}

void UsageLedger::record(Stage stage, std::int64_t input_tokens, std::int64_t output_tokens,
                         double wall_seconds) {
    auto& cell = cells_[static_cast<std::size_t>(stage)];
    cell.input_tokens.fetch_add(input_tokens, std::memory_order_relaxed);
    cell.output_tokens.fetch_add(output_tokens, std::memory_order_relaxed);
    cell.calls.fetch_add(1, std::memory_order_relaxed);
    cell.wall_seconds.fetch_add(wall_seconds, std::memory_order_relaxed);
}

void UsageLedger::merge(const LedgerSnapshot& snap) {
    for (std::size_t i = 0; i < kStageCount; ++i) {
        auto& cell = cells_[i];
        cell.input_tokens.fetch_add(snap[i].input_tokens, std::memory_order_relaxed);
        cell.output_tokens.fetch_add(snap[i].output_tokens, std::memory_order_relaxed);
        cell.calls.fetch_add(snap[i].calls, std::memory_order_relaxed);
        cell.wall_seconds.fetch_add(snap[i].wall_seconds, std::memory_order_relaxed);
    }
}

StageTotals UsageLedger::stage(Stage s) const {
    const auto& cell = cells_[static_cast<std::size_t>(s)];
    return {cell.input_tokens.load(), cell.output_tokens.load(), cell.calls.load(),
            cell.wall_seconds.load()};
}

StageTotals UsageLedger::total() const {
    StageTotals t;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        t += stage(static_cast<Stage>(i));
    }
    return t;
}

StageTotals UsageLedger::total_chat() const {
    StageTotals t;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        if (static_cast<Stage>(i) == Stage::embedding) continue;
        t += stage(static_cast<Stage>(i));
    }
    return t;
}

LedgerSnapshot UsageLedger::snapshot() const {
    LedgerSnapshot snap;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        snap[i] = stage(static_cast<Stage>(i));
    }
    return snap;
}

nlohmann::json snapshot_to_json(const LedgerSnapshot& snap) {
    nlohmann::json stages = nlohmann::json::object();
    for (std::size_t i = 0; i < kStageCount; ++i) {
        const auto& t = snap[i];
        if (t.calls == 0 && t.input_tokens == 0 && t.output_tokens == 0) continue;
        stages[std::string(kStageNames[i])] = {
            {"input_tokens", t.input_tokens},
            {"output_tokens", t.output_tokens},
            {"calls", t.calls},
            {"wall_seconds", t.wall_seconds},
        };
    }
    const StageTotals total = snapshot_total(snap);
    return nlohmann::json{
        {"stages", stages},
        {"total",
         {{"input_tokens", total.input_tokens},
          {"output_tokens", total.output_tokens},
          {"calls", total.calls},
          {"wall_seconds", total.wall_seconds}}},
    };
}

LedgerSnapshot snapshot_from_json(const nlohmann::json& j) {
    LedgerSnapshot snap{};
    for (const auto& [name, t] : j.at("stages").items()) {
        const auto idx = static_cast<std::size_t>(stage_from_string(name));
        snap[idx].input_tokens = t.at("input_tokens").get<std::int64_t>();
        snap[idx].output_tokens = t.at("output_tokens").get<std::int64_t>();
        snap[idx].calls = t.at("calls").get<std::int64_t>();
        snap[idx].wall_seconds = t.at("wall_seconds").get<double>();
    }
    return snap;
}

StageTotals snapshot_total(const LedgerSnapshot& snap) {
    StageTotals t;
    for (const auto& s : snap) t += s;
    return t;
}

StageTotals snapshot_total_chat(const LedgerSnapshot& snap) {
    StageTotals t;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        if (static_cast<Stage>(i) == Stage::embedding) continue;
        t += snap[i];
    }
    return t;
}

}  // namespace structmem
