#include "structmem/entry.hpp"

#include "structmem/errors.hpp"

namespace structmem {

std::string_view to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::factual: return "factual";
        case EntryKind::relational: return "relational";
        case EntryKind::synthesis: return "synthesis";
    }
    return "factual";
}

EntryKind entry_kind_from_string(std::string_view s) {
    if (s == "factual") return EntryKind::factual;
    if (s == "relational") return EntryKind::relational;
    if (s == "synthesis") return EntryKind::synthesis;
    throw Error("unknown entry kind: '" + std::string(s) + "'");
}

nlohmann::json entry_to_json(const MemoryEntry& e) {
    nlohmann::json j{
        {"id", e.id},
        {"text", e.text},
        {"kind", std::string(to_string(e.kind))},
        {"timestamp", e.timestamp.to_string()},
        {"conversation_id", e.conversation_id},
        {"consolidated", e.consolidated},
    };
    if (!e.speaker.empty()) j["speaker"] = e.speaker;
    if (e.has_embedding()) j["embedding"] = e.embedding;
    return j;
}

MemoryEntry entry_from_json(const nlohmann::json& j) {
    MemoryEntry e;
    e.id = j.at("id").get<std::string>();
    e.text = j.at("text").get<std::string>();
    e.kind = entry_kind_from_string(j.at("kind").get<std::string>());
    e.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
    e.conversation_id = j.value("conversation_id", std::string{});
    e.consolidated = j.value("consolidated", false);
    e.speaker = j.value("speaker", std::string{});
    if (j.contains("embedding")) e.embedding = j.at("embedding").get<std::vector<float>>();
    return e;
}

}  // namespace structmem
