#pragma once

#include "structmem/timestamp.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace structmem {

enum class EntryKind { factual, relational, synthesis };

std::string_view to_string(EntryKind kind);
EntryKind entry_kind_from_string(std::string_view s);  // throws Error on unknown kind

/// One atomic natural-language memory unit, anchored to its originating
/// dialogue timestamp. Immutable after insertion except the `consolidated`
/// flag.
struct MemoryEntry {
    std::string id;
    std::string text;
    EntryKind kind = EntryKind::factual;
    Timestamp timestamp;
    std::string speaker;          // empty = none
    std::string conversation_id;
    std::vector<float> embedding; // empty = not yet embedded
    bool consolidated = false;

    bool has_embedding() const { return !embedding.empty(); }
    bool operator==(const MemoryEntry&) const = default;
};

/// All entries sharing one timestamp, in insertion order.
struct Event {
    Timestamp timestamp;
    std::vector<std::string> entry_ids;
};

nlohmann::json entry_to_json(const MemoryEntry& e);
MemoryEntry entry_from_json(const nlohmann::json& j);

}  // namespace structmem
