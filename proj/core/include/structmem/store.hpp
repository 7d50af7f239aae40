#pragma once

#include "structmem/entry.hpp"
#include "structmem/timestamp.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace structmem {

struct Scored {
    std::string id;
    double similarity = 0.0;
    bool operator==(const Scored&) const = default;
};

using EntryFilter = std::function<bool(const MemoryEntry&)>;

/// Typed memory store: a timestamp index for event reconstruction plus an
/// exhaustive-scan vector index for top-k cosine queries. Single writer,
/// concurrent readers; entries are immutable after insertion except the
/// `consolidated` flag.
class MemoryStore {
public:
    MemoryStore(std::size_t dimension, std::string conversation_id);

    MemoryStore(MemoryStore&&) noexcept;
    MemoryStore& operator=(MemoryStore&&) noexcept;
    MemoryStore(const MemoryStore&) = delete;
    MemoryStore& operator=(const MemoryStore&) = delete;

    std::size_t dimension() const { return dimension_; }
    const std::string& conversation_id() const { return conversation_id_; }
    std::size_t size() const;

    /// Validates every entry (fresh id, matching dimension, finite
    /// embedding components) before inserting any of them, then inserts all
    /// in order. Returns the number added.
    std::size_t add_entries(std::vector<MemoryEntry> entries);

    /// All entries carrying exactly this timestamp, in insertion order.
    /// Empty Event when the timestamp is unknown.
    Event reconstruct_event(const Timestamp& ts) const;

    /// The k most similar embedded entries passing `filter`, descending
    /// similarity. Ties break to the later timestamp, then the
    /// lexicographically smaller id. Throws DimensionMismatchError when the
    /// query dimension differs from the store's.
    std::vector<Scored> top_k_similar(std::span<const float> query, std::size_t k,
                                      const EntryFilter& filter = {}) const;

    const MemoryEntry* find(const std::string& id) const;

    /// Insertion sequence of an entry; used as the same-timestamp tie-break
    /// in chronological sorts. Nullopt for unknown ids.
    std::optional<std::size_t> sequence_of(const std::string& id) const;

    void mark_consolidated(std::span<const std::string> ids);

    /// Snapshot of all entries in insertion order (copies).
    std::vector<MemoryEntry> all_entries() const;

    /// Line-delimited persistence: header record then one entry per line.
    void save(const std::filesystem::path& path) const;
    static MemoryStore load(const std::filesystem::path& path);

    bool deep_equal(const MemoryStore& other) const;

private:
    std::size_t dimension_;
    std::string conversation_id_;
    std::vector<MemoryEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::map<std::int64_t, std::vector<std::size_t>> by_timestamp_;
    mutable std::shared_mutex mutex_;
};

}  // namespace structmem
