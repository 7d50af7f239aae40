#include "structmem/store.hpp"

#include "structmem/errors.hpp"
#include "structmem/similarity.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

namespace structmem {

namespace {
constexpr int kFormatVersion = 1;
}

MemoryStore::MemoryStore(std::size_t dimension, std::string conversation_id)
    : dimension_(dimension), conversation_id_(std::move(conversation_id)) {}

MemoryStore::MemoryStore(MemoryStore&& other) noexcept
    : dimension_(other.dimension_),
      conversation_id_(std::move(other.conversation_id_)),
      entries_(std::move(other.entries_)),
      by_id_(std::move(other.by_id_)),
      by_timestamp_(std::move(other.by_timestamp_)) {}

MemoryStore& MemoryStore::operator=(MemoryStore&& other) noexcept {
    if (this != &other) {
        dimension_ = other.dimension_;
        conversation_id_ = std::move(other.conversation_id_);
        entries_ = std::move(other.entries_);
        by_id_ = std::move(other.by_id_);
        by_timestamp_ = std::move(other.by_timestamp_);
    }
    return *this;
}

std::size_t MemoryStore::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::size_t MemoryStore::add_entries(std::vector<MemoryEntry> entries) {
    std::unique_lock lock(mutex_);

    // Validate the whole batch before touching the indexes.
    for (const auto& e : entries) {
        if (e.id.empty()) throw Error("entry id must be non-empty");
        if (by_id_.count(e.id)) throw DuplicateIdError(e.id);
        if (e.has_embedding()) {
            if (e.embedding.size() != dimension_) {
                throw DimensionMismatchError(dimension_, e.embedding.size());
            }
            for (float v : e.embedding) {
                if (!std::isfinite(v)) {
                    throw Error("entry '" + e.id + "' has a non-finite embedding component");
                }
            }
        }
    }
    {
        std::set<std::string_view> batch_ids;
        for (const auto& e : entries) {
            if (!batch_ids.insert(e.id).second) throw DuplicateIdError(e.id);
        }
    }

    const std::size_t added = entries.size();
    for (auto& e : entries) {
        const std::size_t idx = entries_.size();
        by_id_.emplace(e.id, idx);
        by_timestamp_[e.timestamp.epoch_seconds()].push_back(idx);
        entries_.push_back(std::move(e));
    }
    return added;
}

Event MemoryStore::reconstruct_event(const Timestamp& ts) const {
    std::shared_lock lock(mutex_);
    Event ev{ts, {}};
    auto it = by_timestamp_.find(ts.epoch_seconds());
    if (it == by_timestamp_.end()) return ev;
    ev.entry_ids.reserve(it->second.size());
    for (std::size_t idx : it->second) {
        ev.entry_ids.push_back(entries_[idx].id);
    }
    return ev;
}

std::vector<Scored> MemoryStore::top_k_similar(std::span<const float> query, std::size_t k,
                                               const EntryFilter& filter) const {
    std::shared_lock lock(mutex_);
    if (query.size() != dimension_) {
        throw DimensionMismatchError(dimension_, query.size());
    }
    if (k == 0) return {};

    struct Candidate {
        double similarity;
        std::int64_t epoch;
        const std::string* id;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (!e.has_embedding()) continue;
        if (filter && !filter(e)) continue;
        candidates.push_back({cosine_similarity(query, e.embedding),
                              e.timestamp.epoch_seconds(), &e.id});
    }

    const auto better = [](const Candidate& a, const Candidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        if (a.epoch != b.epoch) return a.epoch > b.epoch;  // later timestamp wins
        return *a.id < *b.id;
    };
    if (candidates.size() > k) {
        std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), better);
        candidates.resize(k);
    } else {
        std::sort(candidates.begin(), candidates.end(), better);
    }

    std::vector<Scored> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back({*c.id, c.similarity});
    }
    return out;
}

const MemoryEntry* MemoryStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::optional<std::size_t> MemoryStore::sequence_of(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

void MemoryStore::mark_consolidated(std::span<const std::string> ids) {
    std::unique_lock lock(mutex_);
    for (const auto& id : ids) {
        auto it = by_id_.find(id);
        if (it != by_id_.end()) entries_[it->second].consolidated = true;
    }
}

std::vector<MemoryEntry> MemoryStore::all_entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

void MemoryStore::save(const std::filesystem::path& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

    nlohmann::json header{{"version", kFormatVersion},
                          {"dimension", dimension_},
                          {"conversation_id", conversation_id_}};
    out << header.dump() << '\n';
    for (const auto& e : entries_) {
        out << entry_to_json(e).dump() << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MemoryStore MemoryStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line)) {
        throw CorruptRecordError(1, "missing header record");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
        throw CorruptRecordError(1, ex.what());
    }
    const int version = header.value("version", -1);
    if (version != kFormatVersion) {
        throw VersionMismatchError(kFormatVersion, version);
    }
    MemoryStore store(header.at("dimension").get<std::size_t>(),
                      header.value("conversation_id", std::string{}));

    std::size_t line_no = 1;
    std::vector<MemoryEntry> batch;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            batch.push_back(entry_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& ex) {
            throw CorruptRecordError(line_no, ex.what());
        }
    }
    store.add_entries(std::move(batch));
    return store;
}

bool MemoryStore::deep_equal(const MemoryStore& other) const {
    if (dimension_ != other.dimension_ || conversation_id_ != other.conversation_id_) {
        return false;
    }
    return all_entries() == other.all_entries();
}

}  // namespace structmem
