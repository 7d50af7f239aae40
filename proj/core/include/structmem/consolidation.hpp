#pragma once

#include "structmem/extraction.hpp"
#include "structmem/prompts.hpp"
#include "structmem/provider.hpp"
#include "structmem/store.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace structmem {

struct ConsolidationConfig {
    std::int64_t time_threshold_secs = 3600;
    std::size_t seed_count = 15;  // K
    std::size_t max_context_entries = 200;
    bool include_synthesis_seeds = true;
    bool split_synthesis_entries = false;
};

/// Unconsolidated entries since the last synthesis, in arrival order.
class ConsolidationBuffer {
public:
    void append(const std::string& id, const Timestamp& ts);
    void clear();

    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    bool contains(const std::string& id) const;

    Timestamp earliest() const;  // throws EmptyBufferError when empty
    Timestamp latest() const;

private:
    std::vector<std::string> ids_;
    std::optional<Timestamp> earliest_;
    std::optional<Timestamp> latest_;
};

/// The assembled context of one consolidation cycle: the chronologically
/// sorted buffer plus the reconstructed events of the selected seeds,
/// deduplicated and disjoint from the buffer by id.
struct CrossEventContext {
    std::vector<MemoryEntry> buffered;
    std::vector<MemoryEntry> supplementary;
    std::vector<std::string> seed_ids;
};

/// Everything one cycle produced; kept for cost curves and the
/// consolidation-fidelity audit.
struct CycleRecord {
    std::size_t cycle_index = 0;
    std::string buffer_text;
    std::string supplementary_text;
    std::string synthesis_text;
    std::vector<std::string> seed_ids;
    std::vector<std::string> synthesis_ids;
    std::uint64_t template_hash = 0;
    Timestamp stamped;
    bool supplementary_truncated = false;
};

/// True iff the span from the earliest buffered timestamp to the incoming
/// one exceeds the threshold. An incoming timestamp earlier than the
/// latest buffered one is treated as equal to it (and logged to `events`
/// when given).
bool should_consolidate(const ConsolidationBuffer& buffer, const Timestamp& incoming,
                        const ConsolidationConfig& config,
                        std::vector<std::string>* events = nullptr);

/// Buffered texts concatenated in timestamp order (store insertion order
/// breaks same-timestamp ties) and embedded once.
std::vector<float> build_buffer_query(const ConsolidationBuffer& buffer,
                                      const MemoryStore& store, Provider& provider,
                                      UsageLedger& ledger);

/// Top-K historical entries by cosine similarity to the aggregated query.
/// Buffered entries are never seeds; syntheses participate per config.
std::vector<Scored> select_seeds(std::span<const float> query, const MemoryStore& store,
                                 const ConsolidationBuffer& buffer, std::size_t k,
                                 bool include_synthesis_seeds = true);

CrossEventContext assemble_cross_context(const ConsolidationBuffer& buffer,
                                         const std::vector<Scored>& seeds,
                                         const MemoryStore& store);

std::string render_entries_block(const std::vector<MemoryEntry>& entries);

/// One chat call with the constrained synthesis template; the output is
/// stored as synthesis entries stamped with the buffer's latest timestamp,
/// the consumed entries are flagged consolidated, and the buffer is
/// cleared. On provider failure the buffer is left intact for the next
/// trigger.
CycleRecord synthesize(const CrossEventContext& context, const PromptSet& prompts,
                       Provider& provider, MemoryStore& store, ConsolidationBuffer& buffer,
                       const ConsolidationConfig& config, UsageLedger& ledger,
                       IdSequence& ids, std::size_t cycle_index,
                       std::vector<std::string>* events = nullptr);

struct UnconstrainedSynthesis {
    std::string text;
    std::uint64_t template_hash = 0;
};

/// The audit-only variant: same context, template with the grounding
/// constraints removed. Output is not stored.
UnconstrainedSynthesis synthesize_unconstrained(const CrossEventContext& context,
                                                const PromptSet& prompts,
                                                Provider& provider, UsageLedger& ledger,
                                                const ConsolidationConfig& config);

}  // namespace structmem
