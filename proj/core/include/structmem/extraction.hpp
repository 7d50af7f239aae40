#pragma once

#include "structmem/prompts.hpp"
#include "structmem/provider.hpp"
#include "structmem/store.hpp"
#include "structmem/timestamp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace structmem {

struct Utterance {
    std::string conversation_id;
    std::string session_id;
    Timestamp timestamp;
    std::string speaker;
    std::string text;
};

struct DualExtraction {
    std::vector<std::string> factual;
    std::vector<std::string> relational;
};

/// Deterministic entry-id allocator: zero-padded counter under a prefix, so
/// ids sort in insertion order.
class IdSequence {
public:
    explicit IdSequence(std::string prefix = "e") : prefix_(std::move(prefix)) {}
    std::string next();

private:
    std::string prefix_;
    std::uint64_t counter_ = 0;
};

/// Two prompted model calls per utterance, one per perspective:
/// factual entries (what happened) and relational entries (interpersonal,
/// causal, temporal connections). Either list may be empty.
DualExtraction extract_dual(const Utterance& u, const PromptSet& prompts,
                            Provider& provider, UsageLedger& ledger);

/// Total function turning raw model output into a clean list of entry
/// strings. Primary path: a JSON array of strings (markdown fences
/// tolerated). Fallback: line splitting with bullet/numbering stripping;
/// marker-less prose becomes a single entry. Deduplicates preserving first
/// occurrence.
std::vector<std::string> parse_entry_list(const std::string& raw);

/// extract -> embed (one batch) -> anchor to the utterance timestamp ->
/// store. Returns the ids added, in insertion order.
std::vector<std::string> ingest_utterance(const Utterance& u, const PromptSet& prompts,
                                          Provider& provider, MemoryStore& store,
                                          UsageLedger& ledger, IdSequence& ids);

}  // namespace structmem
