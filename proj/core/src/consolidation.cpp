#include "structmem/consolidation.hpp"

#include "structmem/errors.hpp"

#include <algorithm>
#include <set>

namespace structmem {

namespace {

constexpr const char* kSynthesisSystemPrompt =
    "You are a precise conversational memory component.";

/// Chronological order with store insertion sequence as the
/// same-timestamp tie-break, so buffer arrival order does not matter.
std::vector<MemoryEntry> sorted_copies(const std::vector<std::string>& ids,
                                       const MemoryStore& store) {
    struct Keyed {
        std::int64_t epoch;
        std::size_t seq;
        const std::string* id;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(ids.size());
    for (const auto& id : ids) {
        const MemoryEntry* e = store.find(id);
        if (!e) continue;
        keyed.push_back({e->timestamp.epoch_seconds(), store.sequence_of(id).value(), &id});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.epoch != b.epoch) return a.epoch < b.epoch;
        return a.seq < b.seq;
    });
    std::vector<MemoryEntry> out;
    out.reserve(keyed.size());
    for (const auto& k : keyed) out.push_back(*store.find(*k.id));
    return out;
}

std::string truncate_supplementary(std::vector<MemoryEntry>& supplementary,
                                   std::size_t max_entries) {
    if (max_entries == 0 || supplementary.size() <= max_entries) return {};
    const std::size_t dropped = supplementary.size() - max_entries;
    supplementary.erase(supplementary.begin(),
                        supplementary.begin() + static_cast<std::ptrdiff_t>(dropped));
    return "context overflow: dropped " + std::to_string(dropped) +
           " oldest supplementary entries";
}

}  // namespace

void ConsolidationBuffer::append(const std::string& id, const Timestamp& ts) {
    ids_.push_back(id);
    if (!earliest_ || ts < *earliest_) earliest_ = ts;
    if (!latest_ || ts > *latest_) latest_ = ts;
}

void ConsolidationBuffer::clear() {
    ids_.clear();
    earliest_.reset();
    latest_.reset();
}

bool ConsolidationBuffer::contains(const std::string& id) const {
    return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

Timestamp ConsolidationBuffer::earliest() const {
    if (!earliest_) throw EmptyBufferError();
    return *earliest_;
}

Timestamp ConsolidationBuffer::latest() const {
    if (!latest_) throw EmptyBufferError();
    return *latest_;
}

bool should_consolidate(const ConsolidationBuffer& buffer, const Timestamp& incoming,
                        const ConsolidationConfig& config,
                        std::vector<std::string>* events) {
    if (buffer.empty()) return false;
    Timestamp effective = incoming;
    if (incoming < buffer.latest()) {
        if (events) {
            events->push_back("non-monotone timestamp " + incoming.to_string() +
                              " before buffered " + buffer.latest().to_string() +
                              "; treated as equal to latest");
        }
        effective = buffer.latest();
    }
    const std::int64_t span =
        effective.epoch_seconds() - buffer.earliest().epoch_seconds();
    return span > config.time_threshold_secs;
}

std::vector<float> build_buffer_query(const ConsolidationBuffer& buffer,
                                      const MemoryStore& store, Provider& provider,
                                      UsageLedger& ledger) {
    if (buffer.empty()) throw EmptyBufferError();
    const auto entries = sorted_copies(buffer.ids(), store);
    std::string concatenated;
    for (const auto& e : entries) {
        if (!concatenated.empty()) concatenated += '\n';
        concatenated += e.text;
    }
    return provider.embed({concatenated}, ledger).front();
}

std::vector<Scored> select_seeds(std::span<const float> query, const MemoryStore& store,
                                 const ConsolidationBuffer& buffer, std::size_t k,
                                 bool include_synthesis_seeds) {
    const std::set<std::string> buffered(buffer.ids().begin(), buffer.ids().end());
    return store.top_k_similar(query, k, [&](const MemoryEntry& e) {
        if (buffered.count(e.id)) return false;
        if (!include_synthesis_seeds && e.kind == EntryKind::synthesis) return false;
        return true;
    });
}

CrossEventContext assemble_cross_context(const ConsolidationBuffer& buffer,
                                         const std::vector<Scored>& seeds,
                                         const MemoryStore& store) {
    CrossEventContext context;
    context.buffered = sorted_copies(buffer.ids(), store);

    const std::set<std::string> buffered(buffer.ids().begin(), buffer.ids().end());
    std::vector<std::string> supplementary_ids;
    std::set<std::string> seen;
    for (const auto& seed : seeds) {
        context.seed_ids.push_back(seed.id);
        const MemoryEntry* e = store.find(seed.id);
        if (!e) continue;
        for (const auto& id : store.reconstruct_event(e->timestamp).entry_ids) {
            if (buffered.count(id)) continue;  // C_buf and the union stay disjoint
            if (seen.insert(id).second) supplementary_ids.push_back(id);
        }
    }
    context.supplementary = sorted_copies(supplementary_ids, store);
    return context;
}

std::string render_entries_block(const std::vector<MemoryEntry>& entries) {
    if (entries.empty()) return "(none)";
    std::string out;
    for (const auto& e : entries) {
        if (!out.empty()) out += '\n';
        out += "[" + e.timestamp.to_string() + "] " + e.text;
    }
    return out;
}

CycleRecord synthesize(const CrossEventContext& context, const PromptSet& prompts,
                       Provider& provider, MemoryStore& store, ConsolidationBuffer& buffer,
                       const ConsolidationConfig& config, UsageLedger& ledger,
                       IdSequence& ids, std::size_t cycle_index,
                       std::vector<std::string>* events) {
    if (context.buffered.empty()) throw EmptyBufferError();

    CycleRecord record;
    record.cycle_index = cycle_index;
    record.seed_ids = context.seed_ids;
    record.stamped = buffer.latest();
    record.template_hash = prompts.get("synthesis").hash;

    std::vector<MemoryEntry> supplementary = context.supplementary;
    const std::string overflow =
        truncate_supplementary(supplementary, config.max_context_entries);
    if (!overflow.empty()) {
        record.supplementary_truncated = true;
        if (events) events->push_back("cycle " + std::to_string(cycle_index) + ": " + overflow);
    }
    record.buffer_text = render_entries_block(context.buffered);
    record.supplementary_text = render_entries_block(supplementary);

    const ChatCall call{kSynthesisSystemPrompt,
                        prompts.fill("synthesis", {{"buffer", record.buffer_text},
                                                   {"supplementary", record.supplementary_text}}),
                        provider.chat_model()};
    // Provider failures propagate before any mutation: the buffer survives
    // for the next trigger.
    record.synthesis_text = provider.complete(call, Stage::consolidation, ledger).text;

    std::vector<std::string> texts;
    if (config.split_synthesis_entries) {
        texts = parse_entry_list(record.synthesis_text);
    }
    if (texts.empty()) texts = {record.synthesis_text};

    const auto vectors = provider.embed(texts, ledger);
    std::vector<MemoryEntry> batch;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        MemoryEntry e;
        e.id = ids.next();
        e.text = texts[i];
        e.kind = EntryKind::synthesis;
        e.timestamp = record.stamped;
        e.conversation_id = store.conversation_id();
        e.embedding = vectors[i];
        record.synthesis_ids.push_back(e.id);
        batch.push_back(std::move(e));
    }
    store.add_entries(std::move(batch));
    store.mark_consolidated(buffer.ids());
    buffer.clear();
    return record;
}

UnconstrainedSynthesis synthesize_unconstrained(const CrossEventContext& context,
                                                const PromptSet& prompts,
                                                Provider& provider, UsageLedger& ledger,
                                                const ConsolidationConfig& config) {
    if (context.buffered.empty()) throw EmptyBufferError();

    std::vector<MemoryEntry> supplementary = context.supplementary;
    truncate_supplementary(supplementary, config.max_context_entries);

    UnconstrainedSynthesis result;
    result.template_hash = prompts.get("synthesis_unconstrained").hash;
    const ChatCall call{
        kSynthesisSystemPrompt,
        prompts.fill("synthesis_unconstrained",
                     {{"buffer", render_entries_block(context.buffered)},
                      {"supplementary", render_entries_block(supplementary)}}),
        provider.chat_model()};
    result.text = provider.complete(call, Stage::consolidation, ledger).text;
    return result;
}

}  // namespace structmem
