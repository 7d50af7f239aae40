#include "structmem/retrieval.hpp"

#include "structmem/errors.hpp"

namespace structmem {

namespace {
constexpr const char* kQaSystemPrompt = "You answer questions from conversational memory.";
}

nlohmann::json QAResult::to_json() const {
    return nlohmann::json{
        {"question_id", question_id},
        {"entry_ids", entry_ids},
        {"synthesis_ids", synthesis_ids},
        {"context_text", context_text},
        {"answer", answer},
        {"usage", snapshot_to_json(usage)},
        {"error", error},
        {"error_message", error_message},
    };
}

QAResult QAResult::from_json(const nlohmann::json& j) {
    QAResult r;
    r.question_id = j.at("question_id").get<std::string>();
    r.entry_ids = j.at("entry_ids").get<std::vector<std::string>>();
    r.synthesis_ids = j.at("synthesis_ids").get<std::vector<std::string>>();
    r.context_text = j.at("context_text").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.usage = snapshot_from_json(j.at("usage"));
    r.error = j.at("error").get<bool>();
    r.error_message = j.at("error_message").get<std::string>();
    return r;
}

RetrievedContext retrieve_context(const std::string& question, const MemoryStore& store,
                                  Provider& provider, const RetrievalConfig& config,
                                  UsageLedger& ledger) {
    const auto query = provider.embed({question}, ledger).front();
    RetrievedContext ctx;
    ctx.entries = store.top_k_similar(query, config.entry_count, [](const MemoryEntry& e) {
        return e.kind != EntryKind::synthesis;
    });
    ctx.syntheses =
        store.top_k_similar(query, config.synthesis_count, [](const MemoryEntry& e) {
            return e.kind == EntryKind::synthesis;
        });
    return ctx;
}

std::string render_scored_block(const std::vector<Scored>& scored,
                                const MemoryStore& store) {
    if (scored.empty()) return "(none)";
    std::string out;
    for (const auto& s : scored) {
        const MemoryEntry* e = store.find(s.id);
        if (!e) continue;
        if (!out.empty()) out += '\n';
        out += "[" + e->timestamp.to_string() + "] " + e->text;
    }
    return out.empty() ? "(none)" : out;
}

QAResult answer_structmem(const std::string& question_id, const std::string& question,
                          const MemoryStore& store, const PromptSet& prompts,
                          Provider& provider, const RetrievalConfig& config,
                          UsageLedger& ledger) {
    QAResult result;
    result.question_id = question_id;

    UsageLedger local;
    try {
        const auto ctx = retrieve_context(question, store, provider, config, local);
        for (const auto& s : ctx.entries) result.entry_ids.push_back(s.id);
        for (const auto& s : ctx.syntheses) result.synthesis_ids.push_back(s.id);

        const std::string syntheses_block = render_scored_block(ctx.syntheses, store);
        const std::string entries_block = render_scored_block(ctx.entries, store);
        result.context_text =
            "Synthesis memory:\n" + syntheses_block + "\n\nEvent memory:\n" + entries_block;

        const ChatCall call{kQaSystemPrompt,
                            prompts.fill("qa_structmem", {{"question", question},
                                                          {"entries", entries_block},
                                                          {"syntheses", syntheses_block}}),
                            provider.chat_model()};
        result.answer = provider.complete(call, Stage::qa, local).text;
    } catch (const ProviderError& ex) {
        result.error = true;
        result.error_message = ex.what();
    }
    result.usage = local.snapshot();
    ledger.merge(result.usage);
    return result;
}

}  // namespace structmem
