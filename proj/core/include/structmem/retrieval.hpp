#pragma once

#include "structmem/prompts.hpp"
#include "structmem/provider.hpp"
#include "structmem/store.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace structmem {

struct RetrievalConfig {
    std::size_t entry_count = 60;
    std::size_t synthesis_count = 5;
};

/// Evaluation record for one answered question.
struct QAResult {
    std::string question_id;
    std::vector<std::string> entry_ids;      // ranked
    std::vector<std::string> synthesis_ids;  // ranked
    std::string context_text;
    std::string answer;
    LedgerSnapshot usage{};
    bool error = false;
    std::string error_message;

    nlohmann::json to_json() const;
    static QAResult from_json(const nlohmann::json& j);
    bool operator==(const QAResult&) const = default;
};

struct RetrievedContext {
    std::vector<Scored> entries;
    std::vector<Scored> syntheses;
};

/// Dual-circuit retrieval: the question is embedded once, then ranked
/// separately over atomic entries (factual + relational) and over
/// syntheses.
RetrievedContext retrieve_context(const std::string& question, const MemoryStore& store,
                                  Provider& provider, const RetrievalConfig& config,
                                  UsageLedger& ledger);

/// One embedding call and one chat call; the rendered context lists the
/// syntheses block first, then the ranked entries, every line prefixed
/// with its timestamp. A provider failure yields a QAResult with the error
/// marker set instead of propagating.
QAResult answer_structmem(const std::string& question_id, const std::string& question,
                          const MemoryStore& store, const PromptSet& prompts,
                          Provider& provider, const RetrievalConfig& config,
                          UsageLedger& ledger);

/// Shared rendering used by every paradigm's answer path.
std::string render_scored_block(const std::vector<Scored>& scored, const MemoryStore& store);

}  // namespace structmem
