#pragma once

#include "structmem/config.hpp"
#include "structmem/dataset.hpp"
#include "structmem/harness.hpp"
#include "structmem/prompts.hpp"
#include "structmem/provider.hpp"
#include "structmem/store.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace structmem {

struct ExtractionAuditRow {
    std::string entry_id;
    std::string verdict;  // "grounded" | "hallucinated" | "unscored"
    std::string raw;
};

struct ExtractionAudit {
    std::vector<ExtractionAuditRow> rows;
    std::size_t judged = 0;
    std::size_t hallucinated = 0;
    std::size_t unscored = 0;

    std::optional<double> rate() const {
        if (judged == 0) return std::nullopt;
        return static_cast<double>(hallucinated) / static_cast<double>(judged);
    }
    nlohmann::json to_json() const;
};

/// For every factual/relational entry: the judge sees all turns of the
/// entry's session plus the entry, and rules it grounded or hallucinated.
/// Judge failures are excluded from the denominator and counted.
ExtractionAudit audit_extraction_fidelity(const MemoryStore& store, const Conversation& conv,
                                          const PromptSet& prompts, Provider& judge,
                                          UsageLedger& ledger);

struct LinkVerdict {
    std::string link;
    std::string classification;  // "GROUNDED" | "SPURIOUS"
};

struct CycleLinkAudit {
    std::size_t cycle = 0;
    std::vector<LinkVerdict> links;
    std::size_t spurious = 0;
    std::size_t total = 0;
    std::string summary_template_hash;
    bool judged = true;
};

struct VariantLinkAudit {
    std::string variant;  // "constrained" | "unconstrained"
    std::vector<CycleLinkAudit> cycles;
    std::size_t spurious = 0;
    std::size_t total = 0;

    std::optional<double> rate() const {
        if (total == 0) return std::nullopt;  // 0/0 reported as undefined
        return static_cast<double>(spurious) / static_cast<double>(total);
    }
};

struct ConsolidationAudit {
    VariantLinkAudit constrained;
    VariantLinkAudit unconstrained;
    std::size_t cycles = 0;
    std::vector<std::string> events;
    nlohmann::json to_json() const;
};

/// Two builds of the conversation: Summary A from a K=0 baseline build,
/// Summary B from the configured-K build (plus an unconstrained-template
/// rerun of B's contexts). Per cycle the judge lists the cross-event links
/// B adds over A and classifies each as grounded or spurious.
ConsolidationAudit audit_consolidation_fidelity(const Conversation& conv,
                                                const RunConfig& config,
                                                const PromptSet& prompts,
                                                Provider& build_provider, Provider& judge,
                                                Clock& clock, UsageLedger& ledger);

}  // namespace structmem
