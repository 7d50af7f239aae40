#include "structmem/audit.hpp"

#include "structmem/errors.hpp"
#include "structmem/hash.hpp"

#include <map>

namespace structmem {

namespace {

using nlohmann::json;

constexpr const char* kAuditSystemPrompt = "You audit conversational memory faithfully.";

std::string render_session(const DialogueSession& session) {
    std::string out;
    for (const auto& turn : session.turns) {
        if (!out.empty()) out += '\n';
        out += turn.speaker + ": " + turn.text;
    }
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

CycleLinkAudit judge_cycle_links(std::size_t cycle_index, const std::string& buffer_text,
                                 const std::string& supplementary_text,
                                 const std::string& summary_a, const std::string& summary_b,
                                 std::uint64_t summary_b_hash, const PromptSet& prompts,
                                 Provider& judge, UsageLedger& ledger) {
    CycleLinkAudit audit;
    audit.cycle = cycle_index;
    audit.summary_template_hash = to_hex(summary_b_hash);

    const ChatCall call{kAuditSystemPrompt,
                        prompts.fill("audit_consolidation",
                                     {{"buffer", buffer_text},
                                      {"supplementary", supplementary_text},
                                      {"summary_a", summary_a},
                                      {"summary_b", summary_b}}),
                        judge.chat_model()};
    std::string raw;
    try {
        raw = judge.complete(call, Stage::judge, ledger).text;
    } catch (const ProviderError&) {
        audit.judged = false;
        return audit;
    }

    const json parsed = json::parse(raw, nullptr, false);
    if (parsed.is_object() && parsed.contains("links") && parsed["links"].is_array()) {
        for (const auto& link : parsed["links"]) {
            if (!link.is_object()) continue;
            LinkVerdict verdict;
            verdict.link = link.value("link", std::string{});
            verdict.classification = link.value("classification", std::string{});
            const std::string normalized = lower(verdict.classification);
            verdict.classification = normalized == "spurious" ? "SPURIOUS" : "GROUNDED";
            ++audit.total;
            if (verdict.classification == "SPURIOUS") ++audit.spurious;
            audit.links.push_back(std::move(verdict));
        }
    }
    return audit;
}

}  // namespace

ExtractionAudit audit_extraction_fidelity(const MemoryStore& store, const Conversation& conv,
                                          const PromptSet& prompts, Provider& judge,
                                          UsageLedger& ledger) {
    std::map<std::int64_t, const DialogueSession*> session_by_epoch;
    for (const auto& session : conv.sessions) {
        session_by_epoch.emplace(session.datetime.epoch_seconds(), &session);
    }

    ExtractionAudit audit;
    for (const auto& entry : store.all_entries()) {
        if (entry.kind == EntryKind::synthesis) continue;
        ExtractionAuditRow row{entry.id, "unscored", ""};

        auto it = session_by_epoch.find(entry.timestamp.epoch_seconds());
        if (it == session_by_epoch.end()) {
            row.raw = "no session matches the entry timestamp";
            ++audit.unscored;
            audit.rows.push_back(std::move(row));
            continue;
        }

        const ChatCall call{kAuditSystemPrompt,
                            prompts.fill("audit_extraction",
                                         {{"segment", render_session(*it->second)},
                                          {"entry", entry.text}}),
                            judge.chat_model()};
        try {
            row.raw = judge.complete(call, Stage::judge, ledger).text;
            const std::string text = lower(row.raw);
            if (text.find("hallucinated") != std::string::npos) {
                row.verdict = "hallucinated";
                ++audit.judged;
                ++audit.hallucinated;
            } else if (text.find("grounded") != std::string::npos) {
                row.verdict = "grounded";
                ++audit.judged;
            } else {
                ++audit.unscored;
            }
        } catch (const ProviderError& ex) {
            row.raw = std::string("judge provider error: ") + ex.what();
            ++audit.unscored;
        }
        audit.rows.push_back(std::move(row));
    }
    return audit;
}

nlohmann::json ExtractionAudit::to_json() const {
    json rows_json = json::array();
    for (const auto& row : rows) {
        rows_json.push_back(
            {{"entry_id", row.entry_id}, {"verdict", row.verdict}, {"raw", row.raw}});
    }
    return json{{"rows", rows_json},
                {"judged", judged},
                {"hallucinated", hallucinated},
                {"unscored", unscored},
                {"rate", rate() ? json(*rate()) : json(nullptr)}};
}

ConsolidationAudit audit_consolidation_fidelity(const Conversation& conv,
                                                const RunConfig& config,
                                                const PromptSet& prompts,
                                                Provider& build_provider, Provider& judge,
                                                Clock& clock, UsageLedger& ledger) {
    ConsolidationAudit audit;
    audit.constrained.variant = "constrained";
    audit.unconstrained.variant = "unconstrained";

    RunConfig baseline_config = config;
    baseline_config.paradigm = Paradigm::structmem;
    baseline_config.consolidation.seed_count = 0;
    RunConfig test_config = config;
    test_config.paradigm = Paradigm::structmem;

    const BuildArtifacts baseline =
        run_build(conv, baseline_config, prompts, build_provider, clock);
    const BuildArtifacts test = run_build(conv, test_config, prompts, build_provider, clock);

    const std::size_t cycles = std::min(baseline.cycles.size(), test.cycles.size());
    audit.cycles = cycles;
    if (baseline.cycles.size() != test.cycles.size()) {
        audit.events.push_back("cycle count mismatch: baseline " +
                               std::to_string(baseline.cycles.size()) + ", test " +
                               std::to_string(test.cycles.size()) +
                               "; auditing the common prefix");
    }

    for (std::size_t i = 0; i < cycles; ++i) {
        const CycleRecord& a = baseline.cycles[i];
        const CycleRecord& b = test.cycles[i];

        auto constrained = judge_cycle_links(i, b.buffer_text, b.supplementary_text,
                                             a.synthesis_text, b.synthesis_text,
                                             b.template_hash, prompts, judge, ledger);
        audit.constrained.spurious += constrained.spurious;
        audit.constrained.total += constrained.total;
        audit.constrained.cycles.push_back(std::move(constrained));

        // Unconstrained variant of Summary B over the same rendered context.
        UnconstrainedSynthesis loose;
        try {
            const ChatCall call{
                kAuditSystemPrompt,
                prompts.fill("synthesis_unconstrained",
                             {{"buffer", b.buffer_text},
                              {"supplementary", b.supplementary_text}}),
                build_provider.chat_model()};
            loose.text = build_provider.complete(call, Stage::consolidation, ledger).text;
            loose.template_hash = prompts.get("synthesis_unconstrained").hash;
        } catch (const ProviderError& ex) {
            audit.events.push_back("cycle " + std::to_string(i) +
                                   " unconstrained synthesis failed: " + ex.what());
            CycleLinkAudit failed;
            failed.cycle = i;
            failed.judged = false;
            audit.unconstrained.cycles.push_back(std::move(failed));
            continue;
        }
        auto unconstrained = judge_cycle_links(i, b.buffer_text, b.supplementary_text,
                                               a.synthesis_text, loose.text,
                                               loose.template_hash, prompts, judge, ledger);
        audit.unconstrained.spurious += unconstrained.spurious;
        audit.unconstrained.total += unconstrained.total;
        audit.unconstrained.cycles.push_back(std::move(unconstrained));
    }
    return audit;
}

nlohmann::json ConsolidationAudit::to_json() const {
    const auto variant_json = [](const VariantLinkAudit& v) {
        json cycles_json = json::array();
        for (const auto& c : v.cycles) {
            json links_json = json::array();
            for (const auto& l : c.links) {
                links_json.push_back({{"link", l.link}, {"classification", l.classification}});
            }
            cycles_json.push_back({{"cycle", c.cycle},
                                   {"links", links_json},
                                   {"spurious", c.spurious},
                                   {"total", c.total},
                                   {"template_hash", c.summary_template_hash},
                                   {"judged", c.judged}});
        }
        return json{{"variant", v.variant},
                    {"cycles", cycles_json},
                    {"spurious", v.spurious},
                    {"total", v.total},
                    {"rate", v.rate() ? json(*v.rate()) : json(nullptr)}};
    };
    return json{{"constrained", variant_json(constrained)},
                {"unconstrained", variant_json(unconstrained)},
                {"cycles", cycles},
                {"events", events}};
}

}  // namespace structmem
