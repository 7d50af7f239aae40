#include "structmem/baselines.hpp"

#include "structmem/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace structmem {

namespace {

constexpr const char* kExtractionSystemPrompt =
    "You are a precise conversational memory component.";
constexpr const char* kGraphSystemPrompt = "You maintain a conversational knowledge graph.";
constexpr const char* kQaSystemPrompt = "You answer questions from conversational memory.";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string join_lines(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += '\n';
        out += item;
    }
    return out;
}

std::vector<std::string> most_recent(std::vector<std::string> items, std::size_t cap) {
    if (cap > 0 && items.size() > cap) {
        items.erase(items.begin(), items.end() - static_cast<std::ptrdiff_t>(cap));
    }
    return items;
}

std::string render_edge(const GraphEdge& e) {
    return e.subject + " -> " + e.relation + " -> " + e.object;
}

std::vector<std::string> ingest_factual(const Utterance& u, const PromptSet& prompts,
                                        Provider& provider, MemoryStore& store,
                                        UsageLedger& ledger, IdSequence& ids) {
    const std::map<std::string, std::string> values{
        {"speaker", u.speaker},
        {"timestamp", u.timestamp.to_string()},
        {"utterance", u.text},
    };
    const ChatCall call{kExtractionSystemPrompt, prompts.fill("fact_extraction", values),
                        provider.chat_model()};
    const auto factual =
        parse_entry_list(provider.complete(call, Stage::extraction_fact, ledger).text);
    if (factual.empty()) return {};

    const auto vectors = provider.embed(factual, ledger);
    std::vector<MemoryEntry> batch;
    std::vector<std::string> new_ids;
    for (std::size_t i = 0; i < factual.size(); ++i) {
        MemoryEntry e;
        e.id = ids.next();
        e.text = factual[i];
        e.kind = EntryKind::factual;
        e.timestamp = u.timestamp;
        e.speaker = u.speaker;
        e.conversation_id = u.conversation_id;
        e.embedding = vectors[i];
        new_ids.push_back(e.id);
        batch.push_back(std::move(e));
    }
    store.add_entries(std::move(batch));
    return new_ids;
}

}  // namespace

std::string_view to_string(Paradigm p) {
    switch (p) {
        case Paradigm::flat: return "flat";
        case Paradigm::graph: return "graph";
        case Paradigm::structmem: return "structmem";
    }
    return "structmem";
}

Paradigm paradigm_from_string(std::string_view s) {
    if (s == "flat") return Paradigm::flat;
    if (s == "graph") return Paradigm::graph;
    if (s == "structmem") return Paradigm::structmem;
    throw ConfigError("unknown paradigm: '" + std::string(s) +
                      "' (expected flat, graph, or structmem)");
}

std::vector<std::string> flat_ingest(const Utterance& u, const PromptSet& prompts,
                                     Provider& provider, MemoryStore& store,
                                     UsageLedger& ledger, IdSequence& ids) {
    return ingest_factual(u, prompts, provider, store, ledger, ids);
}

GraphIngestStats graph_ingest(const Utterance& u, const PromptSet& prompts,
                              Provider& provider, MemoryStore& store, MemoryGraph& graph,
                              UsageLedger& ledger, IdSequence& ids,
                              std::size_t dedup_context_cap) {
    GraphIngestStats stats;
    stats.entries_added = ingest_factual(u, prompts, provider, store, ledger, ids).size();

    const std::map<std::string, std::string> base_values{
        {"speaker", u.speaker},
        {"timestamp", u.timestamp.to_string()},
        {"utterance", u.text},
    };

    // (2) entity extraction
    const ChatCall entity_call{kGraphSystemPrompt,
                               prompts.fill("entity_extraction", base_values),
                               provider.chat_model()};
    const auto surfaces =
        parse_entry_list(provider.complete(entity_call, Stage::graph_entity, ledger).text);

    // (3) entity dedup against existing node names
    const ChatCall dedup_call{
        kGraphSystemPrompt,
        prompts.fill("entity_dedup",
                     {{"entities", join_lines(surfaces)},
                      {"existing", join_lines(most_recent(graph.node_names(),
                                                          dedup_context_cap))}}),
        provider.chat_model()};
    const std::string dedup_raw =
        provider.complete(dedup_call, Stage::graph_entity_dedup, ledger).text;

    std::map<std::string, std::string> mapping;
    {
        const auto parsed = nlohmann::json::parse(dedup_raw, nullptr, false);
        if (parsed.is_object()) {
            for (const auto& [surface, canonical] : parsed.items()) {
                if (canonical.is_string()) {
                    mapping[surface] = canonical_entity_name(canonical.get<std::string>());
                }
            }
        }
    }

    std::vector<std::string> touched;
    std::set<std::string> touched_set;
    for (const auto& surface : surfaces) {
        auto it = mapping.find(surface);
        const std::string canonical =
            it != mapping.end() && !it->second.empty() ? it->second
                                                       : canonical_entity_name(surface);
        if (canonical.empty()) continue;
        const auto [name, created] = graph.upsert_node(surface, canonical, u.timestamp);
        if (created) ++stats.nodes_added;
        if (touched_set.insert(name).second) touched.push_back(name);
    }

    // (4) relation extraction over utterance + deduped entities
    std::string entities_csv;
    for (const auto& name : touched) {
        if (!entities_csv.empty()) entities_csv += ", ";
        entities_csv += name;
    }
    if (entities_csv.empty()) entities_csv = "(none)";
    auto relation_values = base_values;
    relation_values.emplace("entities", entities_csv);
    const ChatCall relation_call{kGraphSystemPrompt,
                                 prompts.fill("relation_extraction", relation_values),
                                 provider.chat_model()};
    const std::string relation_raw =
        provider.complete(relation_call, Stage::graph_relation, ledger).text;

    nlohmann::json candidates = nlohmann::json::parse(relation_raw, nullptr, false);
    if (!candidates.is_array()) candidates = nlohmann::json::array();

    // (5) relation dedup against existing edges among the touched nodes
    std::vector<std::string> existing_edges;
    {
        std::set<std::string> seen;
        for (const auto& name : touched) {
            for (const auto& e : graph.incident_edges(name)) {
                const std::string rendered = render_edge(e);
                if (seen.insert(rendered).second) existing_edges.push_back(rendered);
            }
        }
    }
    const ChatCall rel_dedup_call{
        kGraphSystemPrompt,
        prompts.fill("relation_dedup",
                     {{"candidates", candidates.dump()},
                      {"existing",
                       join_lines(most_recent(existing_edges, dedup_context_cap))}}),
        provider.chat_model()};
    const std::string kept_raw =
        provider.complete(rel_dedup_call, Stage::graph_relation_dedup, ledger).text;

    nlohmann::json kept = nlohmann::json::parse(kept_raw, nullptr, false);
    if (!kept.is_array()) kept = nlohmann::json::array();

    for (const auto& triple : kept) {
        if (!triple.is_object() || !triple.contains("subject") ||
            !triple.contains("relation") || !triple.contains("object") ||
            !triple["subject"].is_string() || !triple["relation"].is_string() ||
            !triple["object"].is_string()) {
            ++stats.malformed_triples;
            continue;
        }
        const std::string relation =
            normalize_relation(triple["relation"].get<std::string>());
        if (relation.empty()) {
            ++stats.malformed_triples;
            continue;
        }
        const auto endpoint = [&](const std::string& raw) -> std::string {
            const std::string canonical = canonical_entity_name(raw);
            if (canonical.empty()) return {};
            if (auto resolved = graph.resolve(raw)) return *resolved;
            if (auto resolved = graph.resolve(canonical)) return *resolved;
            const auto [name, created] = graph.upsert_node(raw, canonical, u.timestamp);
            if (created) ++stats.nodes_added;
            return name;
        };
        const std::string subject = endpoint(triple["subject"].get<std::string>());
        const std::string object = endpoint(triple["object"].get<std::string>());
        if (subject.empty() || object.empty()) {
            ++stats.malformed_triples;
            continue;
        }
        const auto result = graph.add_edge(
            GraphEdge{subject, relation, object, u.timestamp,
                      u.session_id.empty() ? u.conversation_id : u.session_id});
        if (result == AddEdgeResult::added) ++stats.edges_added;
    }
    return stats;
}

QAResult answer_flat(const std::string& question_id, const std::string& question,
                     const MemoryStore& store, const PromptSet& prompts, Provider& provider,
                     std::size_t entry_count, UsageLedger& ledger) {
    QAResult result;
    result.question_id = question_id;

    UsageLedger local;
    try {
        const auto query = provider.embed({question}, local).front();
        const auto entries =
            store.top_k_similar(query, entry_count, [](const MemoryEntry& e) {
                return e.kind != EntryKind::synthesis;
            });
        for (const auto& s : entries) result.entry_ids.push_back(s.id);

        const std::string entries_block = render_scored_block(entries, store);
        result.context_text = "Event memory:\n" + entries_block;

        const ChatCall call{kQaSystemPrompt,
                            prompts.fill("qa_flat", {{"question", question},
                                                     {"entries", entries_block}}),
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

std::vector<GraphEdge> select_subgraph(const MemoryGraph& graph,
                                       const std::vector<std::string>& search_texts) {
    std::vector<std::string> lowered;
    lowered.reserve(search_texts.size());
    for (const auto& t : search_texts) lowered.push_back(lower(t));

    const auto mentioned = [&](const std::string& name) {
        const std::string needle = lower(name);
        if (needle.empty()) return false;
        for (const auto& text : lowered) {
            if (text.find(needle) != std::string::npos) return true;
        }
        return false;
    };

    std::set<std::string> selected;
    for (const auto& node : graph.nodes()) {
        if (mentioned(node.canonical)) {
            selected.insert(node.canonical);
            continue;
        }
        for (const auto& alias : node.aliases) {
            if (mentioned(alias)) {
                selected.insert(node.canonical);
                break;
            }
        }
    }

    std::vector<GraphEdge> out;
    for (const auto& e : graph.edges()) {
        if (selected.count(e.subject) || selected.count(e.object)) out.push_back(e);
    }
    return out;
}

QAResult answer_graph(const std::string& question_id, const std::string& question,
                      const MemoryStore& store, const MemoryGraph& graph,
                      const PromptSet& prompts, Provider& provider, std::size_t entry_count,
                      UsageLedger& ledger) {
    QAResult result;
    result.question_id = question_id;

    UsageLedger local;
    try {
        const auto query = provider.embed({question}, local).front();
        const auto entries =
            store.top_k_similar(query, entry_count, [](const MemoryEntry& e) {
                return e.kind != EntryKind::synthesis;
            });
        for (const auto& s : entries) result.entry_ids.push_back(s.id);
        const std::string entries_block = render_scored_block(entries, store);

        std::vector<std::string> search_texts{question};
        for (const auto& s : entries) {
            if (const MemoryEntry* e = store.find(s.id)) search_texts.push_back(e->text);
        }
        const auto subgraph = select_subgraph(graph, search_texts);
        std::string edges_block;
        for (const auto& e : subgraph) {
            if (!edges_block.empty()) edges_block += '\n';
            edges_block += render_edge(e);
        }
        if (edges_block.empty()) edges_block = "(none)";

        result.context_text =
            "Event memory:\n" + entries_block + "\n\nEntity relations:\n" + edges_block;

        const ChatCall call{kQaSystemPrompt,
                            prompts.fill("qa_graph", {{"question", question},
                                                      {"entries", entries_block},
                                                      {"edges", edges_block}}),
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
