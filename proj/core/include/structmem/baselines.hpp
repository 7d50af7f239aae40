#pragma once

#include "structmem/extraction.hpp"
#include "structmem/graph.hpp"
#include "structmem/retrieval.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace structmem {

enum class Paradigm { flat, graph, structmem };

std::string_view to_string(Paradigm p);
Paradigm paradigm_from_string(std::string_view s);  // throws ConfigError

/// Flat-memory ingestion: factual extraction only, one chat call per
/// utterance, no relational entries and no consolidation. Returns the ids
/// added.
std::vector<std::string> flat_ingest(const Utterance& u, const PromptSet& prompts,
                                     Provider& provider, MemoryStore& store,
                                     UsageLedger& ledger, IdSequence& ids);

struct GraphIngestStats {
    std::size_t entries_added = 0;
    std::size_t nodes_added = 0;
    std::size_t edges_added = 0;
    std::size_t malformed_triples = 0;
};

/// Graph-memory ingestion: factual extraction as flat, then the four
/// cascading graph calls per utterance (entity extraction, entity dedup
/// against existing node names, relation extraction, relation dedup
/// against existing edges among the touched nodes). Five chat calls total.
GraphIngestStats graph_ingest(const Utterance& u, const PromptSet& prompts,
                              Provider& provider, MemoryStore& store, MemoryGraph& graph,
                              UsageLedger& ledger, IdSequence& ids,
                              std::size_t dedup_context_cap = 200);

QAResult answer_flat(const std::string& question_id, const std::string& question,
                     const MemoryStore& store, const PromptSet& prompts, Provider& provider,
                     std::size_t entry_count, UsageLedger& ledger);

/// Flat retrieval plus the incident subgraph of every node whose name or
/// alias appears in the question or the retrieved entries. Edges render as
/// "subject -> relation -> object" lines.
QAResult answer_graph(const std::string& question_id, const std::string& question,
                      const MemoryStore& store, const MemoryGraph& graph,
                      const PromptSet& prompts, Provider& provider, std::size_t entry_count,
                      UsageLedger& ledger);

/// The subgraph selection behind answer_graph, exposed for testing against
/// a linear-scan oracle.
std::vector<GraphEdge> select_subgraph(const MemoryGraph& graph,
                                       const std::vector<std::string>& search_texts);

}  // namespace structmem
