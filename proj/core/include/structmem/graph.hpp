#pragma once

#include "structmem/timestamp.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace structmem {

struct GraphNode {
    std::string canonical;          // lowercase snake_case, unique
    std::set<std::string> aliases;  // surface forms seen for this node
    Timestamp first_seen;
    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    std::string subject;   // canonical node name
    std::string relation;  // snake_case
    std::string object;    // canonical node name
    Timestamp timestamp;
    std::string provenance;  // originating utterance id
    bool operator==(const GraphEdge&) const = default;
};

enum class AddEdgeResult { added, duplicate, self_loop };

/// Entity-relation store behind the graph-memory baseline. Node identity is
/// the canonical name; every alias maps to exactly one node. Edge identity
/// is the (subject, relation, object) triple.
class MemoryGraph {
public:
    explicit MemoryGraph(std::string conversation_id = {}, bool allow_self_loops = false)
        : conversation_id_(std::move(conversation_id)), allow_self_loops_(allow_self_loops) {}

    const std::string& conversation_id() const { return conversation_id_; }

    /// Registers the surface form under the canonical name, creating the
    /// node when new. Returns {canonical, node_was_created}.
    std::pair<std::string, bool> upsert_node(const std::string& surface,
                                             const std::string& canonical,
                                             const Timestamp& first_seen);

    /// Canonical name for a surface form or canonical name, if known.
    std::optional<std::string> resolve(const std::string& name) const;

    AddEdgeResult add_edge(GraphEdge edge);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    std::vector<GraphEdge> incident_edges(const std::string& canonical) const;

    /// Canonical names, most recently created last.
    std::vector<std::string> node_names() const;

    void save(const std::filesystem::path& path) const;
    static MemoryGraph load(const std::filesystem::path& path);
    bool deep_equal(const MemoryGraph& other) const;

private:
    std::string conversation_id_;
    bool allow_self_loops_ = false;
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
    std::map<std::string, std::size_t> by_canonical_;
    std::map<std::string, std::string> alias_to_canonical_;
    std::set<std::string> edge_keys_;
};

/// lowercase snake_case ASCII; non-alphanumerics collapse to single
/// underscores.
std::string canonical_entity_name(const std::string& surface);
std::string normalize_relation(const std::string& relation);

}  // namespace structmem
