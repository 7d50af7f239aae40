#include "structmem/graph.hpp"

#include "structmem/errors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>

namespace structmem {

namespace {

constexpr int kFormatVersion = 1;

std::string edge_key(const GraphEdge& e) {
    return e.subject + "\x1f" + e.relation + "\x1f" + e.object;
}

std::string snake_case(const std::string& text) {
    std::string out;
    bool prev_sep = true;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            prev_sep = false;
        } else if (!prev_sep) {
            out.push_back('_');
            prev_sep = true;
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

}  // namespace

std::string canonical_entity_name(const std::string& surface) { return snake_case(surface); }
std::string normalize_relation(const std::string& relation) { return snake_case(relation); }

std::pair<std::string, bool> MemoryGraph::upsert_node(const std::string& surface,
                                                      const std::string& canonical,
                                                      const Timestamp& first_seen) {
    // An already-known alias wins over the proposed canonical name: aliases
    // stay a function.
    auto alias_it = alias_to_canonical_.find(surface);
    const std::string name =
        alias_it != alias_to_canonical_.end() ? alias_it->second : canonical;
    if (name.empty()) {
        throw Error("canonical entity name must be non-empty");
    }

    auto it = by_canonical_.find(name);
    bool created = false;
    if (it == by_canonical_.end()) {
        by_canonical_.emplace(name, nodes_.size());
        nodes_.push_back(GraphNode{name, {}, first_seen});
        it = by_canonical_.find(name);
        created = true;
    }
    nodes_[it->second].aliases.insert(surface);
    alias_to_canonical_.emplace(surface, name);
    return {name, created};
}

std::optional<std::string> MemoryGraph::resolve(const std::string& name) const {
    if (by_canonical_.count(name)) return name;
    auto it = alias_to_canonical_.find(name);
    if (it != alias_to_canonical_.end()) return it->second;
    return std::nullopt;
}

AddEdgeResult MemoryGraph::add_edge(GraphEdge edge) {
    if (edge.relation.empty()) {
        throw Error("edge relation must be non-empty");
    }
    if (edge.subject == edge.object && !allow_self_loops_) {
        return AddEdgeResult::self_loop;
    }
    if (!edge_keys_.insert(edge_key(edge)).second) {
        return AddEdgeResult::duplicate;
    }
    edges_.push_back(std::move(edge));
    return AddEdgeResult::added;
}

std::vector<GraphEdge> MemoryGraph::incident_edges(const std::string& canonical) const {
    std::vector<GraphEdge> out;
    for (const auto& e : edges_) {
        if (e.subject == canonical || e.object == canonical) out.push_back(e);
    }
    return out;
}

std::vector<std::string> MemoryGraph::node_names() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.canonical);
    return out;
}

void MemoryGraph::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

    out << nlohmann::json{{"version", kFormatVersion},
                          {"kind", "graph"},
                          {"conversation_id", conversation_id_},
                          {"allow_self_loops", allow_self_loops_}}
               .dump()
        << '\n';
    for (const auto& n : nodes_) {
        out << nlohmann::json{{"type", "node"},
                              {"canonical", n.canonical},
                              {"aliases", n.aliases},
                              {"first_seen", n.first_seen.to_string()}}
                   .dump()
            << '\n';
    }
    for (const auto& e : edges_) {
        out << nlohmann::json{{"type", "edge"},
                              {"subject", e.subject},
                              {"relation", e.relation},
                              {"object", e.object},
                              {"timestamp", e.timestamp.to_string()},
                              {"provenance", e.provenance}}
                   .dump()
            << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MemoryGraph MemoryGraph::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw CorruptRecordError(1, "missing header record");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
        throw CorruptRecordError(1, ex.what());
    }
    const int version = header.value("version", -1);
    if (version != kFormatVersion) throw VersionMismatchError(kFormatVersion, version);

    MemoryGraph graph(header.value("conversation_id", std::string{}),
                      header.value("allow_self_loops", false));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "node") {
                const auto canonical = j.at("canonical").get<std::string>();
                const auto first_seen = Timestamp::parse(j.at("first_seen").get<std::string>());
                for (const auto& alias : j.at("aliases")) {
                    graph.upsert_node(alias.get<std::string>(), canonical, first_seen);
                }
                if (j.at("aliases").empty()) {
                    graph.upsert_node(canonical, canonical, first_seen);
                }
            } else if (type == "edge") {
                graph.add_edge(GraphEdge{j.at("subject").get<std::string>(),
                                         j.at("relation").get<std::string>(),
                                         j.at("object").get<std::string>(),
                                         Timestamp::parse(j.at("timestamp").get<std::string>()),
                                         j.value("provenance", std::string{})});
            } else {
                throw Error("unknown record type '" + type + "'");
            }
        } catch (const std::exception& ex) {
            throw CorruptRecordError(line_no, ex.what());
        }
    }
    return graph;
}

bool MemoryGraph::deep_equal(const MemoryGraph& other) const {
    return conversation_id_ == other.conversation_id_ && nodes_ == other.nodes_ &&
           edges_ == other.edges_;
}

}  // namespace structmem
