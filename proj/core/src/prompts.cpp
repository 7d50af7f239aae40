#include "structmem/prompts.hpp"

#include "structmem/errors.hpp"
#include "structmem/hash.hpp"

#include <fstream>
#include <sstream>

namespace structmem {

const std::vector<std::pair<std::string, std::vector<std::string>>>& PromptSet::registry() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> reg = {
        {"fact_extraction", {"speaker", "timestamp", "utterance"}},
        {"relational_extraction", {"speaker", "timestamp", "utterance"}},
        {"synthesis", {"buffer", "supplementary"}},
        {"synthesis_unconstrained", {"buffer", "supplementary"}},
        {"qa_structmem", {"question", "entries", "syntheses"}},
        {"qa_flat", {"question", "entries"}},
        {"qa_graph", {"question", "entries", "edges"}},
        {"judge", {"question", "reference", "prediction"}},
        {"entity_extraction", {"speaker", "timestamp", "utterance"}},
        {"entity_dedup", {"entities", "existing"}},
        {"relation_extraction", {"speaker", "timestamp", "utterance", "entities"}},
        {"relation_dedup", {"candidates", "existing"}},
        {"audit_extraction", {"segment", "entry"}},
        {"audit_consolidation", {"buffer", "supplementary", "summary_a", "summary_b"}},
    };
    return reg;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    PromptSet set;
    for (const auto& [name, placeholders] : registry()) {
        const auto path = dir / (name + ".txt");
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ConfigError("missing prompt template: " + path.string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        for (const auto& ph : placeholders) {
            if (text.find("{" + ph + "}") == std::string::npos) {
                throw ConfigError("template '" + name + "' lacks required placeholder {" +
                                  ph + "}");
            }
        }
        const std::uint64_t h = fnv1a64(text);
        set.templates_.emplace(name, PromptTemplate{name, std::move(text), h});
    }
    return set;
}

const PromptTemplate& PromptSet::get(std::string_view name) const {
    auto it = templates_.find(std::string(name));
    if (it == templates_.end()) {
        throw ConfigError("unknown prompt template: '" + std::string(name) + "'");
    }
    return it->second;
}

std::string PromptSet::fill_text(const std::string& text,
                                 const std::map<std::string, std::string>& values) {
    std::string out = text;
    for (const auto& [key, value] : values) {
        const std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string PromptSet::fill(std::string_view name,
                            const std::map<std::string, std::string>& values) const {
    return fill_text(get(name).text, values);
}

std::map<std::string, std::string> PromptSet::hashes_hex() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, tmpl] : templates_) {
        out[name] = to_hex(tmpl.hash);
    }
    return out;
}

}  // namespace structmem
