#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace structmem {

struct PromptTemplate {
    std::string name;
    std::string text;
    std::uint64_t hash = 0;
};

/// The editable prompt templates behind every model call: the two
/// extraction perspectives, constrained and unconstrained synthesis, the
/// three QA variants, the judge, the four graph-construction prompts, and
/// the two fidelity-audit prompts. Placeholder syntax is `{name}`; load()
/// rejects a template that lost one of its required placeholders.
class PromptSet {
public:
    static PromptSet load(const std::filesystem::path& dir);

    const PromptTemplate& get(std::string_view name) const;

    std::string fill(std::string_view name,
                     const std::map<std::string, std::string>& values) const;

    static std::string fill_text(const std::string& text,
                                 const std::map<std::string, std::string>& values);

    static const std::vector<std::pair<std::string, std::vector<std::string>>>& registry();

    std::map<std::string, std::string> hashes_hex() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace structmem
