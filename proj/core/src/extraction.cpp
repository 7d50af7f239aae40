#include "structmem/extraction.hpp"

#include "structmem/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

namespace structmem {

namespace {

constexpr const char* kExtractionSystemPrompt =
    "You are a precise conversational memory component.";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_fences(const std::string& raw) {
    std::string text = trim(raw);
    if (text.rfind("```", 0) == 0) {
        const auto first_newline = text.find('\n');
        if (first_newline != std::string::npos) {
            text = text.substr(first_newline + 1);
        }
        const auto closing = text.rfind("```");
        if (closing != std::string::npos) {
            text = text.substr(0, closing);
        }
        text = trim(text);
    }
    return text;
}

/// Strips list markers from one line: bullets, numbering, wrapping quotes,
/// trailing commas. Returns trimmed content and whether a marker was seen.
std::pair<std::string, bool> strip_markers(const std::string& line) {
    std::string s = trim(line);
    bool had_marker = false;
    bool changed = true;
    while (changed && !s.empty()) {
        changed = false;
        if ((s[0] == '-' || s[0] == '*' || s[0] == '+') &&
            (s.size() == 1 || s[1] == ' ' || s[1] == '\t')) {
            s = trim(s.substr(1));
            had_marker = changed = true;
            continue;
        }
        if (s.rfind("\xE2\x80\xA2", 0) == 0) {  // "•"
            s = trim(s.substr(3));
            had_marker = changed = true;
            continue;
        }
        std::size_t digits = 0;
        while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) {
            ++digits;
        }
        if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')') &&
            (digits + 1 == s.size() || s[digits + 1] == ' ')) {
            s = trim(s.substr(digits + 1));
            had_marker = changed = true;
            continue;
        }
    }
    if (!s.empty() && s.back() == ',') s = trim(s.substr(0, s.size() - 1));
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = trim(s.substr(1, s.size() - 2));
    }
    return {s, had_marker};
}

std::vector<std::string> dedup_keep_first(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (seen.insert(item).second) out.push_back(item);
    }
    return out;
}

std::vector<std::string> strings_from_json_array(const nlohmann::json& value) {
    std::vector<std::string> out;
    if (!value.is_array()) return out;
    for (const auto& item : value) {
        if (item.is_string()) {
            const std::string s = trim(item.get<std::string>());
            if (!s.empty()) out.push_back(s);
        }
    }
    return out;
}

}  // namespace

std::string IdSequence::next() {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06llu", prefix_.c_str(),
                  static_cast<unsigned long long>(++counter_));
    return buf;
}

std::vector<std::string> parse_entry_list(const std::string& raw) {
    const std::string text = strip_fences(raw);
    if (text.empty()) return {};

    // Primary path: a JSON array of strings, possibly embedded in wrapper
    // prose.
    {
        nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
        if (!parsed.is_discarded()) {
            auto items = strings_from_json_array(parsed);
            if (!items.empty()) return dedup_keep_first(items);
            if (parsed.is_array() && parsed.empty()) return {};
        }
    }
    {
        const auto open = text.find('[');
        const auto close = text.rfind(']');
        if (open != std::string::npos && close != std::string::npos && close > open) {
            nlohmann::json parsed =
                nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
            if (!parsed.is_discarded()) {
                auto items = strings_from_json_array(parsed);
                if (!items.empty()) return dedup_keep_first(items);
            }
        }
    }

    // Fallback: line splitting with marker stripping. Marker-less prose is
    // one entry.
    std::vector<std::string> lines;
    bool any_marker = false;
    {
        std::istringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            auto [content, had_marker] = strip_markers(line);
            any_marker = any_marker || had_marker;
            if (!content.empty()) lines.push_back(std::move(content));
        }
    }
    if (!any_marker) {
        std::string prose;
        for (const auto& l : lines) {
            if (!prose.empty()) prose += ' ';
            prose += l;
        }
        if (prose.empty()) return {};
        return {prose};
    }
    return dedup_keep_first(lines);
}

DualExtraction extract_dual(const Utterance& u, const PromptSet& prompts,
                            Provider& provider, UsageLedger& ledger) {
    if (trim(u.text).empty()) {
        throw Error("utterance text must be non-empty");
    }
    const std::map<std::string, std::string> values{
        {"speaker", u.speaker},
        {"timestamp", u.timestamp.to_string()},
        {"utterance", u.text},
    };

    DualExtraction result;
    {
        ChatCall call{kExtractionSystemPrompt, prompts.fill("fact_extraction", values),
                      provider.chat_model()};
        result.factual = parse_entry_list(provider.complete(call, Stage::extraction_fact,
                                                            ledger).text);
    }
    {
        ChatCall call{kExtractionSystemPrompt,
                      prompts.fill("relational_extraction", values), provider.chat_model()};
        result.relational = parse_entry_list(provider.complete(call, Stage::extraction_rel,
                                                               ledger).text);
    }
    return result;
}

std::vector<std::string> ingest_utterance(const Utterance& u, const PromptSet& prompts,
                                          Provider& provider, MemoryStore& store,
                                          UsageLedger& ledger, IdSequence& ids) {
    const DualExtraction dual = extract_dual(u, prompts, provider, ledger);

    std::vector<std::string> texts;
    texts.reserve(dual.factual.size() + dual.relational.size());
    texts.insert(texts.end(), dual.factual.begin(), dual.factual.end());
    texts.insert(texts.end(), dual.relational.begin(), dual.relational.end());
    if (texts.empty()) return {};

    const auto vectors = provider.embed(texts, ledger);

    std::vector<MemoryEntry> batch;
    std::vector<std::string> new_ids;
    batch.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        MemoryEntry e;
        e.id = ids.next();
        e.text = texts[i];
        e.kind = i < dual.factual.size() ? EntryKind::factual : EntryKind::relational;
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

}  // namespace structmem
