#include "structmem/mock_provider.hpp"

#include "structmem/hash.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace structmem {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Content of the first line starting with `label`.
std::string field_line(const std::string& prompt, const std::string& label) {
    auto pos = prompt.find(label);
    if (pos == std::string::npos) return {};
    pos += label.size();
    const auto eol = prompt.find('\n', pos);
    return trim(prompt.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos));
}

/// Text between `label` (exclusive, newline included) and the next block
/// label from `stops`, or the end of the prompt.
std::string block_after(const std::string& prompt, const std::string& label,
                        const std::vector<std::string>& stops) {
    auto pos = prompt.find(label);
    if (pos == std::string::npos) return {};
    pos += label.size();
    std::size_t end = prompt.size();
    for (const auto& stop : stops) {
        const auto s = prompt.find(stop, pos);
        if (s != std::string::npos && s < end) end = s;
    }
    return trim(prompt.substr(pos, end - pos));
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            const std::string t = trim(current);
            if (!t.empty()) out.push_back(t);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    const std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    return out;
}

/// All "[YYYY-MM-DDTHH:MM:SSZ]" citations, first-occurrence order, deduped.
std::vector<std::string> cited_timestamps(const std::string& text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i + 22 <= text.size(); ++i) {
        if (text[i] != '[') continue;
        const std::string_view candidate(text.data() + i, 22);
        if (candidate[11] != 'T' || candidate[21] != ']' || candidate[20] != 'Z') continue;
        bool ok = true;
        static constexpr const char* pattern = "[dddd-dd-ddTdd:dd:ddZ]";
        for (std::size_t j = 0; j < 22 && ok; ++j) {
            const char p = pattern[j];
            const char c = candidate[j];
            if (p == 'd') ok = std::isdigit(static_cast<unsigned char>(c)) != 0;
            else ok = (c == p);
        }
        if (ok) {
            std::string ts(candidate.substr(1, 20));
            if (seen.insert(ts).second) out.push_back(std::move(ts));
        }
    }
    return out;
}

std::vector<std::string> words_of(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
            current.push_back(c);
        } else if (!current.empty()) {
            out.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

const std::set<std::string>& entity_stopwords() {
    static const std::set<std::string> words = {
        "The", "A",  "An",   "I",    "It",   "We",    "They",  "You",   "He",
        "She", "My", "Our",  "Your", "His",  "Her",   "Their", "This",  "That",
        "These", "Those", "On", "In", "At",  "To",    "For",   "With",  "And",
        "But", "Or", "So",   "Yes",  "No",   "Not",   "Now",   "Then",  "Today",
        "Yesterday", "Tomorrow", "What", "When", "Where", "Who", "How", "Why",
    };
    return words;
}

std::string canonicalize_entity(const std::string& surface) {
    std::string out;
    bool prev_sep = true;
    for (char c : surface) {
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

// ---- per-kind handlers ----

std::string handle_fact(const std::string& prompt) {
    const std::string speaker = field_line(prompt, "Speaker: ");
    const std::string utterance = block_after(prompt, "Utterance:\n", {});
    json entries = json::array();
    for (const auto& sentence : split_sentences(utterance)) {
        entries.push_back(speaker + ": " + sentence);
    }
    return entries.dump();
}

std::string handle_relational(const std::string& prompt) {
    const std::string speaker = field_line(prompt, "Speaker: ");
    const std::string utterance = block_after(prompt, "Utterance:\n", {});
    json entries = json::array();
    if (!utterance.empty()) {
        entries.push_back(speaker + ": " + utterance);
    }
    return entries.dump();
}

std::string handle_synthesis(const std::string& prompt, bool constrained) {
    const std::string buffer =
        block_after(prompt, "Buffered events:\n", {"\nRelated history:"});
    const std::string supplementary = block_after(prompt, "Related history:\n", {});

    const auto buffer_ts = cited_timestamps(buffer);
    const auto supp_ts = cited_timestamps(supplementary);

    std::ostringstream out;
    if (buffer_ts.empty()) {
        out << "The recent events form one thread.";
    } else {
        out << "Between [" << buffer_ts.front() << "] and [" << buffer_ts.back()
            << "], the conversation wove the buffered events into one thread.";
    }
    for (std::size_t i = 0; i < supp_ts.size() && i < 3; ++i) {
        out << " This echoes what happened at [" << supp_ts[i] << "].";
    }

    // Top recurring content words, for retrieval substance.
    std::map<std::string, int> counts;
    for (const auto& w : words_of(lower(buffer))) {
        if (w.size() >= 5) ++counts[w];
    }
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& [w, n] : counts) ranked.push_back({-n, w});
    std::sort(ranked.begin(), ranked.end());
    if (!ranked.empty()) {
        out << " Recurring themes:";
        for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
            out << (i ? ", " : " ") << ranked[i].second;
        }
        out << ".";
    }

    if (!constrained) {
        out << " It also hints at a connection to events near [1999-12-31T23:59:59Z]"
            << " beyond the records.";
    }
    return out.str();
}

std::string handle_qa(const std::string& prompt) {
    std::string question;
    {
        const auto pos = prompt.rfind("Question: ");
        if (pos != std::string::npos) question = trim(prompt.substr(pos + 10));
    }

    // Candidate memory lines: timestamped entries and rendered graph edges.
    std::vector<std::string> candidates;
    std::istringstream lines(prompt);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[' || t.find(" -> ") != std::string::npos) {
            candidates.push_back(t);
        }
    }

    std::set<std::string> question_words;
    for (const auto& w : words_of(lower(question))) {
        if (w.size() >= 3) question_words.insert(w);
    }

    std::size_t best = 0;
    int best_score = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        int score = 0;
        std::set<std::string> seen;
        for (const auto& w : words_of(lower(candidates[i]))) {
            if (question_words.count(w) && seen.insert(w).second) ++score;
        }
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    if (candidates.empty() || best_score == 0) {
        return "No relevant memory found.";
    }
    return "Answer: " + candidates[best];
}

std::string handle_judge(const std::string& prompt) {
    const std::string reference = field_line(prompt, "Reference answer: ");
    const std::string prediction = block_after(prompt, "Prediction: ", {});
    const bool correct =
        !reference.empty() && lower(prediction).find(lower(reference)) != std::string::npos;
    return correct ? "CORRECT" : "WRONG";
}

std::string handle_entity_extraction(const std::string& prompt) {
    const std::string speaker = field_line(prompt, "Speaker: ");
    const std::string utterance = block_after(prompt, "Utterance:\n", {});
    json entities = json::array();
    std::set<std::string> seen;
    if (!speaker.empty() && seen.insert(speaker).second) entities.push_back(speaker);
    for (const auto& w : words_of(utterance)) {
        if (w.size() < 2) continue;
        if (!std::isupper(static_cast<unsigned char>(w.front()))) continue;
        if (entity_stopwords().count(w)) continue;
        if (seen.insert(w).second) entities.push_back(w);
    }
    return entities.dump();
}

std::string handle_entity_dedup(const std::string& prompt) {
    const std::string new_block =
        block_after(prompt, "New entities:\n", {"\nExisting entities:"});
    const std::string existing_block = block_after(prompt, "Existing entities:\n", {});

    std::set<std::string> existing;
    {
        std::istringstream lines(existing_block);
        std::string line;
        while (std::getline(lines, line)) {
            const std::string t = trim(line);
            if (!t.empty() && t != "(none)") existing.insert(t);
        }
    }
    json mapping = json::object();
    std::istringstream lines(new_block);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string surface = trim(line);
        if (surface.empty() || surface == "(none)") continue;
        mapping[surface] = canonicalize_entity(surface);
    }
    return mapping.dump();
}

std::string handle_relation_extraction(const std::string& prompt) {
    const std::string speaker = field_line(prompt, "Speaker: ");
    const std::string entities_line = field_line(prompt, "Entities: ");
    const std::string speaker_canonical = canonicalize_entity(speaker);

    std::vector<std::string> entities;
    {
        std::istringstream ss(entities_line);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty() && t != speaker_canonical) entities.push_back(t);
        }
    }
    json triples = json::array();
    for (const auto& e : entities) {
        triples.push_back({{"subject", speaker_canonical}, {"relation", "mentioned"},
                           {"object", e}});
    }
    if (entities.size() >= 2) {
        triples.push_back({{"subject", entities[0]}, {"relation", "linked_to"},
                           {"object", entities[1]}});
    }
    return triples.dump();
}

std::string handle_relation_dedup(const std::string& prompt) {
    const std::string candidates_block =
        block_after(prompt, "Candidate relations:\n", {"\nExisting relations:"});
    const std::string existing_block = block_after(prompt, "Existing relations:\n", {});

    std::set<std::string> existing;
    {
        std::istringstream lines(existing_block);
        std::string line;
        while (std::getline(lines, line)) {
            const std::string t = trim(line);
            if (!t.empty() && t != "(none)") existing.insert(t);
        }
    }
    json kept = json::array();
    json candidates;
    try {
        candidates = json::parse(candidates_block);
    } catch (const json::exception&) {
        return kept.dump();
    }
    if (candidates.is_array()) {
        for (const auto& c : candidates) {
            if (!c.is_object()) continue;
            const std::string rendered = c.value("subject", "") + " -> " +
                                         c.value("relation", "") + " -> " +
                                         c.value("object", "");
            if (!existing.count(rendered)) kept.push_back(c);
        }
    }
    return kept.dump();
}

std::string handle_audit_extraction(const std::string& prompt) {
    const std::string segment =
        block_after(prompt, "Dialogue segment:\n", {"\nMemory entry:"});
    const std::string entry = block_after(prompt, "Memory entry:\n", {});
    const bool grounded =
        !entry.empty() && lower(segment).find(lower(entry)) != std::string::npos;
    return grounded ? "GROUNDED" : "HALLUCINATED";
}

std::string handle_audit_consolidation(const std::string& prompt) {
    const std::string supplementary =
        block_after(prompt, "Supplementary events:\n", {"\nSummary A:"});
    const std::string summary_a = block_after(prompt, "Summary A:\n", {"\nSummary B:"});
    const std::string summary_b = block_after(prompt, "Summary B:\n", {});

    const auto a_ts = cited_timestamps(summary_a);
    const std::set<std::string> a_set(a_ts.begin(), a_ts.end());

    json links = json::array();
    for (const auto& ts : cited_timestamps(summary_b)) {
        if (a_set.count(ts)) continue;
        const bool grounded = supplementary.find(ts) != std::string::npos;
        links.push_back({{"link", "connection to [" + ts + "]"},
                         {"classification", grounded ? "GROUNDED" : "SPURIOUS"}});
    }
    return json{{"links", links}}.dump();
}

}  // namespace

std::string MockProvider::respond(const std::string& prompt) const {
    const auto has = [&](const char* marker) {
        return prompt.find(marker) != std::string::npos;
    };

    if (has("CORRECT or WRONG")) return handle_judge(prompt);
    if (has("GROUNDED or HALLUCINATED")) return handle_audit_extraction(prompt);
    if (has("cross-event link") && has("Summary A:")) return handle_audit_consolidation(prompt);
    if (has("self-contained factual memory entries")) return handle_fact(prompt);
    if (has("relational memory entries")) return handle_relational(prompt);
    if (has("cross-event narrative summary")) {
        return handle_synthesis(prompt, has("Cite the timestamp"));
    }
    if (has("salient named entities")) return handle_entity_extraction(prompt);
    if (has("canonical entity name")) return handle_entity_dedup(prompt);
    if (has("relation triples")) return handle_relation_extraction(prompt);
    if (has("Filter candidate relations")) return handle_relation_dedup(prompt);
    if (has("Question: ")) return handle_qa(prompt);

    // Unrecognized prompt kind: fall back to a canned sentence.
    return "I cannot identify this request; here is a plain sentence in response.";
}

ChatResult MockProvider::do_complete(const ChatCall& call) {
    const std::string prompt = call.system_prompt + "\n" + call.user_prompt;
    ChatResult result;
    result.text = respond(prompt);
    result.input_tokens = whitespace_tokens(call.system_prompt) +
                          whitespace_tokens(call.user_prompt);
    result.output_tokens = whitespace_tokens(result.text);
    return result;
}

std::vector<float> MockProvider::embed_one(const std::string& text) const {
    std::vector<double> acc(dimension_, 0.0);
    const std::uint64_t base = kFnvOffset ^ (seed_ * kFnvPrime);
    const std::string padded = " " + lower(text) + " ";

    const auto bump = [&](std::string_view gram) {
        const std::uint64_t h = fnv1a64(gram, base);
        const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
        acc[h % dimension_] += sign;
    };
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        bump(std::string_view(padded).substr(i, 3));
    }
    for (const auto& w : words_of(padded)) {
        bump("w:" + w);
    }

    double norm = 0.0;
    for (double v : acc) norm += v * v;
    if (norm == 0.0) {
        acc[0] = 1.0;
        norm = 1.0;
    }
    norm = std::sqrt(norm);

    std::vector<float> out(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
        out[i] = static_cast<float>(acc[i] / norm);
    }
    return out;
}

Provider::EmbedBatch MockProvider::do_embed(const std::vector<std::string>& texts) {
    EmbedBatch batch;
    batch.vectors.reserve(texts.size());
    for (const auto& t : texts) {
        batch.vectors.push_back(embed_one(t));
        batch.input_tokens += whitespace_tokens(t);
    }
    return batch;
}

}  // namespace structmem
