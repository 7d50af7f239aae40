#pragma once

#include "structmem/extraction.hpp"
#include "structmem/timestamp.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace structmem {

enum class QuestionType { single_hop, multi_hop, temporal, open_domain };

std::string_view to_string(QuestionType t);
QuestionType question_type_from_string(std::string_view s);

struct Turn {
    std::string speaker;
    std::string text;
    std::string dia_id;
};

struct DialogueSession {
    std::string session_id;
    Timestamp datetime;
    std::vector<Turn> turns;
};

struct QAItem {
    std::string id;
    std::string question;
    std::string reference;
    std::string raw_category;
    std::optional<QuestionType> type;  // nullopt = skipped
    std::vector<std::string> evidence;
};

struct Conversation {
    std::string conversation_id;
    std::string speaker_a;
    std::string speaker_b;
    std::vector<DialogueSession> sessions;
    std::vector<QAItem> qa;

    std::size_t skipped_questions() const;
    std::size_t turn_count() const;
};

/// Session datetimes as LoCoMo writes them ("1:56 pm on 8 May, 2023") or
/// ISO-8601. Datetimes without a timezone are treated as UTC.
Timestamp parse_session_datetime(const std::string& raw);

/// Loads a LoCoMo-style JSON file: an array of samples, each carrying a
/// "conversation" object with session_N / session_N_date_time pairs and a
/// "qa" list. Category codes map through `category_map` (value "skip"
/// or an unmapped code skips the question, counted).
std::vector<Conversation> load_dataset(const std::filesystem::path& path,
                                       const std::map<std::string, std::string>& category_map);

/// Flattens a conversation into the dialogue-ordered utterance stream; all
/// turns of one session carry the session datetime.
std::vector<Utterance> conversation_utterances(const Conversation& conv);

/// Inverse of the loader for one conversation, used to write fixtures.
nlohmann::json conversation_to_locomo_json(const Conversation& conv);

extern const std::map<std::string, std::string> kDefaultCategoryMap;

}  // namespace structmem
