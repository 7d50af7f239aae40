#include "structmem/dataset.hpp"

#include "structmem/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace structmem {

namespace {

using nlohmann::json;

const std::map<std::string, int> kMonths = {
    {"january", 1}, {"february", 2}, {"march", 3},     {"april", 4},
    {"may", 5},     {"june", 6},     {"july", 7},      {"august", 8},
    {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12},
    {"jan", 1},     {"feb", 2},      {"mar", 3},       {"apr", 4},
    {"jun", 6},     {"jul", 7},      {"aug", 8},       {"sep", 9},
    {"sept", 9},    {"oct", 10},     {"nov", 11},      {"dec", 12},
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string stringify(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_null()) return {};
    return value.dump();
}

}  // namespace

const std::map<std::string, std::string> kDefaultCategoryMap = {
    {"1", "multi_hop"}, {"2", "temporal"},    {"3", "open_domain"},
    {"4", "single_hop"}, {"5", "skip"},
};

std::string_view to_string(QuestionType t) {
    switch (t) {
        case QuestionType::single_hop: return "single_hop";
        case QuestionType::multi_hop: return "multi_hop";
        case QuestionType::temporal: return "temporal";
        case QuestionType::open_domain: return "open_domain";
    }
    return "single_hop";
}

QuestionType question_type_from_string(std::string_view s) {
    if (s == "single_hop") return QuestionType::single_hop;
    if (s == "multi_hop") return QuestionType::multi_hop;
    if (s == "temporal") return QuestionType::temporal;
    if (s == "open_domain") return QuestionType::open_domain;
    throw Error("unknown question type: '" + std::string(s) + "'");
}

std::size_t Conversation::skipped_questions() const {
    std::size_t n = 0;
    for (const auto& item : qa) {
        if (!item.type) ++n;
    }
    return n;
}

std::size_t Conversation::turn_count() const {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.turns.size();
    return n;
}

Timestamp parse_session_datetime(const std::string& raw) {
    // ISO first.
    try {
        return Timestamp::parse(raw);
    } catch (const MalformedTimestampError&) {
    }

    // LoCoMo style: "1:56 pm on 8 May, 2023".
    std::vector<std::string> tokens;
    {
        std::string cleaned = raw;
        for (char& c : cleaned) {
            if (c == ',') c = ' ';
        }
        std::istringstream ss(cleaned);
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
    }
    // Expected: [H:MM] [am|pm] on [D] [Month] [YYYY]
    if (tokens.size() == 6 && lower(tokens[2]) == "on") {
        const std::string& clock = tokens[0];
        const std::string meridiem = lower(tokens[1]);
        const auto colon = clock.find(':');
        const auto month_it = kMonths.find(lower(tokens[4]));
        if (colon != std::string::npos && (meridiem == "am" || meridiem == "pm") &&
            month_it != kMonths.end()) {
            try {
                int hour = std::stoi(clock.substr(0, colon));
                const int minute = std::stoi(clock.substr(colon + 1));
                const int day = std::stoi(tokens[3]);
                const int year = std::stoi(tokens[5]);
                if (hour >= 1 && hour <= 12 && minute >= 0 && minute <= 59) {
                    if (meridiem == "pm" && hour != 12) hour += 12;
                    if (meridiem == "am" && hour == 12) hour = 0;
                    char buf[24];
                    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:00Z", year,
                                  month_it->second, day, hour, minute);
                    return Timestamp::parse(buf);
                }
            } catch (const std::exception&) {
            }
        }
    }
    throw MalformedTimestampError(raw);
}

namespace {

Conversation parse_sample(const json& sample, const std::string& path, std::size_t index,
                          const std::map<std::string, std::string>& category_map) {
    Conversation conv;
    if (sample.contains("sample_id")) {
        conv.conversation_id = stringify(sample["sample_id"]);
    } else if (sample.contains("conversation_id")) {
        conv.conversation_id = stringify(sample["conversation_id"]);
    } else {
        conv.conversation_id = "conv-" + std::to_string(index + 1);
    }

    if (!sample.contains("conversation") || !sample["conversation"].is_object()) {
        throw DatasetParseError(path, conv.conversation_id, "missing 'conversation' object");
    }
    const json& body = sample["conversation"];
    conv.speaker_a = body.value("speaker_a", std::string{});
    conv.speaker_b = body.value("speaker_b", std::string{});

    // session_N / session_N_date_time pairs, ordered by N.
    std::vector<int> session_numbers;
    for (const auto& [key, value] : body.items()) {
        (void)value;
        if (key.rfind("session_", 0) != 0) continue;
        const std::string suffix = key.substr(8);
        if (suffix.find_first_not_of("0123456789") != std::string::npos) continue;
        session_numbers.push_back(std::stoi(suffix));
    }
    std::sort(session_numbers.begin(), session_numbers.end());

    for (int n : session_numbers) {
        const std::string session_key = "session_" + std::to_string(n);
        const std::string dt_key = session_key + "_date_time";
        DialogueSession session;
        session.session_id = conv.conversation_id + ":" + session_key;
        if (!body.contains(dt_key)) {
            throw DatasetParseError(path, session.session_id, "missing '" + dt_key + "'");
        }
        try {
            session.datetime = parse_session_datetime(stringify(body[dt_key]));
        } catch (const MalformedTimestampError& ex) {
            throw DatasetParseError(path, session.session_id, ex.what());
        }
        if (!body[session_key].is_array()) {
            throw DatasetParseError(path, session.session_id, "session is not an array");
        }
        for (const auto& turn_json : body[session_key]) {
            Turn turn;
            turn.speaker = turn_json.value("speaker", std::string{});
            turn.text = turn_json.value("text", std::string{});
            turn.dia_id = turn_json.value("dia_id", std::string{});
            if (turn_json.contains("blip_caption") &&
                turn_json["blip_caption"].is_string()) {
                const std::string caption = turn_json["blip_caption"].get<std::string>();
                if (!caption.empty()) {
                    if (!turn.text.empty()) turn.text += " ";
                    turn.text += "(shared a photo: " + caption + ")";
                }
            }
            if (turn.speaker.empty()) {
                throw DatasetParseError(path, session.session_id,
                                        "turn without a speaker");
            }
            if (turn.text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            session.turns.push_back(std::move(turn));
        }
        if (!conv.sessions.empty() && session.datetime < conv.sessions.back().datetime) {
            throw DatasetParseError(path, session.session_id,
                                    "session datetimes must be non-decreasing");
        }
        conv.sessions.push_back(std::move(session));
    }

    if (sample.contains("qa")) {
        std::size_t qa_index = 0;
        for (const auto& qa_json : sample["qa"]) {
            QAItem item;
            item.id = conv.conversation_id + "-q" + std::to_string(++qa_index);
            item.question = qa_json.value("question", std::string{});
            if (qa_json.contains("answer")) {
                item.reference = stringify(qa_json["answer"]);
            } else if (qa_json.contains("adversarial_answer")) {
                item.reference = stringify(qa_json["adversarial_answer"]);
            }
            if (qa_json.contains("category")) {
                item.raw_category = stringify(qa_json["category"]);
            }
            if (qa_json.contains("evidence") && qa_json["evidence"].is_array()) {
                for (const auto& ev : qa_json["evidence"]) item.evidence.push_back(stringify(ev));
            }
            auto mapped = category_map.find(item.raw_category);
            if (mapped != category_map.end() && mapped->second != "skip") {
                item.type = question_type_from_string(mapped->second);
            }
            conv.qa.push_back(std::move(item));
        }
    }
    return conv;
}

}  // namespace

std::vector<Conversation> load_dataset(
    const std::filesystem::path& path,
    const std::map<std::string, std::string>& category_map) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset '" + path.string() + "'");

    json root;
    try {
        in >> root;
    } catch (const json::exception& ex) {
        throw DatasetParseError(path.string(), "top-level", ex.what());
    }

    json samples;
    if (root.is_array()) {
        samples = root;
    } else if (root.is_object() && root.contains("samples")) {
        samples = root["samples"];
    } else if (root.is_object()) {
        samples = json::array({root});
    } else {
        throw DatasetParseError(path.string(), "top-level",
                                "expected an array of samples");
    }

    std::vector<Conversation> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.push_back(parse_sample(samples[i], path.string(), i, category_map));
    }
    return out;
}

std::vector<Utterance> conversation_utterances(const Conversation& conv) {
    std::vector<Utterance> out;
    for (const auto& session : conv.sessions) {
        for (const auto& turn : session.turns) {
            Utterance u;
            u.conversation_id = conv.conversation_id;
            u.session_id = session.session_id;
            u.timestamp = session.datetime;
            u.speaker = turn.speaker;
            u.text = turn.text;
            out.push_back(std::move(u));
        }
    }
    return out;
}

nlohmann::json conversation_to_locomo_json(const Conversation& conv) {
    json body{{"speaker_a", conv.speaker_a}, {"speaker_b", conv.speaker_b}};
    for (std::size_t i = 0; i < conv.sessions.size(); ++i) {
        const auto& session = conv.sessions[i];
        const std::string key = "session_" + std::to_string(i + 1);
        body[key + "_date_time"] = session.datetime.to_string();
        json turns = json::array();
        for (const auto& t : session.turns) {
            turns.push_back({{"speaker", t.speaker}, {"text", t.text}, {"dia_id", t.dia_id}});
        }
        body[key] = std::move(turns);
    }
    json qa = json::array();
    for (const auto& item : conv.qa) {
        json q{{"question", item.question}, {"answer", item.reference}};
        if (!item.raw_category.empty()) {
            // LoCoMo writes integer codes; preserve them when numeric.
            if (item.raw_category.find_first_not_of("0123456789") == std::string::npos) {
                q["category"] = std::stoi(item.raw_category);
            } else {
                q["category"] = item.raw_category;
            }
        }
        if (!item.evidence.empty()) q["evidence"] = item.evidence;
        qa.push_back(std::move(q));
    }
    return json{{"sample_id", conv.conversation_id},
                {"conversation", std::move(body)},
                {"qa", std::move(qa)}};
}

}  // namespace structmem
