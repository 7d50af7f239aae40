#include "fixtures.hpp"

#include "structmem/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace structmem::testsupport {

namespace {

const std::vector<std::string> kTopics = {
    "harbor", "garden", "market", "forest",  "museum",
    "bakery", "station", "bridge", "library", "theater",
};

std::string landmark_name(std::size_t global_turn) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "Landmark%03zu", global_turn + 1);
    return buf;
}

QAItem make_item(const std::string& conv_id, std::size_t index, std::string question,
                 std::string reference, int category) {
    QAItem item;
    item.id = conv_id + "-q" + std::to_string(index);
    item.question = std::move(question);
    item.reference = std::move(reference);
    item.raw_category = std::to_string(category);
    auto mapped = kDefaultCategoryMap.find(item.raw_category);
    if (mapped != kDefaultCategoryMap.end() && mapped->second != "skip") {
        item.type = question_type_from_string(mapped->second);
    }
    return item;
}

}  // namespace

Conversation make_synthetic_conversation(std::size_t sessions,
                                         std::size_t turns_per_session) {
    Conversation conv;
    conv.conversation_id = "synthetic-1";
    conv.speaker_a = "Ava";
    conv.speaker_b = "Noah";

    // Alternating 30- and 90-minute gaps: a one-hour threshold closes a
    // span at every 90-minute jump.
    std::int64_t epoch = Timestamp::parse("2023-05-01T09:00:00Z").epoch_seconds();
    std::size_t global_turn = 0;
    for (std::size_t s = 0; s < sessions; ++s) {
        if (s > 0) epoch += (s % 2 == 1) ? 30 * 60 : 90 * 60;
        DialogueSession session;
        session.session_id = conv.conversation_id + ":session_" + std::to_string(s + 1);
        session.datetime = Timestamp::from_epoch_seconds(epoch);
        for (std::size_t t = 0; t < turns_per_session; ++t, ++global_turn) {
            Turn turn;
            turn.speaker = (global_turn % 2 == 0) ? conv.speaker_a : conv.speaker_b;
            const std::string& topic = kTopics[global_turn % kTopics.size()];
            // Single sentence, constant 14 whitespace tokens, one fresh
            // capitalized entity.
            turn.text = "today i walked past " + landmark_name(global_turn) +
                        " and wrote about the quiet " + topic + " in my journal";
            turn.dia_id = "D" + std::to_string(s + 1) + ":" + std::to_string(t + 1);
            session.turns.push_back(std::move(turn));
        }
        conv.sessions.push_back(std::move(session));
    }

    const std::string& id = conv.conversation_id;
    std::size_t q = 0;
    conv.qa.push_back(make_item(id, ++q,
        "What did Ava write about when she walked past Landmark001?", "harbor", 4));
    conv.qa.push_back(make_item(id, ++q,
        "Which landmark did Noah mention in the quiet garden entry?", "Landmark002", 4));
    conv.qa.push_back(make_item(id, ++q,
        "Which landmark is associated with the bakery note?", "Landmark006", 4));
    conv.qa.push_back(make_item(id, ++q,
        "Which topics did Ava connect between Landmark001 and Landmark003?",
        "harbor and market", 1));
    conv.qa.push_back(make_item(id, ++q,
        "Who walked past Landmark011 and what did they write about?", "Ava", 1));
    conv.qa.push_back(make_item(id, ++q,
        "Which landmark follows Landmark020 in the dialogue?", "Landmark021", 1));
    conv.qa.push_back(make_item(id, ++q,
        "When did Noah write about Landmark010?", "2023-05-01", 2));
    conv.qa.push_back(make_item(id, ++q,
        "When was the theater contribution before Landmark050 made?", "June 2024", 2));
    conv.qa.push_back(make_item(id, ++q,
        "On what date did Ava pass Landmark099?", "2023-05-01", 2));
    conv.qa.push_back(make_item(id, ++q,
        "What does the journal habit suggest about the speakers?", "they journal daily",
        3));
    conv.qa.push_back(make_item(id, ++q,
        "What mood do the landmark notes share?", "quiet", 3));
    conv.qa.push_back(make_item(id, ++q,
        "Which landmark did Caroline visit?", "Landmark999", 5));
    conv.qa.push_back(make_item(id, ++q,
        "When did the speakers fly to Mars?", "never", 5));
    return conv;
}

Conversation make_mini_conversation() {
    Conversation conv;
    conv.conversation_id = "mini-1";
    conv.speaker_a = "Ava";
    conv.speaker_b = "Noah";

    DialogueSession first;
    first.session_id = "mini-1:session_1";
    first.datetime = Timestamp::parse("2023-06-10T10:00:00Z");
    first.turns = {
        {"Ava", "i finally planted tomatoes in the garden", "D1:1"},
        {"Noah", "that sounds great because the weather has been kind", "D1:2"},
        {"Ava", "i also fixed the greenhouse door", "D1:3"},
        {"Noah", "my brother visited the harbor market", "D1:4"},
    };
    DialogueSession second;
    second.session_id = "mini-1:session_2";
    second.datetime = Timestamp::parse("2023-06-12T18:30:00Z");
    second.turns = {
        {"Ava", "the tomatoes sprouted already", "D2:1"},
        {"Noah", "i baked bread with the market flour", "D2:2"},
        {"Ava", "we should cook together this weekend", "D2:3"},
        {"Noah", "saturday works for me", "D2:4"},
    };
    conv.sessions = {std::move(first), std::move(second)};

    conv.qa.push_back(make_item(conv.conversation_id, 1,
        "What did Ava plant in the garden?", "tomatoes", 4));
    conv.qa.push_back(make_item(conv.conversation_id, 2,
        "When did the tomatoes sprout?", "2023-06-12", 2));
    conv.qa.push_back(make_item(conv.conversation_id, 3,
        "Which planet did Noah fly to?", "none", 5));
    return conv;
}

std::size_t expected_cycles(const std::vector<Timestamp>& timestamps,
                            std::int64_t threshold_secs) {
    if (timestamps.empty()) return 0;
    std::size_t cycles = 0;
    std::int64_t span_start = timestamps.front().epoch_seconds();
    std::int64_t latest = span_start;
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        // Non-monotone stamps count as the latest seen, mirroring the
        // trigger's handling.
        const std::int64_t t = std::max(timestamps[i].epoch_seconds(), latest);
        latest = t;
        if (t - span_start > threshold_secs) {
            ++cycles;
            span_start = timestamps[i].epoch_seconds();
            latest = span_start;
        }
    }
    return cycles + 1;  // end-of-conversation flush
}

void write_dataset(const std::vector<Conversation>& conversations,
                   const std::string& path) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& conv : conversations) {
        samples.push_back(conversation_to_locomo_json(conv));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write fixture dataset '" + path + "'");
    out << samples.dump(2) << '\n';
}

}  // namespace structmem::testsupport
