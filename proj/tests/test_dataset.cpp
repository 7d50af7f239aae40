#include "structmem/dataset.hpp"
#include "structmem/errors.hpp"

#include <doctest.h>

#include "fixtures.hpp"

#include <filesystem>
#include <fstream>

using namespace structmem;
namespace fs = std::filesystem;

namespace {

fs::path temp_json(const std::string& name, const std::string& content) {
    const auto dir = fs::temp_directory_path() / "structmem_dataset_tests";
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("locomo session datetimes parse") {
    CHECK(parse_session_datetime("1:56 pm on 8 May, 2023") ==
          Timestamp::parse("2023-05-08T13:56:00Z"));
    CHECK(parse_session_datetime("12:00 am on 1 January, 2024") ==
          Timestamp::parse("2024-01-01T00:00:00Z"));
    CHECK(parse_session_datetime("12:30 pm on 15 Aug, 2023") ==
          Timestamp::parse("2023-08-15T12:30:00Z"));
    CHECK(parse_session_datetime("2023-05-08T13:56:00Z") ==
          Timestamp::parse("2023-05-08T13:56:00Z"));
    CHECK_THROWS_AS(parse_session_datetime("sometime last week"),
                    MalformedTimestampError);
}

TEST_CASE("mini fixture loads with known counts") {
    const auto conv = testsupport::make_mini_conversation();
    const auto path = temp_json("mini.json", "");
    testsupport::write_dataset({conv}, path.string());

    const auto loaded = load_dataset(path, kDefaultCategoryMap);
    REQUIRE(loaded.size() == 1);
    const Conversation& got = loaded.front();
    CHECK(got.conversation_id == "mini-1");
    CHECK(got.speaker_a == "Ava");
    CHECK(got.speaker_b == "Noah");
    REQUIRE(got.sessions.size() == 2);
    CHECK(got.turn_count() == 8);
    CHECK(got.qa.size() == 3);
    CHECK(got.skipped_questions() == 1);  // the adversarial item

    // Structural round-trip against the in-memory fixture.
    CHECK(got.sessions[0].datetime == conv.sessions[0].datetime);
    CHECK(got.sessions[1].turns[1].text == conv.sessions[1].turns[1].text);
    CHECK(got.qa[0].type == QuestionType::single_hop);
    CHECK(got.qa[1].type == QuestionType::temporal);
    CHECK_FALSE(got.qa[2].type.has_value());
}

TEST_CASE("synthetic fixture flattens in dialogue order") {
    const auto conv = testsupport::make_synthetic_conversation();
    CHECK(conv.turn_count() == 100);
    CHECK(conv.sessions.size() == 10);
    CHECK(conv.qa.size() == 13);
    CHECK(conv.skipped_questions() == 2);

    const auto utterances = conversation_utterances(conv);
    REQUIRE(utterances.size() == 100);
    for (std::size_t i = 1; i < utterances.size(); ++i) {
        CHECK(utterances[i - 1].timestamp <= utterances[i].timestamp);
    }
    // Constant whitespace-token count per turn keeps graph-cost growth
    // monotone.
    for (const auto& u : utterances) {
        std::size_t tokens = 1;
        for (char c : u.text) {
            if (c == ' ') ++tokens;
        }
        CHECK(tokens == 14);
    }
}

TEST_CASE("malformed session datetime names the session") {
    const std::string broken = R"([{
        "sample_id": "broken-1",
        "conversation": {
            "speaker_a": "A", "speaker_b": "B",
            "session_1_date_time": "not a real time",
            "session_1": [{"speaker": "A", "text": "hi", "dia_id": "D1:1"}]
        },
        "qa": []
    }])";
    const auto path = temp_json("broken.json", broken);
    try {
        load_dataset(path, kDefaultCategoryMap);
        FAIL("expected DatasetParseError");
    } catch (const DatasetParseError& ex) {
        CHECK(std::string(ex.what()).find("session_1") != std::string::npos);
    }
}

TEST_CASE("non-decreasing session datetimes are enforced") {
    const std::string regressing = R"([{
        "sample_id": "order-1",
        "conversation": {
            "speaker_a": "A", "speaker_b": "B",
            "session_1_date_time": "2023-05-02T10:00:00Z",
            "session_1": [{"speaker": "A", "text": "hi", "dia_id": "D1:1"}],
            "session_2_date_time": "2023-05-01T10:00:00Z",
            "session_2": [{"speaker": "B", "text": "hello", "dia_id": "D2:1"}]
        },
        "qa": []
    }])";
    const auto path = temp_json("order.json", regressing);
    CHECK_THROWS_AS(load_dataset(path, kDefaultCategoryMap), DatasetParseError);
}

TEST_CASE("unknown categories are skipped and counted") {
    const std::string unknown_cat = R"([{
        "sample_id": "cat-1",
        "conversation": {
            "speaker_a": "A", "speaker_b": "B",
            "session_1_date_time": "2023-05-01T10:00:00Z",
            "session_1": [{"speaker": "A", "text": "hi", "dia_id": "D1:1"}]
        },
        "qa": [
            {"question": "q1", "answer": "a1", "category": 4},
            {"question": "q2", "answer": "a2", "category": 77}
        ]
    }])";
    const auto path = temp_json("cat.json", unknown_cat);
    const auto loaded = load_dataset(path, kDefaultCategoryMap);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].qa.size() == 2);
    CHECK(loaded[0].qa[0].type == QuestionType::single_hop);
    CHECK_FALSE(loaded[0].qa[1].type.has_value());
    CHECK(loaded[0].skipped_questions() == 1);
}

TEST_CASE("turns carrying only an image caption keep the caption text") {
    const std::string with_caption = R"([{
        "sample_id": "img-1",
        "conversation": {
            "speaker_a": "A", "speaker_b": "B",
            "session_1_date_time": "2023-05-01T10:00:00Z",
            "session_1": [
                {"speaker": "A", "text": "", "dia_id": "D1:1",
                 "blip_caption": "a dog on a beach"},
                {"speaker": "B", "text": "   ", "dia_id": "D1:2"}
            ]
        },
        "qa": []
    }])";
    const auto path = temp_json("img.json", with_caption);
    const auto loaded = load_dataset(path, kDefaultCategoryMap);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].turn_count() == 1);  // blank turn dropped
    CHECK(loaded[0].sessions[0].turns[0].text.find("a dog on a beach") !=
          std::string::npos);
}

TEST_CASE("numeric answers stringify") {
    const std::string numeric = R"([{
        "sample_id": "num-1",
        "conversation": {
            "speaker_a": "A", "speaker_b": "B",
            "session_1_date_time": "2023-05-01T10:00:00Z",
            "session_1": [{"speaker": "A", "text": "hi", "dia_id": "D1:1"}]
        },
        "qa": [{"question": "how many?", "answer": 7, "category": 4}]
    }])";
    const auto path = temp_json("num.json", numeric);
    const auto loaded = load_dataset(path, kDefaultCategoryMap);
    CHECK(loaded[0].qa[0].reference == "7");
}

TEST_CASE("missing files and invalid JSON are reported") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/nope.json", kDefaultCategoryMap), IoError);
    const auto path = temp_json("bad.json", "{not json");
    CHECK_THROWS_AS(load_dataset(path, kDefaultCategoryMap), DatasetParseError);
}

TEST_CASE("bundled fixture file matches the generator") {
    const fs::path bundled = fs::path(STRUCTMEM_DATA_DIR) / "synthetic_conversation.json";
    REQUIRE(fs::exists(bundled));
    const auto loaded = load_dataset(bundled, kDefaultCategoryMap);
    REQUIRE(loaded.size() == 1);

    const auto expected = testsupport::make_synthetic_conversation();
    const Conversation& got = loaded.front();
    CHECK(got.conversation_id == expected.conversation_id);
    REQUIRE(got.sessions.size() == expected.sessions.size());
    for (std::size_t s = 0; s < got.sessions.size(); ++s) {
        CHECK(got.sessions[s].datetime == expected.sessions[s].datetime);
        REQUIRE(got.sessions[s].turns.size() == expected.sessions[s].turns.size());
        for (std::size_t t = 0; t < got.sessions[s].turns.size(); ++t) {
            CHECK(got.sessions[s].turns[t].speaker == expected.sessions[s].turns[t].speaker);
            CHECK(got.sessions[s].turns[t].text == expected.sessions[s].turns[t].text);
        }
    }
    REQUIRE(got.qa.size() == expected.qa.size());
    for (std::size_t q = 0; q < got.qa.size(); ++q) {
        CHECK(got.qa[q].question == expected.qa[q].question);
        CHECK(got.qa[q].reference == expected.qa[q].reference);
        CHECK(got.qa[q].type == expected.qa[q].type);
    }
}

TEST_CASE("full LoCoMo statistics, when the file is supplied") {
    // The benchmark file is not bundled; point STRUCTMEM_LOCOMO_PATH at it
    // to check the published per-type question counts.
    const char* path = std::getenv("STRUCTMEM_LOCOMO_PATH");
    if (!path) return;
    const auto conversations = load_dataset(path, kDefaultCategoryMap);
    CHECK(conversations.size() == 10);
    std::map<QuestionType, std::size_t> counts;
    for (const auto& conv : conversations) {
        for (const auto& item : conv.qa) {
            if (item.type) ++counts[*item.type];
        }
    }
    CHECK(counts[QuestionType::single_hop] == 841);
    CHECK(counts[QuestionType::multi_hop] == 282);
    CHECK(counts[QuestionType::temporal] == 321);
    CHECK(counts[QuestionType::open_domain] == 96);
}
