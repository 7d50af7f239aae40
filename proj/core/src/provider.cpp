#include "structmem/provider.hpp"

#include "structmem/errors.hpp"

#include <cctype>
#include <cmath>

namespace structmem {

ChatResult Provider::complete(const ChatCall& call, Stage stage, UsageLedger& ledger) {
    if (call.system_prompt.empty() || call.user_prompt.empty()) {
        throw Error("chat call prompts must be non-empty");
    }
    if (call.temperature < 0.0) {
        throw Error("chat call temperature must be >= 0");
    }
    const double t0 = clock_.now_seconds();
    ChatResult result = do_complete(call);
    const double elapsed = clock_.now_seconds() - t0;
    ledger.record(stage, result.input_tokens, result.output_tokens, elapsed);
    return result;
}

std::vector<std::vector<float>> Provider::embed(const std::vector<std::string>& texts,
                                                UsageLedger& ledger) {
    if (texts.empty()) {
        throw Error("embed requires a batch of at least one text");
    }
    for (const auto& t : texts) {
        if (t.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw EmptyTextError();
        }
    }
    const double t0 = clock_.now_seconds();
    EmbedBatch batch = do_embed(texts);
    const double elapsed = clock_.now_seconds() - t0;
    if (batch.vectors.size() != texts.size()) {
        throw MalformedResponseError("embedding count does not match input count");
    }
    ledger.record(Stage::embedding, batch.input_tokens, 0, elapsed);
    return std::move(batch.vectors);
}

std::int64_t whitespace_tokens(std::string_view text) {
    std::int64_t count = 0;
    bool in_token = false;
    for (char c : text) {
        const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

}  // namespace structmem
