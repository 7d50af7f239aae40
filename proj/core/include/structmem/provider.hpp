#pragma once

#include "structmem/clock.hpp"
#include "structmem/usage.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace structmem {

struct ChatCall {
    std::string system_prompt;
    std::string user_prompt;
    std::string model_name;
    double temperature = 0.0;
};

struct ChatResult {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

struct ProviderConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string chat_model = "gpt-4o-mini";
    std::string embedding_model = "text-embedding-3-small";
    std::string api_key_env = "OPENAI_API_KEY";
    double timeout_secs = 60.0;
    int max_attempts = 3;
    double backoff_base_secs = 0.5;
    std::size_t embedding_dimension = 1536;
};

/// Language-model and embedding backend. The base class owns metering: one
/// ledger increment per returned response, on the stage the caller names.
/// Transports implement do_complete/do_embed; retries inside a transport
/// must not surface as extra ledger entries.
class Provider {
public:
    explicit Provider(Clock& clock) : clock_(clock) {}
    virtual ~Provider() = default;

    ChatResult complete(const ChatCall& call, Stage stage, UsageLedger& ledger);

    /// One unit-norm vector per text, order preserving. Metered on the
    /// embedding stage as a single call per batch.
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts,
                                          UsageLedger& ledger);

    virtual std::size_t embedding_dimension() const = 0;
    virtual std::string name() const = 0;
    virtual std::string chat_model() const = 0;

protected:
    struct EmbedBatch {
        std::vector<std::vector<float>> vectors;
        std::int64_t input_tokens = 0;
    };

    virtual ChatResult do_complete(const ChatCall& call) = 0;
    virtual EmbedBatch do_embed(const std::vector<std::string>& texts) = 0;

private:
    Clock& clock_;
};

/// Whitespace-token count; the unit the mock provider reports usage in.
std::int64_t whitespace_tokens(std::string_view text);

}  // namespace structmem
