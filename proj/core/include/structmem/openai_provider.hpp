#pragma once

#include "structmem/provider.hpp"

#include <string>
#include <vector>

namespace structmem {

/// Chat-completions-style HTTP backend: POST {endpoint}/chat/completions
/// with a messages array, POST {endpoint}/embeddings for vectors. Reads the
/// API key from the environment variable named in the config. Retries rate
/// limits and transient failures with exponential backoff and jitter; a
/// successful call lands in the ledger exactly once.
class OpenAiProvider final : public Provider {
public:
    OpenAiProvider(Clock& clock, ProviderConfig config);

    std::size_t embedding_dimension() const override { return config_.embedding_dimension; }
    std::string name() const override { return "openai"; }
    std::string chat_model() const override { return config_.chat_model; }

protected:
    ChatResult do_complete(const ChatCall& call) override;
    EmbedBatch do_embed(const std::vector<std::string>& texts) override;

private:
    std::string post_json(const std::string& path, const std::string& body);

    ProviderConfig config_;
    std::string host_;       // scheme://authority
    std::string base_path_;  // e.g. "/v1"
    std::string api_key_;
};

}  // namespace structmem
