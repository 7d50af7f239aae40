#pragma once

#include "structmem/provider.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace structmem {

/// Deterministic offline provider. Embeddings are seeded character-n-gram
/// hashes mapped to unit vectors; completions are templated outputs keyed
/// by the prompt kind it recognizes from the shipped templates (entry lists
/// for extraction prompts, a fixed-form paragraph for synthesis, a verdict
/// token for the judge). Token counts are whitespace-token counts of prompt
/// and response. Same seed, same inputs: byte-identical outputs.
class MockProvider final : public Provider {
public:
    MockProvider(Clock& clock, std::uint64_t seed, std::size_t dimension = 64)
        : Provider(clock), seed_(seed), dimension_(dimension) {}

    std::size_t embedding_dimension() const override { return dimension_; }
    std::string name() const override { return "mock"; }
    std::string chat_model() const override { return "mock-chat"; }

    std::vector<float> embed_one(const std::string& text) const;

protected:
    ChatResult do_complete(const ChatCall& call) override;
    EmbedBatch do_embed(const std::vector<std::string>& texts) override;

private:
    std::string respond(const std::string& prompt) const;

    std::uint64_t seed_;
    std::size_t dimension_;
};

}  // namespace structmem
