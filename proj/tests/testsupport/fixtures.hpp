#pragma once

#include "structmem/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace structmem::testsupport {

/// Synthetic two-speaker conversation shaped like LoCoMo: `sessions`
/// sessions of `turns_per_session` single-sentence turns, each with a
/// constant whitespace-token count and one fresh capitalized landmark
/// entity, plus a small QA set spanning all four categories and one
/// adversarial (skipped) item. Session datetimes alternate 30- and
/// 90-minute gaps so a one-hour threshold splits the stream into a known
/// number of consolidation spans.
Conversation make_synthetic_conversation(std::size_t sessions = 10,
                                         std::size_t turns_per_session = 10);

/// Two-session eight-turn fixture for loader tests.
Conversation make_mini_conversation();

/// Reference-scan oracle: partitions a timestamp stream into spans that a
/// strict `span > threshold` trigger would close, counting the final flush.
/// This is the expected consolidation cycle count for a build over the
/// stream (assuming every utterance yields at least one entry).
std::size_t expected_cycles(const std::vector<Timestamp>& timestamps,
                            std::int64_t threshold_secs);

/// Writes conversations as a LoCoMo-style JSON array.
void write_dataset(const std::vector<Conversation>& conversations,
                   const std::string& path);

}  // namespace structmem::testsupport
