#pragma once

#include "structmem/baselines.hpp"
#include "structmem/consolidation.hpp"
#include "structmem/provider.hpp"
#include "structmem/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace structmem {

struct HarnessConfig {
    std::map<std::string, std::string> category_map;  // raw code -> type name or "skip"
    std::vector<std::string> judges = {"mock"};
    int parallelism = 1;
};

struct MockConfig {
    std::uint64_t seed = 0;
    std::size_t dimension = 64;
};

/// Merged run configuration. Precedence: CLI flags > environment > config
/// file > defaults. `explicit_keys` records which dotted keys the file or
/// CLI set, for paradigm validation.
struct RunConfig {
    Paradigm paradigm = Paradigm::structmem;
    ProviderConfig provider;
    ConsolidationConfig consolidation;
    RetrievalConfig retrieval;
    HarnessConfig harness;
    MockConfig mock;
    bool use_mock = false;
    std::string prompts_dir = "prompts";
    std::set<std::string> explicit_keys;
};

RunConfig default_config();

/// Applies a JSON config file over `base`. Unknown keys are rejected with
/// their dotted path.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base);

/// STRUCTMEM_ENDPOINT, STRUCTMEM_CHAT_MODEL, STRUCTMEM_EMBEDDING_MODEL.
void apply_env_overrides(RunConfig& config);

/// Rejects consolidation.* keys explicitly set for a non-structmem run,
/// naming the offending key.
void validate_paradigm_keys(const RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace structmem
