#include "structmem/config.hpp"

#include "structmem/dataset.hpp"
#include "structmem/errors.hpp"
#include "structmem/hash.hpp"

#include <cstdlib>
#include <fstream>

namespace structmem {

namespace {

using nlohmann::json;

template <typename T>
void take(const json& section, const std::string& section_name, const std::string& key,
          T& out, std::set<std::string>& explicit_keys) {
    if (!section.contains(key)) return;
    out = section.at(key).get<T>();
    explicit_keys.insert(section_name + "." + key);
}

void reject_unknown(const json& section, const std::string& section_name,
                    const std::set<std::string>& known) {
    for (const auto& [key, value] : section.items()) {
        (void)value;
        if (!known.count(key)) {
            throw ConfigError("unknown config key: " + section_name + "." + key);
        }
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig config;
    config.harness.category_map = kDefaultCategoryMap;
    return config;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& ex) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " +
                          ex.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config file '" + path.string() + "' must hold a JSON object");
    }
    reject_unknown(root, "top-level",
                   {"paradigm", "provider", "consolidation", "retrieval", "harness",
                    "mock", "prompts_dir", "use_mock"});

    auto& keys = base.explicit_keys;
    if (root.contains("paradigm")) {
        base.paradigm = paradigm_from_string(root.at("paradigm").get<std::string>());
        keys.insert("paradigm");
    }
    if (root.contains("use_mock")) {
        base.use_mock = root.at("use_mock").get<bool>();
        keys.insert("use_mock");
    }
    if (root.contains("prompts_dir")) {
        base.prompts_dir = root.at("prompts_dir").get<std::string>();
        keys.insert("prompts_dir");
    }
    if (root.contains("provider")) {
        const json& p = root["provider"];
        reject_unknown(p, "provider",
                       {"endpoint", "chat_model", "embedding_model", "api_key_env",
                        "timeout_secs", "max_attempts", "backoff_base_secs",
                        "embedding_dimension"});
        take(p, "provider", "endpoint", base.provider.endpoint, keys);
        take(p, "provider", "chat_model", base.provider.chat_model, keys);
        take(p, "provider", "embedding_model", base.provider.embedding_model, keys);
        take(p, "provider", "api_key_env", base.provider.api_key_env, keys);
        take(p, "provider", "timeout_secs", base.provider.timeout_secs, keys);
        take(p, "provider", "max_attempts", base.provider.max_attempts, keys);
        take(p, "provider", "backoff_base_secs", base.provider.backoff_base_secs, keys);
        take(p, "provider", "embedding_dimension", base.provider.embedding_dimension, keys);
        if (base.provider.max_attempts < 1) {
            throw ConfigError("provider.max_attempts must be >= 1");
        }
    }
    if (root.contains("consolidation")) {
        const json& c = root["consolidation"];
        reject_unknown(c, "consolidation",
                       {"time_threshold_secs", "seed_k", "max_context_entries",
                        "include_synthesis_seeds", "split_synthesis_entries"});
        take(c, "consolidation", "time_threshold_secs",
             base.consolidation.time_threshold_secs, keys);
        take(c, "consolidation", "seed_k", base.consolidation.seed_count, keys);
        take(c, "consolidation", "max_context_entries",
             base.consolidation.max_context_entries, keys);
        take(c, "consolidation", "include_synthesis_seeds",
             base.consolidation.include_synthesis_seeds, keys);
        take(c, "consolidation", "split_synthesis_entries",
             base.consolidation.split_synthesis_entries, keys);
        if (base.consolidation.time_threshold_secs <= 0) {
            throw ConfigError("consolidation.time_threshold_secs must be > 0");
        }
    }
    if (root.contains("retrieval")) {
        const json& r = root["retrieval"];
        reject_unknown(r, "retrieval", {"entry_count", "synthesis_count"});
        take(r, "retrieval", "entry_count", base.retrieval.entry_count, keys);
        take(r, "retrieval", "synthesis_count", base.retrieval.synthesis_count, keys);
    }
    if (root.contains("harness")) {
        const json& h = root["harness"];
        reject_unknown(h, "harness", {"category_map", "judges", "parallelism"});
        take(h, "harness", "category_map", base.harness.category_map, keys);
        take(h, "harness", "judges", base.harness.judges, keys);
        take(h, "harness", "parallelism", base.harness.parallelism, keys);
        if (base.harness.parallelism < 1) {
            throw ConfigError("harness.parallelism must be >= 1");
        }
    }
    if (root.contains("mock")) {
        const json& m = root["mock"];
        reject_unknown(m, "mock", {"seed", "dimension"});
        take(m, "mock", "seed", base.mock.seed, keys);
        take(m, "mock", "dimension", base.mock.dimension, keys);
    }
    return base;
}

void apply_env_overrides(RunConfig& config) {
    if (const char* v = std::getenv("STRUCTMEM_ENDPOINT")) {
        config.provider.endpoint = v;
        config.explicit_keys.insert("provider.endpoint");
    }
    if (const char* v = std::getenv("STRUCTMEM_CHAT_MODEL")) {
        config.provider.chat_model = v;
        config.explicit_keys.insert("provider.chat_model");
    }
    if (const char* v = std::getenv("STRUCTMEM_EMBEDDING_MODEL")) {
        config.provider.embedding_model = v;
        config.explicit_keys.insert("provider.embedding_model");
    }
}

void validate_paradigm_keys(const RunConfig& config) {
    if (config.paradigm == Paradigm::structmem) return;
    for (const auto& key : config.explicit_keys) {
        if (key.rfind("consolidation.", 0) == 0) {
            throw ConfigError("config key '" + key + "' applies only to the structmem " +
                              "paradigm (run paradigm is '" +
                              std::string(to_string(config.paradigm)) + "')");
        }
    }
}

nlohmann::json config_to_json(const RunConfig& config) {
    return json{
        {"paradigm", std::string(to_string(config.paradigm))},
        {"provider",
         {{"endpoint", config.provider.endpoint},
          {"chat_model", config.provider.chat_model},
          {"embedding_model", config.provider.embedding_model},
          {"api_key_env", config.provider.api_key_env},
          {"timeout_secs", config.provider.timeout_secs},
          {"max_attempts", config.provider.max_attempts},
          {"backoff_base_secs", config.provider.backoff_base_secs},
          {"embedding_dimension", config.provider.embedding_dimension}}},
        {"consolidation",
         {{"time_threshold_secs", config.consolidation.time_threshold_secs},
          {"seed_k", config.consolidation.seed_count},
          {"max_context_entries", config.consolidation.max_context_entries},
          {"include_synthesis_seeds", config.consolidation.include_synthesis_seeds},
          {"split_synthesis_entries", config.consolidation.split_synthesis_entries}}},
        {"retrieval",
         {{"entry_count", config.retrieval.entry_count},
          {"synthesis_count", config.retrieval.synthesis_count}}},
        {"harness",
         {{"category_map", config.harness.category_map},
          {"judges", config.harness.judges},
          {"parallelism", config.harness.parallelism}}},
        {"mock", {{"seed", config.mock.seed}, {"dimension", config.mock.dimension}}},
        {"use_mock", config.use_mock},
        {"prompts_dir", config.prompts_dir},
    };
}

std::string config_hash(const RunConfig& config) {
    return content_hash(config_to_json(config).dump());
}

}  // namespace structmem
