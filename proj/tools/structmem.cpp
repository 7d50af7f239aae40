#include "structmem/audit.hpp"
#include "structmem/clock.hpp"
#include "structmem/config.hpp"
#include "structmem/errors.hpp"
#include "structmem/harness.hpp"
#include "structmem/mock_provider.hpp"
#include "structmem/openai_provider.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace structmem;

namespace {

std::string g_command_line;

std::unique_ptr<Clock> make_clock(bool mock) {
    if (mock) return std::make_unique<FakeClock>();
    return std::make_unique<SystemClock>();
}

std::unique_ptr<Provider> make_provider(const RunConfig& config, Clock& clock) {
    if (config.use_mock) {
        return std::make_unique<MockProvider>(clock, config.mock.seed,
                                              config.mock.dimension);
    }
    return std::make_unique<OpenAiProvider>(clock, config.provider);
}

std::unique_ptr<Provider> make_judge_provider(const RunConfig& config, Clock& clock,
                                              const std::string& judge_name) {
    if (judge_name == "mock" || config.use_mock) {
        return std::make_unique<MockProvider>(clock, config.mock.seed,
                                              config.mock.dimension);
    }
    ProviderConfig judge_config = config.provider;
    judge_config.chat_model = judge_name;
    return std::make_unique<OpenAiProvider>(clock, judge_config);
}

struct CommonOptions {
    std::string config_path;
    bool mock = false;
    std::optional<std::uint64_t> seed;
    std::string prompts_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_flag("--mock", opts.mock, "use the deterministic offline provider");
    cmd->add_option("--seed", opts.seed, "mock provider seed");
    cmd->add_option("--prompts", opts.prompts_dir, "prompt template directory");
}

RunConfig resolve_config(const CommonOptions& opts) {
    RunConfig config = default_config();
    if (!opts.config_path.empty()) {
        config = load_config_file(opts.config_path, std::move(config));
    }
    apply_env_overrides(config);
    if (opts.mock) config.use_mock = true;
    if (opts.seed) {
        config.mock.seed = *opts.seed;
        config.explicit_keys.insert("mock.seed");
    }
    if (!opts.prompts_dir.empty()) {
        config.prompts_dir = opts.prompts_dir;
        config.explicit_keys.insert("prompts_dir");
    }
    return config;
}

const Conversation* find_conversation(const std::vector<Conversation>& conversations,
                                      const std::string& id) {
    for (const auto& c : conversations) {
        if (c.conversation_id == id) return &c;
    }
    return nullptr;
}

void write_run_config(const RunConfig& config, const fs::path& dir) {
    std::ofstream out(dir / "config.json", std::ios::binary);
    if (!out) throw IoError("cannot write config.json under " + dir.string());
    out << config_to_json(config).dump(2) << '\n';
}

RunConfig read_run_config(const fs::path& dir, RunConfig base) {
    return load_config_file(dir / "config.json", std::move(base));
}

Manifest base_manifest(const RunConfig& config, const PromptSet& prompts, Clock& clock) {
    Manifest manifest;
    manifest.command_line = g_command_line;
    manifest.config_hash = config_hash(config);
    manifest.prompt_hashes = prompts.hashes_hex();
    manifest.seed = config.mock.seed;
    manifest.created_at = clock.now_timestamp().to_string();
    return manifest;
}

int cmd_build(const CommonOptions& common, const std::string& dataset_path,
              const std::string& conversation_id, const std::string& paradigm_name,
              const std::string& out_dir) {
    RunConfig config = resolve_config(common);
    if (!paradigm_name.empty()) {
        config.paradigm = paradigm_from_string(paradigm_name);
        config.explicit_keys.insert("paradigm");
    }
    validate_paradigm_keys(config);

    const PromptSet prompts = PromptSet::load(config.prompts_dir);
    auto clock = make_clock(config.use_mock);
    auto provider = make_provider(config, *clock);

    auto conversations = load_dataset(dataset_path, config.harness.category_map);
    if (conversations.empty()) throw Error("dataset holds no conversations");

    std::vector<const Conversation*> selected;
    if (conversation_id.empty()) {
        for (const auto& c : conversations) selected.push_back(&c);
    } else {
        const Conversation* c = find_conversation(conversations, conversation_id);
        if (!c) throw Error("conversation '" + conversation_id + "' not found in dataset");
        selected.push_back(c);
    }

    for (const Conversation* conv : selected) {
        const fs::path run_dir = fs::path(out_dir) / conv->conversation_id;
        const BuildArtifacts artifacts =
            run_build(*conv, config, prompts, *provider, *clock);

        Manifest manifest = base_manifest(config, prompts, *clock);
        manifest.outputs = persist_build(artifacts, run_dir);
        write_run_config(config, run_dir);
        manifest.outputs["config"] = "config.json";
        write_manifest(manifest, run_dir);

        const StageTotals totals = snapshot_total(artifacts.usage);
        const StageTotals chat = snapshot_total_chat(artifacts.usage);
        std::cout << conv->conversation_id << ": " << artifacts.store.size()
                  << " entries, " << artifacts.cycles.size() << " consolidation cycles, "
                  << chat.calls << " chat calls, " << totals.input_tokens << "/"
                  << totals.output_tokens << " tokens -> " << run_dir.string() << "\n";
        if (artifacts.utterances_failed > 0) {
            std::cout << "  warning: " << artifacts.utterances_failed
                      << " utterances skipped (see build_log.json)\n";
        }
    }
    return 0;
}

struct EvalOptions {
    std::string store_dir;
    std::string dataset_path;
    std::vector<std::string> judges;
    std::optional<std::size_t> entries;
    std::optional<std::size_t> synthesis;
    std::string sweep;
    std::string out_dir;
    int parallel = 0;
};

RunReport eval_once(const RunConfig& config, const Conversation& conv,
                    const fs::path& store_dir, const PromptSet& prompts, Clock& clock,
                    const fs::path& out_dir) {
    MemoryStore store = MemoryStore::load(store_dir / "store.mem");
    std::optional<MemoryGraph> graph;
    if (fs::exists(store_dir / "graph.mem")) {
        graph = MemoryGraph::load(store_dir / "graph.mem");
    }
    LedgerSnapshot build_usage{};
    if (fs::exists(store_dir / "ledger.json")) {
        std::ifstream in(store_dir / "ledger.json", std::ios::binary);
        nlohmann::json j;
        in >> j;
        build_usage = snapshot_from_json(j);
    }

    auto answerer = make_provider(config, clock);
    std::vector<std::unique_ptr<Provider>> judge_owners;
    std::vector<std::pair<std::string, Provider*>> judges;
    for (const auto& name : config.harness.judges) {
        judge_owners.push_back(make_judge_provider(config, clock, name));
        judges.push_back({name, judge_owners.back().get()});
    }

    RunReport report = run_eval(conv, store, graph ? &*graph : nullptr, config, prompts,
                                *answerer, judges, build_usage);
    emit_report(report, out_dir);

    Manifest manifest = base_manifest(config, prompts, clock);
    manifest.outputs["report"] = "report.json";
    manifest.outputs["report_table"] = "report.txt";
    write_manifest(manifest, out_dir);
    return report;
}

int cmd_eval(const CommonOptions& common, const EvalOptions& opts) {
    const fs::path store_dir(opts.store_dir);
    if (!fs::exists(store_dir / "store.mem")) {
        throw Error("no store.mem under '" + store_dir.string() + "'");
    }

    RunConfig config = resolve_config(common);
    if (fs::exists(store_dir / "config.json")) {
        // Precedence: defaults < build's resolved config < --config file <
        // environment < CLI flags.
        config = read_run_config(store_dir, default_config());
        if (!common.config_path.empty()) {
            config = load_config_file(common.config_path, std::move(config));
        }
        apply_env_overrides(config);
        if (common.mock) config.use_mock = true;
        if (common.seed) config.mock.seed = *common.seed;
        if (!common.prompts_dir.empty()) config.prompts_dir = common.prompts_dir;
    }
    if (opts.entries) config.retrieval.entry_count = *opts.entries;
    if (opts.synthesis) config.retrieval.synthesis_count = *opts.synthesis;
    if (!opts.judges.empty()) config.harness.judges = opts.judges;
    if (opts.parallel > 0) config.harness.parallelism = opts.parallel;

    const PromptSet prompts = PromptSet::load(config.prompts_dir);
    auto clock = make_clock(config.use_mock);

    auto conversations = load_dataset(opts.dataset_path, config.harness.category_map);
    MemoryStore probe = MemoryStore::load(store_dir / "store.mem");
    const Conversation* conv = find_conversation(conversations, probe.conversation_id());
    if (!conv) {
        throw Error("conversation '" + probe.conversation_id() +
                    "' (from the store) not found in dataset");
    }

    const fs::path out_base =
        opts.out_dir.empty() ? store_dir / "eval" : fs::path(opts.out_dir);

    if (opts.sweep.empty()) {
        const RunReport report = eval_once(config, *conv, store_dir, prompts, *clock,
                                           out_base);
        std::cout << report_table({report});
        return 0;
    }

    const auto eq = opts.sweep.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--sweep expects key=v1,v2,... (got '" + opts.sweep + "')");
    }
    const std::string key = opts.sweep.substr(0, eq);
    std::vector<std::string> values;
    {
        std::istringstream ss(opts.sweep.substr(eq + 1));
        std::string v;
        while (std::getline(ss, v, ',')) {
            if (!v.empty()) values.push_back(v);
        }
    }
    if (values.empty()) throw ConfigError("--sweep lists no values");

    std::vector<RunReport> reports;
    for (const auto& value : values) {
        RunConfig swept = config;
        fs::path out_dir = out_base / ("sweep_" + key + "_" + value);
        if (key == "entries") {
            swept.retrieval.entry_count = std::stoul(value);
            reports.push_back(eval_once(swept, *conv, store_dir, prompts, *clock, out_dir));
        } else if (key == "synthesis") {
            swept.retrieval.synthesis_count = std::stoul(value);
            reports.push_back(eval_once(swept, *conv, store_dir, prompts, *clock, out_dir));
        } else if (key == "seed_k") {
            std::cout << "warning: seed_k sweep rebuilds the store for K=" << value << "\n";
            swept.consolidation.seed_count = std::stoul(value);
            swept.paradigm = Paradigm::structmem;
            const PromptSet swept_prompts = PromptSet::load(swept.prompts_dir);
            auto provider = make_provider(swept, *clock);
            const BuildArtifacts artifacts =
                run_build(*conv, swept, swept_prompts, *provider, *clock);
            const fs::path build_dir = out_dir / "build";
            Manifest manifest = base_manifest(swept, swept_prompts, *clock);
            manifest.outputs = persist_build(artifacts, build_dir);
            write_run_config(swept, build_dir);
            manifest.outputs["config"] = "config.json";
            write_manifest(manifest, build_dir);
            reports.push_back(eval_once(swept, *conv, build_dir, swept_prompts, *clock,
                                        out_dir));
        } else {
            throw ConfigError("unknown sweep key '" + key +
                              "' (expected entries, synthesis, or seed_k)");
        }
    }
    std::cout << report_table(reports);
    return 0;
}

int cmd_audit(const CommonOptions& common, const std::string& mode,
              const std::string& dataset_path, const std::string& store_dir,
              const std::string& conversation_id, const std::string& out_dir) {
    RunConfig config = resolve_config(common);
    const PromptSet prompts = PromptSet::load(config.prompts_dir);
    auto clock = make_clock(config.use_mock);

    auto conversations = load_dataset(dataset_path, config.harness.category_map);
    if (conversations.empty()) throw Error("dataset holds no conversations");

    fs::create_directories(out_dir);
    UsageLedger ledger;

    if (mode == "extraction") {
        if (store_dir.empty()) throw ConfigError("--mode extraction requires --store");
        MemoryStore store = MemoryStore::load(fs::path(store_dir) / "store.mem");
        const Conversation* conv = find_conversation(conversations, store.conversation_id());
        if (!conv) {
            throw Error("conversation '" + store.conversation_id() +
                        "' not found in dataset");
        }
        auto judge = make_judge_provider(config, *clock,
                                         config.harness.judges.empty()
                                             ? std::string("mock")
                                             : config.harness.judges.front());
        const ExtractionAudit audit =
            audit_extraction_fidelity(store, *conv, prompts, *judge, ledger);
        {
            std::ofstream out(fs::path(out_dir) / "extraction_audit.json",
                              std::ios::binary);
            out << audit.to_json().dump(2) << '\n';
        }
        Manifest manifest = base_manifest(config, prompts, *clock);
        manifest.outputs["extraction_audit"] = "extraction_audit.json";
        write_manifest(manifest, out_dir);
        std::cout << "extraction fidelity: " << audit.hallucinated << "/" << audit.judged
                  << " hallucinated";
        if (audit.rate()) std::cout << " (rate " << *audit.rate() << ")";
        std::cout << ", " << audit.unscored << " unscored\n";
        return 0;
    }
    if (mode == "consolidation") {
        const Conversation* conv = conversation_id.empty()
                                       ? &conversations.front()
                                       : find_conversation(conversations, conversation_id);
        if (!conv) throw Error("conversation '" + conversation_id + "' not found");
        auto builder = make_provider(config, *clock);
        auto judge = make_judge_provider(config, *clock,
                                         config.harness.judges.empty()
                                             ? std::string("mock")
                                             : config.harness.judges.front());
        const ConsolidationAudit audit = audit_consolidation_fidelity(
            *conv, config, prompts, *builder, *judge, *clock, ledger);
        {
            std::ofstream out(fs::path(out_dir) / "consolidation_audit.json",
                              std::ios::binary);
            out << audit.to_json().dump(2) << '\n';
        }
        Manifest manifest = base_manifest(config, prompts, *clock);
        manifest.outputs["consolidation_audit"] = "consolidation_audit.json";
        write_manifest(manifest, out_dir);
        const auto line = [](const VariantLinkAudit& v) {
            std::ostringstream ss;
            ss << v.variant << ": S=" << v.spurious << " T=" << v.total << " R=";
            if (v.rate()) {
                ss << *v.rate() * 100.0 << "%";
            } else {
                ss << "0/0";
            }
            return ss.str();
        };
        std::cout << "consolidation fidelity over " << audit.cycles << " cycles\n  "
                  << line(audit.constrained) << "\n  " << line(audit.unconstrained) << "\n";
        return 0;
    }
    throw ConfigError("unknown audit mode '" + mode +
                      "' (expected extraction or consolidation)");
}

int cmd_report(const std::vector<std::string>& run_dirs) {
    std::vector<RunReport> reports;
    std::optional<std::size_t> dimension;
    for (const auto& dir : run_dirs) {
        const fs::path report_path = fs::path(dir) / "report.json";
        if (!fs::exists(report_path)) continue;
        RunReport report = load_report(report_path);
        std::size_t report_dimension = 0;
        if (report.config_snapshot.contains("use_mock") &&
            report.config_snapshot["use_mock"].get<bool>()) {
            report_dimension =
                report.config_snapshot["mock"]["dimension"].get<std::size_t>();
        } else if (report.config_snapshot.contains("provider")) {
            report_dimension =
                report.config_snapshot["provider"]["embedding_dimension"].get<std::size_t>();
        }
        if (dimension && report_dimension != *dimension) {
            throw ConfigError("run '" + dir + "' uses embedding dimension " +
                              std::to_string(report_dimension) +
                              ", other runs use " + std::to_string(*dimension) +
                              "; refusing a mixed-dimension comparison");
        }
        dimension = report_dimension;
        reports.push_back(std::move(report));
    }
    if (reports.empty()) {
        throw Error("no runs found under the given --run-dir paths");
    }
    std::cout << report_table(reports);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    {
        std::ostringstream ss;
        for (int i = 0; i < argc; ++i) {
            if (i) ss << ' ';
            ss << argv[i];
        }
        g_command_line = ss.str();
    }

    CLI::App app{"hierarchical conversational memory engine"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "ingest a conversation into memory");
    CommonOptions build_common;
    std::string build_dataset, build_conversation, build_paradigm, build_out = "runs";
    add_common(build, build_common);
    build->add_option("--dataset", build_dataset, "LoCoMo-style dataset file")->required();
    build->add_option("--conversation", build_conversation, "conversation id (default all)");
    build->add_option("--paradigm", build_paradigm, "flat | graph | structmem");
    build->add_option("--out", build_out, "output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "answer and judge a conversation's questions");
    CommonOptions eval_common;
    EvalOptions eval_opts;
    add_common(eval, eval_common);
    eval->add_option("--store", eval_opts.store_dir, "run directory from build")->required();
    eval->add_option("--dataset", eval_opts.dataset_path, "dataset file")->required();
    eval->add_option("--judges", eval_opts.judges, "judge model names")->delimiter(',');
    eval->add_option("--entries", eval_opts.entries, "retrieved entry count");
    eval->add_option("--synthesis", eval_opts.synthesis, "retrieved synthesis count");
    eval->add_option("--sweep", eval_opts.sweep, "key=v1,v2,... (entries|synthesis|seed_k)");
    eval->add_option("--out", eval_opts.out_dir, "report directory (default <store>/eval)");
    eval->add_option("--parallel", eval_opts.parallel, "question-answering parallelism");

    // audit
    auto* audit = app.add_subcommand("audit", "fidelity audits");
    CommonOptions audit_common;
    std::string audit_mode, audit_dataset, audit_store, audit_conversation,
        audit_out = "audit";
    add_common(audit, audit_common);
    audit->add_option("--mode", audit_mode, "extraction | consolidation")->required();
    audit->add_option("--dataset", audit_dataset, "dataset file")->required();
    audit->add_option("--store", audit_store, "run directory (extraction mode)");
    audit->add_option("--conversation", audit_conversation, "conversation id");
    audit->add_option("--out", audit_out, "output directory");

    // report
    auto* report = app.add_subcommand("report", "compare runs in a cost table");
    std::vector<std::string> report_dirs;
    report->add_option("--run-dir", report_dirs, "run directories to compare")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) {
            return cmd_build(build_common, build_dataset, build_conversation,
                             build_paradigm, build_out);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_common, eval_opts);
        }
        if (audit->parsed()) {
            return cmd_audit(audit_common, audit_mode, audit_dataset, audit_store,
                             audit_conversation, audit_out);
        }
        if (report->parsed()) {
            return cmd_report(report_dirs);
        }
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
