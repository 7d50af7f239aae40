// Acceptance suite: one pass/fail line per criterion, all runnable offline
// with the deterministic mock provider. Exit code = number of failed
// criteria.

#include "structmem/agreement.hpp"
#include "structmem/audit.hpp"
#include "structmem/baselines.hpp"
#include "structmem/clock.hpp"
#include "structmem/consolidation.hpp"
#include "structmem/harness.hpp"
#include "structmem/mock_provider.hpp"
#include "structmem/openai_provider.hpp"
#include "structmem/retrieval.hpp"
#include "structmem/similarity.hpp"

#include "fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

using namespace structmem;
using structmem::testsupport::expected_cycles;
using structmem::testsupport::make_synthetic_conversation;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw Failure(message);
}

template <typename A, typename B>
void require_eq(const A& a, const B& b, const std::string& what) {
    if (!(a == b)) {
        std::ostringstream ss;
        ss << what << ": " << a << " != " << b;
        throw Failure(ss.str());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Context {
    PromptSet prompts = PromptSet::load(STRUCTMEM_PROMPTS_DIR);
    fs::path work;

    Context() {
        work = fs::temp_directory_path() / "structmem_acceptance";
        fs::remove_all(work);
        fs::create_directories(work);
    }

    RunConfig mock_config(Paradigm paradigm, std::uint64_t seed = 7) const {
        RunConfig config = default_config();
        config.paradigm = paradigm;
        config.use_mock = true;
        config.mock.seed = seed;
        return config;
    }
};

std::vector<Timestamp> utterance_timestamps(const Conversation& conv) {
    std::vector<Timestamp> out;
    for (const auto& u : conversation_utterances(conv)) out.push_back(u.timestamp);
    return out;
}

// ---- criterion 1: call-structure fidelity ----

void criterion_call_structure(const Context& ctx) {
    const auto start = std::chrono::steady_clock::now();
    const auto conv = make_synthetic_conversation();  // 100 utterances
    const std::size_t n = conversation_utterances(conv).size();
    require_eq(n, std::size_t{100}, "fixture utterance count");

    const std::size_t c = expected_cycles(utterance_timestamps(conv), 3600);
    FakeClock clock;
    MockProvider provider(clock, 7);

    const auto flat = run_build(conv, ctx.mock_config(Paradigm::flat), ctx.prompts,
                                provider, clock);
    require_eq(snapshot_total_chat(flat.usage).calls, static_cast<std::int64_t>(n),
               "flat chat calls");

    const auto structmem_build = run_build(conv, ctx.mock_config(Paradigm::structmem),
                                           ctx.prompts, provider, clock);
    require_eq(structmem_build.cycles.size(), c, "consolidation cycle count");
    require_eq(snapshot_total_chat(structmem_build.usage).calls,
               static_cast<std::int64_t>(2 * n + c), "structmem chat calls (2N + C)");

    const auto graph = run_build(conv, ctx.mock_config(Paradigm::graph), ctx.prompts,
                                 provider, clock);
    require_eq(snapshot_total_chat(graph.usage).calls, static_cast<std::int64_t>(5 * n),
               "graph chat calls (5N)");

    const double elapsed = seconds_since(start);
    require(elapsed < 30.0, "runtime budget exceeded: " + std::to_string(elapsed) + "s");
}

// ---- criterion 2: efficiency ordering ----

void criterion_efficiency_ordering(const Context& ctx) {
    FakeClock clock;
    MockProvider provider(clock, 7);

    // structmem < graph on every fixture with N >= 10.
    for (const auto& [sessions, turns] : std::vector<std::pair<std::size_t, std::size_t>>{
             {1, 10}, {2, 10}, {4, 5}, {10, 10}}) {
        const auto conv = make_synthetic_conversation(sessions, turns);
        const auto sm = run_build(conv, ctx.mock_config(Paradigm::structmem), ctx.prompts,
                                  provider, clock);
        const auto gr = run_build(conv, ctx.mock_config(Paradigm::graph), ctx.prompts,
                                  provider, clock);
        require(snapshot_total_chat(sm.usage).calls < snapshot_total_chat(gr.usage).calls,
                "structmem must use fewer chat calls than graph at N = " +
                    std::to_string(sessions * turns));
    }

    // Graph dedup growth: per-utterance chat input tokens are monotone
    // non-decreasing under the mock tokenizer.
    const auto conv = make_synthetic_conversation();
    UsageLedger ledger;
    MemoryStore store(provider.embedding_dimension(), conv.conversation_id);
    MemoryGraph graph(conv.conversation_id);
    IdSequence ids;
    std::vector<std::int64_t> per_utterance;
    std::int64_t previous = 0;
    for (const auto& u : conversation_utterances(conv)) {
        graph_ingest(u, ctx.prompts, provider, store, graph, ledger, ids);
        const std::int64_t total = ledger.total_chat().input_tokens;
        per_utterance.push_back(total - previous);
        previous = total;
    }
    for (std::size_t i = 1; i < per_utterance.size(); ++i) {
        require(per_utterance[i] >= per_utterance[i - 1],
                "graph per-utterance input tokens regressed at utterance " +
                    std::to_string(i + 1));
    }
    require(per_utterance.back() > per_utterance.front(),
            "graph dedup context shows no growth");
}

// ---- criterion 3: retrieval oracle equivalence ----

std::vector<float> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / norm);
    return out;
}

/// Embeds every text to one fixed vector; lets retrieve_context run under a
/// test-chosen query.
class FixedVectorProvider final : public Provider {
public:
    FixedVectorProvider(Clock& clock, std::vector<float> vector)
        : Provider(clock), vector_(std::move(vector)) {}
    std::size_t embedding_dimension() const override { return vector_.size(); }
    std::string name() const override { return "fixed"; }
    std::string chat_model() const override { return "fixed"; }

protected:
    ChatResult do_complete(const ChatCall&) override { return {"unused", 1, 1}; }
    EmbedBatch do_embed(const std::vector<std::string>& texts) override {
        return {std::vector<std::vector<float>>(texts.size(), vector_), 1};
    }

private:
    std::vector<float> vector_;
};

std::vector<Scored> oracle_top_k(const std::vector<MemoryEntry>& entries,
                                 const std::vector<float>& query, std::size_t k,
                                 const std::function<bool(const MemoryEntry&)>& filter) {
    struct Row {
        double sim;
        std::int64_t epoch;
        const std::string* id;
    };
    std::vector<Row> rows;
    for (const auto& e : entries) {
        if (!e.has_embedding() || (filter && !filter(e))) continue;
        rows.push_back({cosine_similarity(query, e.embedding),
                        e.timestamp.epoch_seconds(), &e.id});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        if (a.epoch != b.epoch) return a.epoch > b.epoch;
        return *a.id < *b.id;
    });
    if (rows.size() > k) rows.resize(k);
    std::vector<Scored> out;
    for (const auto& r : rows) out.push_back({*r.id, r.sim});
    return out;
}

void criterion_retrieval_oracle(const Context&) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1234);
    constexpr std::size_t dim = 32;

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 2000)(rng);
        MemoryStore store(dim, "oracle");
        std::vector<MemoryEntry> entries;
        entries.reserve(size);
        for (std::size_t i = 0; i < size; ++i) {
            MemoryEntry e;
            e.id = "e" + std::to_string(i);
            e.text = "t";
            e.kind = (i % 11 == 0) ? EntryKind::synthesis
                     : (i % 2 == 0) ? EntryKind::factual
                                    : EntryKind::relational;
            e.timestamp = Timestamp::from_epoch_seconds(
                1'600'000'000 + std::uniform_int_distribution<int>(0, 49)(rng) * 60);
            e.conversation_id = "oracle";
            e.embedding = random_unit(rng, dim);
            entries.push_back(e);
        }
        store.add_entries(entries);
        const auto query = random_unit(rng, dim);

        // top_k_similar, unfiltered.
        const std::size_t k = std::uniform_int_distribution<std::size_t>(0, 70)(rng);
        require(store.top_k_similar(query, k) == oracle_top_k(entries, query, k, {}),
                "top_k_similar diverged from the oracle");

        // select_seeds: buffered ids excluded.
        ConsolidationBuffer buffer;
        for (std::size_t i = 0; i < entries.size(); i += 7) {
            buffer.append(entries[i].id, entries[i].timestamp);
        }
        const std::set<std::string> buffered(buffer.ids().begin(), buffer.ids().end());
        const auto seeds = select_seeds(query, store, buffer, 15);
        require(seeds == oracle_top_k(entries, query, 15,
                                      [&](const MemoryEntry& e) {
                                          return !buffered.count(e.id);
                                      }),
                "select_seeds diverged from the oracle");

        // retrieve_context: both circuits, with the query vector injected
        // through a fixed-vector provider.
        FakeClock clock;
        FixedVectorProvider provider(clock, query);
        UsageLedger ledger;
        const auto ctx_result =
            retrieve_context("q", store, provider, RetrievalConfig{60, 5}, ledger);
        require(ctx_result.entries == oracle_top_k(entries, query, 60,
                                                   [](const MemoryEntry& e) {
                                                       return e.kind != EntryKind::synthesis;
                                                   }),
                "retrieve_context entry circuit diverged from the oracle");
        require(ctx_result.syntheses ==
                    oracle_top_k(entries, query, 5,
                                 [](const MemoryEntry& e) {
                                     return e.kind == EntryKind::synthesis;
                                 }),
                "retrieve_context synthesis circuit diverged from the oracle");
    }

    const double elapsed = seconds_since(start);
    require(elapsed < 60.0, "runtime budget exceeded: " + std::to_string(elapsed) + "s");
}

// ---- criterion 4: event reconstruction and cross-event context ----

void criterion_event_reconstruction(const Context& ctx) {
    std::mt19937_64 rng(777);
    FakeClock clock;
    MockProvider provider(clock, 7);

    // reconstruct_event vs linear scan on fuzz stores.
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 500)(rng);
        MemoryStore store(8, "fuzz");
        std::vector<MemoryEntry> entries;
        for (std::size_t i = 0; i < size; ++i) {
            MemoryEntry e;
            e.id = "e" + std::to_string(i);
            e.text = "t" + std::to_string(i);
            e.timestamp = Timestamp::from_epoch_seconds(
                1'600'000'000 + std::uniform_int_distribution<int>(0, 49)(rng) * 3600);
            e.conversation_id = "fuzz";
            entries.push_back(e);
        }
        store.add_entries(entries);
        std::set<std::int64_t> stamps;
        for (const auto& e : entries) stamps.insert(e.timestamp.epoch_seconds());
        for (const auto epoch : stamps) {
            std::vector<std::string> expected;
            for (const auto& e : entries) {
                if (e.timestamp.epoch_seconds() == epoch) expected.push_back(e.id);
            }
            require(store.reconstruct_event(Timestamp::from_epoch_seconds(epoch))
                            .entry_ids == expected,
                    "reconstruct_event diverged from the linear scan");
        }
        require(store.reconstruct_event(Timestamp::from_epoch_seconds(42)).entry_ids.empty(),
                "unknown timestamp must give an empty event");
    }

    // K = 0 degenerates to the sorted buffer, exactly.
    {
        MemoryStore store(provider.embedding_dimension(), "k0");
        ConsolidationBuffer buffer;
        IdSequence ids;
        UsageLedger ledger;
        const std::vector<std::pair<const char*, const char*>> data{
            {"second entry", "2023-05-01T11:00:00Z"},
            {"first entry", "2023-05-01T10:00:00Z"},
            {"third entry", "2023-05-01T12:00:00Z"},
        };
        for (const auto& [text, iso] : data) {
            MemoryEntry e;
            e.id = ids.next();
            e.text = text;
            e.timestamp = Timestamp::parse(iso);
            e.conversation_id = "k0";
            e.embedding = provider.embed_one(text);
            store.add_entries({e});
            buffer.append(e.id, e.timestamp);
        }
        const auto query = build_buffer_query(buffer, store, provider, ledger);
        const auto seeds = select_seeds(query, store, buffer, 0);
        require(seeds.empty(), "K = 0 must select no seeds");
        const auto context = assemble_cross_context(buffer, seeds, store);
        require(context.supplementary.empty(), "K = 0 must add no supplementary events");
        require_eq(context.buffered.size(), std::size_t{3}, "buffered size");
        require(context.buffered[0].text == std::string("first entry") &&
                    context.buffered[1].text == std::string("second entry") &&
                    context.buffered[2].text == std::string("third entry"),
                "K = 0 context must equal the chronologically sorted buffer");
    }

    // Union dedup against a set oracle.
    for (int trial = 0; trial < 20; ++trial) {
        MemoryStore store(8, "union");
        ConsolidationBuffer buffer;
        std::vector<MemoryEntry> entries;
        const std::size_t size = std::uniform_int_distribution<std::size_t>(10, 200)(rng);
        for (std::size_t i = 0; i < size; ++i) {
            MemoryEntry e;
            e.id = "u" + std::to_string(i);
            e.text = "t";
            e.timestamp = Timestamp::from_epoch_seconds(
                1'700'000'000 + std::uniform_int_distribution<int>(0, 9)(rng) * 3600);
            e.conversation_id = "union";
            entries.push_back(e);
        }
        store.add_entries(entries);
        for (std::size_t i = 0; i < entries.size(); i += 9) {
            buffer.append(entries[i].id, entries[i].timestamp);
        }
        std::vector<Scored> seeds;
        for (std::size_t i = 3; i < entries.size(); i += 11) {
            if (!buffer.contains(entries[i].id)) seeds.push_back({entries[i].id, 0.5});
        }
        const auto context = assemble_cross_context(buffer, seeds, store);

        std::set<std::string> expected;
        const std::set<std::string> buffered(buffer.ids().begin(), buffer.ids().end());
        for (const auto& seed : seeds) {
            const auto ts = store.find(seed.id)->timestamp;
            for (const auto& e : entries) {
                if (e.timestamp == ts && !buffered.count(e.id)) expected.insert(e.id);
            }
        }
        std::set<std::string> got;
        for (const auto& e : context.supplementary) {
            require(got.insert(e.id).second, "duplicate id in supplementary context");
        }
        require(got == expected, "cross-event union diverged from the set oracle");
    }
    (void)ctx;
}

// ---- criterion 5: trigger correctness ----

void criterion_trigger(const Context&) {
    ConsolidationConfig config;
    require_eq(config.time_threshold_secs, std::int64_t{3600}, "default threshold");

    // Boundary behavior around the one-hour default.
    {
        ConsolidationBuffer buffer;
        buffer.append("a", Timestamp::parse("2023-05-01T10:00:00Z"));
        require(!should_consolidate(buffer, Timestamp::parse("2023-05-01T10:59:00Z"),
                                    config),
                "10:59 must not trigger");
        require(!should_consolidate(buffer, Timestamp::parse("2023-05-01T11:00:00Z"),
                                    config),
                "exactly one hour must not trigger");
        require(should_consolidate(buffer, Timestamp::parse("2023-05-01T11:01:00Z"),
                                   config),
                "11:01 must trigger");
    }

    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 80)(rng);
        std::vector<Timestamp> stream;
        std::int64_t t = 1'650'000'000;
        for (std::size_t i = 0; i < n; ++i) {
            t += std::uniform_int_distribution<std::int64_t>(0, 7200)(rng);
            stream.push_back(Timestamp::from_epoch_seconds(t));
        }
        std::size_t cycles = 0;
        ConsolidationBuffer buffer;
        for (const auto& ts : stream) {
            if (!buffer.empty() && should_consolidate(buffer, ts, config)) {
                ++cycles;
                buffer.clear();
            }
            buffer.append("x" + std::to_string(buffer.size()) + "-" +
                              std::to_string(cycles),
                          ts);
        }
        if (!buffer.empty()) ++cycles;
        require_eq(cycles, expected_cycles(stream, config.time_threshold_secs),
                   "cycle count vs reference scan (trial " + std::to_string(trial) + ")");
    }
}

// ---- criterion 6: determinism and persistence ----

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "missing artifact: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void criterion_determinism(const Context& ctx) {
    const fs::path dataset = ctx.work / "dataset.json";
    testsupport::write_dataset({make_synthetic_conversation()}, dataset.string());
    const fs::path out = ctx.work / "det_runs";

    const std::string command =
        std::string(STRUCTMEM_CLI_PATH) + " build --dataset " + dataset.string() +
        " --paradigm structmem --mock --seed 7 --prompts " STRUCTMEM_PROMPTS_DIR
        " --out " + out.string() + " > /dev/null 2>&1";
    const std::string eval_command =
        std::string(STRUCTMEM_CLI_PATH) + " eval --store " +
        (out / "synthetic-1").string() + " --dataset " + dataset.string() +
        " --mock --seed 7 --prompts " STRUCTMEM_PROMPTS_DIR " > /dev/null 2>&1";

    require(std::system(command.c_str()) == 0, "first build failed");
    require(std::system(eval_command.c_str()) == 0, "first eval failed");
    const std::string store_1 = slurp(out / "synthetic-1" / "store.mem");
    const std::string manifest_1 = slurp(out / "synthetic-1" / "manifest.json");
    const std::string ledger_1 = slurp(out / "synthetic-1" / "ledger.json");
    const std::string report_1 = slurp(out / "synthetic-1" / "eval" / "report.json");
    const std::string eval_manifest_1 =
        slurp(out / "synthetic-1" / "eval" / "manifest.json");

    require(std::system(command.c_str()) == 0, "second build failed");
    require(std::system(eval_command.c_str()) == 0, "second eval failed");
    require(slurp(out / "synthetic-1" / "store.mem") == store_1,
            "stores differ across identical mock runs");
    require(slurp(out / "synthetic-1" / "manifest.json") == manifest_1,
            "manifests differ across identical mock runs");
    require(slurp(out / "synthetic-1" / "ledger.json") == ledger_1,
            "ledgers differ across identical mock runs");
    require(slurp(out / "synthetic-1" / "eval" / "report.json") == report_1,
            "reports differ across identical mock runs");
    require(slurp(out / "synthetic-1" / "eval" / "manifest.json") == eval_manifest_1,
            "eval manifests differ across identical mock runs");

    // persist/load is the identity.
    const MemoryStore loaded = MemoryStore::load(out / "synthetic-1" / "store.mem");
    const fs::path copy = ctx.work / "copy.mem";
    loaded.save(copy);
    const MemoryStore reloaded = MemoryStore::load(copy);
    require(loaded.deep_equal(reloaded), "persist/load round-trip is not the identity");
    require(loaded.size() > 0, "loaded store is unexpectedly empty");
}

// ---- criterion 7: agreement statistics ----

void criterion_agreement(const Context&) {
    const std::vector<int> a{1, 1, 0, 0};
    const std::vector<int> b{1, 0, 1, 0};
    const auto kappa = cohen_kappa(a, b);
    require(kappa.has_value(), "hand-case kappa must be defined");
    require(std::abs(*kappa) <= 1e-12,
            "Cohen kappa hand case: expected 0, got " + std::to_string(*kappa));

    const std::vector<std::vector<int>> fleiss_matrix{
        {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
        {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
        {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7},
    };
    const auto fleiss = fleiss_kappa(fleiss_matrix);
    require(fleiss.has_value(), "Fleiss kappa must be defined");
    // Reference value frozen from an independent implementation
    // (statsmodels.stats.inter_rater.fleiss_kappa).
    require(std::abs(*fleiss - 0.20993070442195522) <= 1e-9,
            "Fleiss kappa deviates from the reference implementation: " +
                std::to_string(*fleiss));
}

// ---- criterion 8: harness integrity ----

void criterion_harness_integrity(const Context& ctx) {
    const auto conv = make_synthetic_conversation();
    FakeClock clock;
    MockProvider provider(clock, 7);
    const RunConfig config = ctx.mock_config(Paradigm::structmem);

    const auto artifacts = run_build(conv, config, ctx.prompts, provider, clock);
    const RunReport report = run_eval(conv, artifacts.store, nullptr, config, ctx.prompts,
                                      provider, {{"mock", &provider}}, artifacts.usage);

    require_eq(report.scores.size(), std::size_t{1}, "judge count");
    const JudgeScores& scores = report.scores.front();

    // Containment oracle over the recorded answers.
    std::map<std::string, const QAItem*> items;
    for (const auto& item : conv.qa) items[item.id] = &item;
    const auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(c));
        return s;
    };
    std::size_t oracle_correct = 0;
    for (const auto& result : report.results) {
        const QAItem* item = items.at(result.question_id);
        if (lower(result.answer).find(lower(item->reference)) != std::string::npos) {
            ++oracle_correct;
        }
    }
    require_eq(scores.overall.correct, oracle_correct,
               "judge accuracy vs containment oracle");
    require_eq(scores.overall.answered, report.results.size(), "scored denominator");

    // Denominators and skip counts reconcile.
    require_eq(report.skipped_questions, conv.skipped_questions(), "skip count");
    require_eq(report.results.size() + report.skipped_questions, conv.qa.size(),
               "answered + skipped = total");
    std::size_t per_type_answered = 0, per_type_correct = 0;
    for (const auto& [type, acc] : scores.per_type) {
        per_type_answered += acc.answered;
        per_type_correct += acc.correct;
    }
    require_eq(per_type_answered, scores.overall.answered, "per-type denominators");
    require_eq(per_type_correct, scores.overall.correct, "per-type numerators");

    // Report round-trip.
    require(RunReport::from_json(report.to_json()) == report,
            "report does not round-trip through JSON");
    const fs::path dir = ctx.work / "report_roundtrip";
    emit_report(report, dir);
    require(load_report(dir / "report.json") == report,
            "report does not round-trip through the filesystem");
}

// ---- criterion 9: optional live check (not gating) ----

bool criterion_live(const Context& ctx, std::string& note) {
    const char* dataset_path = std::getenv("STRUCTMEM_LIVE_DATASET");
    const char* live = std::getenv("STRUCTMEM_LIVE");
    if (!dataset_path || !live || std::string(live) != "1") {
        note = "set STRUCTMEM_LIVE=1 and STRUCTMEM_LIVE_DATASET=<locomo.json> "
               "(plus OPENAI_API_KEY) to run";
        return false;
    }
    SystemClock clock;
    RunConfig config = default_config();
    config.use_mock = false;

    const auto conversations =
        load_dataset(dataset_path, config.harness.category_map);
    require(!conversations.empty(), "live dataset holds no conversations");
    const Conversation& conv = conversations.front();

    OpenAiProvider provider(clock, config.provider);
    config.paradigm = Paradigm::structmem;
    const auto sm = run_build(conv, config, ctx.prompts, provider, clock);
    config.paradigm = Paradigm::graph;
    const auto gr = run_build(conv, config, ctx.prompts, provider, clock);

    const StageTotals sm_chat = snapshot_total_chat(sm.usage);
    const StageTotals gr_chat = snapshot_total_chat(gr.usage);
    std::cout << "    live structmem: calls=" << sm_chat.calls
              << " tokens=" << sm_chat.input_tokens + sm_chat.output_tokens
              << " | graph: calls=" << gr_chat.calls
              << " tokens=" << gr_chat.input_tokens + gr_chat.output_tokens << "\n";
    require(sm_chat.calls < gr_chat.calls, "structmem must use fewer calls than graph");
    require(sm_chat.input_tokens + sm_chat.output_tokens <
                gr_chat.input_tokens + gr_chat.output_tokens,
            "structmem must use fewer build tokens than graph");
    note = "completed against live providers";
    return true;
}

}  // namespace

int main() {
    Context ctx;
    struct Criterion {
        int id;
        const char* name;
        std::function<void(const Context&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "call-structure fidelity: N / 2N+C / 5N chat calls", criterion_call_structure},
        {2, "efficiency ordering and dedup-context growth", criterion_efficiency_ordering},
        {3, "retrieval equals brute-force oracles (100 random stores)",
         criterion_retrieval_oracle},
        {4, "event reconstruction and cross-event context", criterion_event_reconstruction},
        {5, "consolidation trigger vs reference scan (1000 streams)", criterion_trigger},
        {6, "determinism and persistence round-trip", criterion_determinism},
        {7, "agreement statistics vs frozen references", criterion_agreement},
        {8, "harness integrity: oracle accuracy, denominators, round-trip",
         criterion_harness_integrity},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(ctx);
            std::cout << "[PASS] " << criterion.id << " " << criterion.name << " ("
                      << seconds_since(start) << "s)\n";
        } catch (const std::exception& ex) {
            ++failures;
            std::cout << "[FAIL] " << criterion.id << " " << criterion.name << ": "
                      << ex.what() << "\n";
        }
    }

    // Criterion 9 is an optional live check and never gates.
    {
        std::string note;
        try {
            const bool ran = criterion_live(ctx, note);
            std::cout << (ran ? "[PASS] 9 live provider check: " : "[SKIP] 9 live provider check: ")
                      << note << "\n";
        } catch (const std::exception& ex) {
            std::cout << "[WARN] 9 live provider check failed (not gating): " << ex.what()
                      << "\n";
        }
    }

    std::cout << (failures == 0 ? "acceptance: all criteria passed\n"
                                : "acceptance: " + std::to_string(failures) +
                                      " criteria failed\n");
    return failures;
}
