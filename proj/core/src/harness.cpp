#include "structmem/harness.hpp"

#include "structmem/errors.hpp"
#include "structmem/hash.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace structmem {

namespace {

using nlohmann::json;

constexpr const char* kJudgeSystemPrompt = "You are a strict grader.";

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

void run_cycle(MemoryStore& store, ConsolidationBuffer& buffer, const RunConfig& config,
               const PromptSet& prompts, Provider& provider, UsageLedger& ledger,
               IdSequence& ids, BuildArtifacts& artifacts) {
    try {
        const auto query = build_buffer_query(buffer, store, provider, ledger);
        const auto seeds = select_seeds(query, store, buffer, config.consolidation.seed_count,
                                        config.consolidation.include_synthesis_seeds);
        const auto context = assemble_cross_context(buffer, seeds, store);
        artifacts.cycles.push_back(synthesize(context, prompts, provider, store, buffer,
                                              config.consolidation, ledger, ids,
                                              artifacts.cycles.size(), &artifacts.events));
    } catch (const ProviderError& ex) {
        // Buffer survives for the next trigger.
        artifacts.events.push_back(std::string("consolidation cycle failed: ") + ex.what());
    }
}

}  // namespace

BuildArtifacts run_build(const Conversation& conv, const RunConfig& config,
                         const PromptSet& prompts, Provider& provider, Clock& clock) {
    (void)clock;
    BuildArtifacts artifacts{
        MemoryStore(provider.embedding_dimension(), conv.conversation_id)};
    if (config.paradigm == Paradigm::graph) {
        artifacts.graph.emplace(conv.conversation_id);
    }

    UsageLedger ledger;
    IdSequence ids;
    ConsolidationBuffer buffer;
    const auto utterances = conversation_utterances(conv);

    for (std::size_t i = 0; i < utterances.size(); ++i) {
        const Utterance& u = utterances[i];
        ++artifacts.utterances_total;

        if (config.paradigm == Paradigm::structmem && !buffer.empty() &&
            should_consolidate(buffer, u.timestamp, config.consolidation,
                               &artifacts.events)) {
            run_cycle(artifacts.store, buffer, config, prompts, provider, ledger, ids,
                      artifacts);
        }

        try {
            switch (config.paradigm) {
                case Paradigm::flat:
                    flat_ingest(u, prompts, provider, artifacts.store, ledger, ids);
                    break;
                case Paradigm::graph:
                    graph_ingest(u, prompts, provider, artifacts.store, *artifacts.graph,
                                 ledger, ids);
                    break;
                case Paradigm::structmem: {
                    const auto new_ids =
                        ingest_utterance(u, prompts, provider, artifacts.store, ledger, ids);
                    for (const auto& id : new_ids) buffer.append(id, u.timestamp);
                    break;
                }
            }
        } catch (const ProviderError& ex) {
            ++artifacts.utterances_failed;
            artifacts.events.push_back("utterance " + std::to_string(i + 1) + " (" +
                                       u.session_id + ") skipped: " + ex.what());
        }

        const StageTotals totals = ledger.total();
        artifacts.cost_curve.push_back(CostPoint{i + 1, totals.input_tokens,
                                                 totals.output_tokens, totals.calls,
                                                 totals.wall_seconds});
    }

    if (config.paradigm == Paradigm::structmem && !buffer.empty()) {
        run_cycle(artifacts.store, buffer, config, prompts, provider, ledger, ids,
                  artifacts);
        if (!artifacts.cost_curve.empty()) {
            const StageTotals totals = ledger.total();
            auto& last = artifacts.cost_curve.back();
            last.cumulative_input_tokens = totals.input_tokens;
            last.cumulative_output_tokens = totals.output_tokens;
            last.cumulative_calls = totals.calls;
            last.cumulative_wall_seconds = totals.wall_seconds;
        }
    }

    artifacts.usage = ledger.snapshot();
    return artifacts;
}

std::string parse_judge_verdict(const std::string& raw) {
    const std::string text = upper(raw);
    // Leading token first.
    std::istringstream ss(text);
    std::string token;
    if (ss >> token) {
        while (!token.empty() && !std::isalpha(static_cast<unsigned char>(token.back()))) {
            token.pop_back();
        }
        if (token == "CORRECT") return "correct";
        if (token == "WRONG" || token == "INCORRECT") return "incorrect";
    }
    // Fallback word search; "incorrect" must win over its substring.
    if (text.find("INCORRECT") != std::string::npos) return "incorrect";
    if (text.find("WRONG") != std::string::npos) return "incorrect";
    if (text.find("CORRECT") != std::string::npos) return "correct";
    return "unscored";
}

RunReport run_eval(const Conversation& conv, const MemoryStore& store,
                   const MemoryGraph* graph, const RunConfig& config,
                   const PromptSet& prompts, Provider& answerer,
                   const std::vector<std::pair<std::string, Provider*>>& judges,
                   const LedgerSnapshot& build_usage) {
    RunReport report;
    report.conversation_id = conv.conversation_id;
    report.paradigm = config.paradigm;
    report.build_usage = build_usage;
    report.config_snapshot = config_to_json(config);
    report.skipped_questions = conv.skipped_questions();

    std::vector<const QAItem*> items;
    for (const auto& item : conv.qa) {
        if (item.type) {
            items.push_back(&item);
        } else {
            report.skipped_log.push_back("question " + item.id + " skipped (category '" +
                                         item.raw_category + "')");
        }
    }

    const std::size_t n = items.size();
    std::vector<QAResult> results(n);
    std::vector<std::vector<JudgeVerdictRecord>> verdicts(n);

    const auto worker = [&](std::size_t index) {
        const QAItem& item = *items[index];
        UsageLedger scratch;
        QAResult result;
        switch (config.paradigm) {
            case Paradigm::flat:
                result = answer_flat(item.id, item.question, store, prompts, answerer,
                                     config.retrieval.entry_count, scratch);
                break;
            case Paradigm::graph: {
                static const MemoryGraph kEmptyGraph;
                result = answer_graph(item.id, item.question, store,
                                      graph ? *graph : kEmptyGraph, prompts, answerer,
                                      config.retrieval.entry_count, scratch);
                break;
            }
            case Paradigm::structmem:
                result = answer_structmem(item.id, item.question, store, prompts, answerer,
                                          config.retrieval, scratch);
                break;
        }

        std::vector<JudgeVerdictRecord> item_verdicts;
        for (const auto& [judge_name, judge_provider] : judges) {
            JudgeVerdictRecord record{item.id, judge_name, "unscored", ""};
            if (result.error) {
                // Failed answers score incorrect without a judge call.
                record.verdict = "incorrect";
                record.raw = "answer provider error: " + result.error_message;
            } else {
                try {
                    const ChatCall call{
                        kJudgeSystemPrompt,
                        prompts.fill("judge", {{"question", item.question},
                                               {"reference", item.reference},
                                               {"prediction", result.answer}}),
                        judge_provider->chat_model()};
                    const ChatResult judged =
                        judge_provider->complete(call, Stage::judge, scratch);
                    record.raw = judged.text;
                    record.verdict = parse_judge_verdict(judged.text);
                } catch (const ProviderError& ex) {
                    record.verdict = "unscored";
                    record.raw = std::string("judge provider error: ") + ex.what();
                }
            }
            item_verdicts.push_back(std::move(record));
        }

        result.usage = scratch.snapshot();
        results[index] = std::move(result);
        verdicts[index] = std::move(item_verdicts);
    };

    const int parallelism = std::max(1, config.harness.parallelism);
    if (parallelism == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) worker(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < parallelism; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    worker(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Fold usage in question order so reports are deterministic.
    UsageLedger eval_ledger;
    for (const auto& r : results) eval_ledger.merge(r.usage);
    report.eval_usage = eval_ledger.snapshot();
    report.results = std::move(results);

    for (std::size_t j = 0; j < judges.size(); ++j) {
        JudgeScores scores;
        scores.judge = judges[j].first;
        for (const auto& type :
             {QuestionType::multi_hop, QuestionType::open_domain, QuestionType::single_hop,
              QuestionType::temporal}) {
            scores.per_type.emplace(std::string(to_string(type)), TypeAccuracy{});
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& record = verdicts[i][j];
            auto& bucket = scores.per_type.at(std::string(to_string(*items[i]->type)));
            if (record.verdict == "unscored") {
                ++bucket.unscored;
                ++scores.overall.unscored;
                continue;
            }
            ++bucket.answered;
            ++scores.overall.answered;
            if (record.verdict == "correct") {
                ++bucket.correct;
                ++scores.overall.correct;
            }
        }
        report.scores.push_back(std::move(scores));
    }
    for (auto& per_item : verdicts) {
        for (auto& record : per_item) report.verdicts.push_back(std::move(record));
    }

    // Agreement across judges, over questions every judge scored.
    if (judges.size() >= 2) {
        std::vector<std::pair<std::string, std::vector<int>>> vectors;
        for (const auto& [name, provider] : judges) {
            (void)provider;
            vectors.push_back({name, {}});
        }
        std::map<std::pair<std::string, std::string>, std::string> verdict_by_key;
        for (const auto& record : report.verdicts) {
            verdict_by_key[{record.question_id, record.judge}] = record.verdict;
        }
        for (std::size_t i = 0; i < n; ++i) {
            bool all_scored = true;
            for (const auto& [name, provider] : judges) {
                (void)provider;
                if (verdict_by_key[{items[i]->id, name}] == "unscored") {
                    all_scored = false;
                    break;
                }
            }
            if (!all_scored) continue;
            for (std::size_t j = 0; j < judges.size(); ++j) {
                vectors[j].second.push_back(
                    verdict_by_key[{items[i]->id, judges[j].first}] == "correct" ? 1 : 0);
            }
        }
        if (!vectors.front().second.empty()) {
            report.agreement = agreement_stats(vectors);
        }
    }
    return report;
}

// ---- serialization ----

namespace {

json type_accuracy_to_json(const TypeAccuracy& t) {
    return json{{"correct", t.correct},
                {"answered", t.answered},
                {"unscored", t.unscored},
                {"accuracy", t.accuracy()}};
}

TypeAccuracy type_accuracy_from_json(const json& j) {
    TypeAccuracy t;
    t.correct = j.at("correct").get<std::size_t>();
    t.answered = j.at("answered").get<std::size_t>();
    t.unscored = j.at("unscored").get<std::size_t>();
    return t;
}

}  // namespace

json RunReport::to_json() const {
    json scores_json = json::array();
    for (const auto& s : scores) {
        json per_type = json::object();
        for (const auto& [type, acc] : s.per_type) {
            per_type[type] = type_accuracy_to_json(acc);
        }
        scores_json.push_back({{"judge", s.judge},
                               {"per_type", per_type},
                               {"overall", type_accuracy_to_json(s.overall)}});
    }
    json results_json = json::array();
    for (const auto& r : results) results_json.push_back(r.to_json());
    json verdicts_json = json::array();
    for (const auto& v : verdicts) {
        verdicts_json.push_back({{"question_id", v.question_id},
                                 {"judge", v.judge},
                                 {"verdict", v.verdict},
                                 {"raw", v.raw}});
    }
    json j{
        {"conversation_id", conversation_id},
        {"paradigm", std::string(to_string(paradigm))},
        {"scores", scores_json},
        {"build_usage", snapshot_to_json(build_usage)},
        {"eval_usage", snapshot_to_json(eval_usage)},
        {"results", results_json},
        {"verdicts", verdicts_json},
        {"config", config_snapshot},
        {"skipped_log", skipped_log},
        {"skipped_questions", skipped_questions},
    };
    j["agreement"] = agreement ? agreement->to_json() : json(nullptr);
    return j;
}

RunReport RunReport::from_json(const json& j) {
    RunReport report;
    report.conversation_id = j.at("conversation_id").get<std::string>();
    report.paradigm = paradigm_from_string(j.at("paradigm").get<std::string>());
    for (const auto& s : j.at("scores")) {
        JudgeScores scores;
        scores.judge = s.at("judge").get<std::string>();
        for (const auto& [type, acc] : s.at("per_type").items()) {
            scores.per_type[type] = type_accuracy_from_json(acc);
        }
        scores.overall = type_accuracy_from_json(s.at("overall"));
        report.scores.push_back(std::move(scores));
    }
    report.build_usage = snapshot_from_json(j.at("build_usage"));
    report.eval_usage = snapshot_from_json(j.at("eval_usage"));
    for (const auto& r : j.at("results")) report.results.push_back(QAResult::from_json(r));
    for (const auto& v : j.at("verdicts")) {
        report.verdicts.push_back(JudgeVerdictRecord{
            v.at("question_id").get<std::string>(), v.at("judge").get<std::string>(),
            v.at("verdict").get<std::string>(), v.at("raw").get<std::string>()});
    }
    if (j.contains("agreement") && !j.at("agreement").is_null()) {
        report.agreement = AgreementReport::from_json(j.at("agreement"));
    }
    report.config_snapshot = j.at("config");
    report.skipped_log = j.at("skipped_log").get<std::vector<std::string>>();
    report.skipped_questions = j.at("skipped_questions").get<std::size_t>();
    return report;
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw IoError("cannot write report.json under " + dir.string());
        out << report.to_json().dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "report.txt", std::ios::binary);
        if (!out) throw IoError("cannot write report.txt under " + dir.string());
        out << report_table({report});
    }
}

RunReport load_report(const std::filesystem::path& json_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw IoError("cannot open report '" + json_path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw IoError("report '" + json_path.string() + "' is not valid JSON: " + ex.what());
    }
    return RunReport::from_json(j);
}

std::string report_table(const std::vector<RunReport>& reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %8s %8s %8s %8s %8s %9s %9s %9s %8s %10s\n",
                  "Method", "Overall", "Multi", "Open", "Single", "Temp", "In(M)",
                  "Out(M)", "Sum(M)", "Calls", "Time(s)");
    out << line;
    for (const auto& report : reports) {
        const JudgeScores* primary = report.primary();
        const auto acc = [&](const char* type) {
            if (!primary) return 0.0;
            auto it = primary->per_type.find(type);
            return it == primary->per_type.end() ? 0.0 : 100.0 * it->second.accuracy();
        };
        const StageTotals build = snapshot_total(report.build_usage);
        const StageTotals build_chat = snapshot_total_chat(report.build_usage);
        std::snprintf(line, sizeof(line),
                      "%-12s %8.2f %8.2f %8.2f %8.2f %8.2f %9.3f %9.3f %9.3f %8lld %10.3f\n",
                      std::string(to_string(report.paradigm)).c_str(),
                      primary ? 100.0 * primary->overall.accuracy() : 0.0, acc("multi_hop"),
                      acc("open_domain"), acc("single_hop"), acc("temporal"),
                      build.input_tokens / 1e6, build.output_tokens / 1e6,
                      (build.input_tokens + build.output_tokens) / 1e6,
                      static_cast<long long>(build_chat.calls), build.wall_seconds);
        out << line;
    }
    return out.str();
}

void write_cost_curve(const std::vector<CostPoint>& curve,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write cost curve '" + path.string() + "'");
    out << "turn,input_tokens,output_tokens,calls,wall_seconds\n";
    char line[160];
    for (const auto& p : curve) {
        std::snprintf(line, sizeof(line), "%zu,%lld,%lld,%lld,%.6f\n", p.turn_index,
                      static_cast<long long>(p.cumulative_input_tokens),
                      static_cast<long long>(p.cumulative_output_tokens),
                      static_cast<long long>(p.cumulative_calls), p.cumulative_wall_seconds);
        out << line;
    }
}

json Manifest::to_json() const {
    return json{{"command_line", command_line},
                {"config_hash", config_hash},
                {"prompt_hashes", prompt_hashes},
                {"seed", seed},
                {"created_at", created_at},
                {"outputs", outputs}};
}

Manifest Manifest::from_json(const json& j) {
    Manifest m;
    m.command_line = j.at("command_line").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.prompt_hashes = j.at("prompt_hashes").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.created_at = j.at("created_at").get<std::string>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write manifest under " + dir.string());
    out << manifest.to_json().dump(2) << '\n';
}

Manifest load_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) throw IoError("no manifest.json under '" + dir.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw IoError("manifest under '" + dir.string() + "' is not valid JSON: " +
                      ex.what());
    }
    return Manifest::from_json(j);
}

std::map<std::string, std::string> persist_build(const BuildArtifacts& artifacts,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::map<std::string, std::string> outputs;

    artifacts.store.save(dir / "store.mem");
    outputs["store"] = "store.mem";
    if (artifacts.graph) {
        artifacts.graph->save(dir / "graph.mem");
        outputs["graph"] = "graph.mem";
    }
    {
        std::ofstream out(dir / "ledger.json", std::ios::binary);
        if (!out) throw IoError("cannot write ledger under " + dir.string());
        out << snapshot_to_json(artifacts.usage).dump(2) << '\n';
        outputs["ledger"] = "ledger.json";
    }
    write_cost_curve(artifacts.cost_curve, dir / "cost_curve.csv");
    outputs["cost_curve"] = "cost_curve.csv";
    {
        json cycles = json::array();
        for (const auto& c : artifacts.cycles) {
            cycles.push_back({{"cycle", c.cycle_index},
                              {"stamped", c.stamped.to_string()},
                              {"seed_ids", c.seed_ids},
                              {"synthesis_ids", c.synthesis_ids},
                              {"template_hash", to_hex(c.template_hash)},
                              {"buffer_text", c.buffer_text},
                              {"supplementary_text", c.supplementary_text},
                              {"synthesis_text", c.synthesis_text},
                              {"supplementary_truncated", c.supplementary_truncated}});
        }
        std::ofstream out(dir / "build_log.json", std::ios::binary);
        if (!out) throw IoError("cannot write build log under " + dir.string());
        out << json{{"events", artifacts.events},
                    {"cycles", cycles},
                    {"utterances_total", artifacts.utterances_total},
                    {"utterances_failed", artifacts.utterances_failed}}
                   .dump(2)
            << '\n';
        outputs["build_log"] = "build_log.json";
    }
    return outputs;
}

}  // namespace structmem
