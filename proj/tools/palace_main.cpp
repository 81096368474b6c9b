// palace: operator CLI for the memory palace engine.
//
// Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
// 1 user error (bad arguments or input), 2 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "palace/dialect.hpp"
#include "palace/error.hpp"
#include "palace/eval.hpp"
#include "palace/layers.hpp"
#include "palace/mcp_server.hpp"
#include "palace/miner.hpp"
#include "palace/palace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace palace;

namespace {

struct Options {
    std::string palace_path = "palace";
    bool as_json = false;
};

Palace open_palace(const Options& opt) { return Palace::open(opt.palace_path); }

void emit(const Options& opt, const json& machine, const std::string& human) {
    if (opt.as_json) std::cout << machine.dump(2) << "\n";
    else std::cout << human;
}

json result_to_json(const SearchResult& r) {
    json j;
    j["drawer_id"] = r.drawer_id;
    j["content"] = r.content;
    j["wing"] = r.address.wing;
    j["room"] = r.address.room;
    if (r.address.hall) j["hall"] = *r.address.hall;
    if (r.address.closet) j["closet"] = *r.address.closet;
    j["distance"] = r.distance;
    j["keyword_score"] = r.keyword_score;
    j["fused_score"] = r.fused_score;
    j["provenance"] = to_string(r.provenance);
    if (r.session_id) j["session_id"] = *r.session_id;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"palace — verbatim-first hierarchical memory engine"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--palace", opt.palace_path, "Palace directory")
        ->envname("PALACE_PATH");
    app.add_flag("--json", opt.as_json, "Machine-readable JSON output");

    // ---- init ----
    std::string init_path;
    size_t init_dim = 384;
    std::string init_metric = "cosine";
    auto* cmd_init = app.add_subcommand("init", "Create a new palace");
    cmd_init->add_option("path", init_path, "Directory for the new palace")->required();
    cmd_init->add_option("--dim", init_dim, "Embedding dimension");
    cmd_init->add_option("--metric", init_metric, "Distance metric (cosine|l2)");

    // ---- mine ----
    std::string mine_dir;
    auto* cmd_mine = app.add_subcommand("mine", "Mine a project directory into drawers");
    cmd_mine->add_option("dir", mine_dir, "Project directory")->required();

    // ---- mine-convo ----
    std::string convo_file;
    auto* cmd_convo = app.add_subcommand("mine-convo", "Mine a conversation export (JSON-lines)");
    cmd_convo->add_option("file", convo_file, "Export file")->required();

    // ---- recall ----
    SearchRequest recall_req;
    std::string recall_query, recall_wing, recall_room, recall_mode = "hybrid";
    auto* cmd_recall = app.add_subcommand("recall", "Search memories");
    cmd_recall->add_option("query", recall_query, "Query text")->required();
    cmd_recall->add_option("--wing", recall_wing, "Restrict to a wing");
    cmd_recall->add_option("--room", recall_room, "Restrict to a room");
    cmd_recall->add_option("-k,--n-results", recall_req.n_results, "Result count (default 5)");
    cmd_recall->add_option("--max-distance", recall_req.max_distance,
                           "Semantic distance cutoff (0 = disabled)");
    cmd_recall->add_option("--mode", recall_mode, "semantic|keyword|hybrid");

    // ---- remember ----
    std::string rem_text, rem_wing, rem_room, rem_hall;
    auto* cmd_remember = app.add_subcommand("remember", "Store a memory verbatim");
    cmd_remember->add_option("text", rem_text, "Content")->required();
    cmd_remember->add_option("--wing", rem_wing, "Wing")->required();
    cmd_remember->add_option("--room", rem_room, "Room")->required();
    cmd_remember->add_option("--hall", rem_hall, "Hall (optional)");

    // ---- status ----
    auto* cmd_status = app.add_subcommand("status", "Palace summary");

    // ---- kg ----
    auto* cmd_kg = app.add_subcommand("kg", "Knowledge graph");
    cmd_kg->require_subcommand(1);
    std::string kg_subject, kg_predicate, kg_object, kg_from, kg_to, kg_at;
    double kg_confidence = 1.0;
    auto* cmd_kg_add = cmd_kg->add_subcommand("add", "Add a triple");
    cmd_kg_add->add_option("--subject", kg_subject)->required();
    cmd_kg_add->add_option("--predicate", kg_predicate)->required();
    cmd_kg_add->add_option("--object", kg_object)->required();
    cmd_kg_add->add_option("--valid-from", kg_from);
    cmd_kg_add->add_option("--valid-to", kg_to);
    cmd_kg_add->add_option("--confidence", kg_confidence);
    auto* cmd_kg_query = cmd_kg->add_subcommand("query", "Query triples");
    cmd_kg_query->add_option("--subject", kg_subject);
    cmd_kg_query->add_option("--predicate", kg_predicate);
    cmd_kg_query->add_option("--at", kg_at, "Point-in-time filter (ISO-8601)");

    // ---- diary ----
    auto* cmd_diary = app.add_subcommand("diary", "Per-agent diaries");
    cmd_diary->require_subcommand(1);
    std::string diary_agent, diary_text, diary_session;
    size_t diary_last = 10;
    auto* cmd_diary_append = cmd_diary->add_subcommand("append", "Append an entry");
    cmd_diary_append->add_option("agent", diary_agent)->required();
    cmd_diary_append->add_option("text", diary_text)->required();
    cmd_diary_append->add_option("--session", diary_session);
    auto* cmd_diary_read = cmd_diary->add_subcommand("read", "Read recent entries");
    cmd_diary_read->add_option("agent", diary_agent)->required();
    cmd_diary_read->add_option("--last", diary_last, "Entry count (default 10)");

    // ---- serve ----
    auto* cmd_serve = app.add_subcommand("serve", "JSON-RPC tool server on stdio");

    // ---- bench ----
    auto* cmd_bench = app.add_subcommand("bench", "Benchmark harness");
    cmd_bench->require_subcommand(1);
    size_t bench_questions = 50, bench_distractors = 200;
    uint64_t bench_seed = 7;
    std::string bench_out, bench_fixture, bench_workdir;
    auto* cmd_bench_gen = cmd_bench->add_subcommand("generate", "Generate a synthetic fixture");
    cmd_bench_gen->add_option("--questions", bench_questions);
    cmd_bench_gen->add_option("--distractors", bench_distractors);
    cmd_bench_gen->add_option("--seed", bench_seed);
    cmd_bench_gen->add_option("--out", bench_out, "Output file (default stdout)");
    auto* cmd_bench_run = cmd_bench->add_subcommand("run", "Run the ablation grid");
    cmd_bench_run->add_option("--fixture", bench_fixture, "Fixture file (default: generated)");
    cmd_bench_run->add_option("--questions", bench_questions);
    cmd_bench_run->add_option("--distractors", bench_distractors);
    cmd_bench_run->add_option("--seed", bench_seed);
    cmd_bench_run->add_option("--work-dir", bench_workdir, "Scratch directory for palaces");

    // ---- dedup-report ----
    auto* cmd_dedup = app.add_subcommand("dedup-report", "List exact-content duplicate groups");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, std::cerr);  // message + usage on stderr
        return 1;
    }

    if (*cmd_init) {
        PalaceConfig config;
        config.embedding_dim = init_dim;
        config.distance_metric = distance_metric_from_string(init_metric);
        Palace::init(init_path, config);
        emit(opt, json{{"initialized", init_path}}, "initialized palace at " + init_path + "\n");
        return 0;
    }

    if (*cmd_mine) {
        Palace p = open_palace(opt);
        auto report = mine_project(p, mine_dir);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        emit(opt,
             json{{"drawers_added", report.drawers_added},
                  {"drawers_deduplicated", report.drawers_deduplicated},
                  {"files_processed", report.files_processed}},
             "mined " + std::to_string(report.files_processed) + " files: " +
                 std::to_string(report.drawers_added) + " drawers added, " +
                 std::to_string(report.drawers_deduplicated) + " deduplicated\n");
        return 0;
    }

    if (*cmd_convo) {
        Palace p = open_palace(opt);
        auto report = mine_conversation(p, convo_file);
        emit(opt,
             json{{"drawers_added", report.drawers_added},
                  {"drawers_deduplicated", report.drawers_deduplicated},
                  {"exchanges", report.exchanges}},
             std::to_string(report.exchanges) + " exchanges: " +
                 std::to_string(report.drawers_added) + " drawers added, " +
                 std::to_string(report.drawers_deduplicated) + " deduplicated\n");
        return 0;
    }

    if (*cmd_recall) {
        Palace p = open_palace(opt);
        recall_req.query = recall_query;
        if (!recall_wing.empty()) recall_req.wing = recall_wing;
        if (!recall_room.empty()) recall_req.room = recall_room;
        recall_req.mode = search_mode_from_string(recall_mode);
        auto results = p.search_memories(recall_req);

        json out = json::array();
        std::string human;
        for (size_t i = 0; i < results.size(); i++) {
            const auto& r = results[i];
            out.push_back(result_to_json(r));
            human += std::to_string(i + 1) + ". [" + r.address.wing + "/" + r.address.room +
                     "] " + r.drawer_id + " (distance " + std::to_string(r.distance) +
                     ", keyword " + std::to_string(r.keyword_score) + ")\n";
            human += "   " + r.content + "\n";
        }
        if (results.empty()) human = "no results\n";
        emit(opt, out, human);
        return 0;
    }

    if (*cmd_remember) {
        Palace p = open_palace(opt);
        PalaceAddress addr{rem_wing, rem_room, {}, {}};
        if (!rem_hall.empty()) addr.hall = rem_hall;
        auto res = p.remember(rem_text, addr);
        emit(opt, json{{"drawer_id", res.drawer_id}, {"deduplicated", res.deduplicated}},
             res.drawer_id + (res.deduplicated ? " (deduplicated)\n" : "\n"));
        return 0;
    }

    if (*cmd_status) {
        Palace p = open_palace(opt);
        auto s = p.status();
        emit(opt,
             json{{"wing_count", s.wing_count},
                  {"room_count", s.room_count},
                  {"drawer_count", s.drawer_count},
                  {"protocol_directive", s.protocol_directive}},
             "wings: " + std::to_string(s.wing_count) + "\nrooms: " + std::to_string(s.room_count) +
                 "\ndrawers: " + std::to_string(s.drawer_count) + "\n\n" + s.protocol_directive +
                 "\n");
        return 0;
    }

    if (*cmd_kg) {
        Palace p = open_palace(opt);
        if (*cmd_kg_add) {
            Triple t;
            t.subject = kg_subject;
            t.predicate = kg_predicate;
            t.object = kg_object;
            if (!kg_from.empty()) t.valid_from = kg_from;
            if (!kg_to.empty()) t.valid_to = kg_to;
            t.confidence = kg_confidence;
            bool added = p.kg().add_triple(t);
            emit(opt, json{{"triple_id", KnowledgeGraph::triple_identity(t)}, {"added", added}},
                 added ? "added\n" : "duplicate, not added\n");
            return 0;
        }
        // kg query
        std::vector<Triple> found;
        if (!kg_subject.empty()) {
            std::optional<std::string> at;
            if (!kg_at.empty()) at = kg_at;
            found = p.kg().query_by_subject(kg_subject, at);
        } else if (!kg_predicate.empty()) {
            found = p.kg().query_by_predicate(kg_predicate);
        } else {
            raise(ErrorKind::invalid_input, "kg query needs --subject or --predicate");
        }
        json out = json::array();
        std::string human;
        for (const auto& t : found) {
            json j{{"id", t.id},           {"subject", t.subject},
                   {"predicate", t.predicate}, {"object", t.object},
                   {"confidence", t.confidence}};
            j["valid_from"] = t.valid_from ? json(*t.valid_from) : json(nullptr);
            j["valid_to"] = t.valid_to ? json(*t.valid_to) : json(nullptr);
            out.push_back(std::move(j));
            human += t.subject + " --" + t.predicate + "--> " + t.object;
            if (t.valid_from || t.valid_to) {
                human += " [" + t.valid_from.value_or("") + ", " + t.valid_to.value_or("") + ")";
            }
            human += "\n";
        }
        if (found.empty()) human = "no triples\n";
        emit(opt, out, human);
        return 0;
    }

    if (*cmd_diary) {
        Palace p = open_palace(opt);
        if (*cmd_diary_append) {
            auto entry = p.diary().append(diary_agent, diary_session, diary_text);
            emit(opt, json{{"agent_id", entry.agent_id}, {"created_at", entry.created_at}},
                 "appended\n");
            return 0;
        }
        auto entries = p.diary().read(diary_agent, diary_last);
        json out = json::array();
        std::string human;
        for (const auto& e : entries) {
            out.push_back({{"agent_id", e.agent_id},
                           {"session_id", e.session_id},
                           {"text", e.text},
                           {"created_at", e.created_at}});
            human += e.created_at + " [" + e.session_id + "] " + e.text + "\n";
        }
        if (entries.empty()) human = "no entries\n";
        emit(opt, out, human);
        return 0;
    }

    if (*cmd_serve) {
        Palace p = open_palace(opt);
        McpServer server(p);
        server.serve(std::cin, std::cout);
        return 0;
    }

    if (*cmd_bench) {
        if (*cmd_bench_gen) {
            auto fixture = generate_fixture(bench_questions, bench_distractors, bench_seed);
            if (bench_out.empty()) {
                save_fixture(fixture, std::cout);
            } else {
                std::ofstream out(bench_out);
                if (!out) raise(ErrorKind::io, "cannot write " + bench_out);
                save_fixture(fixture, out);
                std::cerr << "fixture written to " << bench_out << "\n";
            }
            return 0;
        }
        // bench run
        EvalFixture fixture;
        if (!bench_fixture.empty()) {
            std::ifstream in(bench_fixture);
            if (!in) raise(ErrorKind::not_found, "cannot open fixture " + bench_fixture);
            fixture = load_fixture(in);
        } else {
            fixture = generate_fixture(bench_questions, bench_distractors, bench_seed);
        }
        std::string work = bench_workdir;
        if (work.empty()) {
            work = (fs::temp_directory_path() / ("palace_bench_" + std::to_string(bench_seed)))
                       .string();
            fs::remove_all(work);
        }
        auto result = run_ablations(fixture, work);
        if (opt.as_json) {
            std::cout << ablation_report_json(result) << "\n";
        } else {
            std::cout << format_ablation_table(result);
        }
        return result.violations.empty() ? 0 : 1;
    }

    if (*cmd_dedup) {
        Palace p = open_palace(opt);
        auto groups = p.dedup_groups();
        json out = json::array();
        std::string human;
        for (const auto& g : groups) {
            out.push_back(g);
            human += "duplicate group (" + std::to_string(g.size()) + "):\n";
            for (const auto& id : g) human += "  " + id + "\n";
        }
        if (groups.empty()) human = "no exact-content duplicates across addresses\n";
        emit(opt, out, human);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::invalid_input:
            case ErrorKind::not_found:
            case ErrorKind::config:
            case ErrorKind::parse:
                return 1;
            default:
                return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
