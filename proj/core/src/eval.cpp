#include "palace/eval.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "palace/dialect.hpp"
#include "palace/error.hpp"
#include "palace/palace.hpp"
#include "palace/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace palace {

const char* to_string(EvalCondition c) {
    switch (c) {
        case EvalCondition::verbatim: return "verbatim";
        case EvalCondition::aaak: return "aaak";
        case EvalCondition::scoped: return "scoped";
        case EvalCondition::unscoped: return "unscoped";
        case EvalCondition::cosine: return "cosine";
        case EvalCondition::l2: return "l2";
    }
    return "verbatim";
}

EvalCondition eval_condition_from_string(const std::string& s) {
    if (s == "verbatim") return EvalCondition::verbatim;
    if (s == "aaak") return EvalCondition::aaak;
    if (s == "scoped") return EvalCondition::scoped;
    if (s == "unscoped") return EvalCondition::unscoped;
    if (s == "cosine") return EvalCondition::cosine;
    if (s == "l2") return EvalCondition::l2;
    raise(ErrorKind::invalid_input, "unknown eval condition: " + s);
}

PalaceConfig condition_config(EvalCondition c) {
    PalaceConfig config;
    config.distance_metric = c == EvalCondition::l2 ? DistanceMetric::l2 : DistanceMetric::cosine;
    return config;
}

namespace {

const std::vector<std::string>& word_bank() {
    static const std::vector<std::string> bank = {
        "service",  "deploy",   "cluster", "billing", "invoice", "report",  "meeting", "release",
        "database", "schema",   "index",   "query",   "cache",   "token",   "session", "login",
        "metric",   "alert",    "budget",  "review",  "design",  "draft",   "ticket",  "branch",
        "merge",    "test",     "build",   "staging", "rollout", "gateway", "proxy",   "config",
        "secret",   "backup",   "restore", "monitor", "latency", "traffic", "replica", "shard",
        "customer", "contract", "renewal", "roadmap", "sprint",  "standup", "notes",   "summary",
        "payment",  "refund",   "account", "profile", "storage", "bucket",  "queue",   "worker",
        "schedule", "pipeline", "vendor",  "license", "audit",   "policy",  "incident", "retro",
    };
    return bank;
}

std::string random_word(std::mt19937_64& rng) {
    return word_bank()[rng() % word_bank().size()];
}

std::string random_sentence(std::mt19937_64& rng, size_t min_words, size_t max_words) {
    size_t n = min_words + rng() % (max_words - min_words + 1);
    std::string s;
    for (size_t i = 0; i < n; i++) {
        if (i) s += " ";
        s += random_word(rng);
    }
    s += ".";
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

// Pronounceable random token; the question index suffix guarantees global
// uniqueness.
std::string keyphrase_for(std::mt19937_64& rng, size_t question_idx) {
    static const char* consonants = "bcdfghjklmnpqrstvwz";
    static const char* vowels = "aeiou";
    auto syllables = [&](size_t n) {
        std::string w;
        for (size_t i = 0; i < n; i++) {
            w += consonants[rng() % 19];
            w += vowels[rng() % 5];
        }
        return w;
    };
    return syllables(3) + "_" + syllables(3) + "_q" + std::to_string(question_idx);
}

std::string fixture_timestamp(size_t minute) {
    size_t hour = 8 + minute / 60;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "2026-03-01T%02zu:%02zu:00Z", hour % 24, minute % 60);
    return buf;
}

void validate_fixture(const EvalFixture& fixture) {
    std::set<std::string> ids;
    for (const auto& s : fixture.sessions) {
        if (!ids.insert(s.session_id).second) {
            raise(ErrorKind::invalid_input, "fixture-error: duplicate session id " + s.session_id);
        }
    }
    for (const auto& q : fixture.questions) {
        if (q.answer_session_ids.empty()) {
            raise(ErrorKind::invalid_input,
                  "fixture-error: question " + q.question_id + " has no answer sessions");
        }
        for (const auto& a : q.answer_session_ids) {
            if (!ids.count(a)) {
                raise(ErrorKind::invalid_input, "fixture-error: question " + q.question_id +
                                                    " references unknown session " + a);
            }
        }
    }
}

}  // namespace

EvalFixture generate_fixture(size_t n_questions, size_t n_distractor_sessions, uint64_t seed) {
    if (n_questions == 0 || n_distractor_sessions == 0) {
        raise(ErrorKind::invalid_input, "generate_fixture: parameters must be positive");
    }
    std::mt19937_64 rng(seed);
    const std::vector<std::string> wings = {"alpha", "beta", "gamma", "delta"};
    const std::vector<std::string> rooms = {"ops", "dev", "support", "planning"};

    EvalFixture fixture;
    size_t wing_idx = 0;
    size_t minute = 0;

    for (size_t i = 0; i < n_questions; i++) {
        std::string kp = keyphrase_for(rng, i);

        EvalSession session;
        session.session_id = "sess_answer_" + std::to_string(i);
        session.wing = wings[wing_idx++ % wings.size()];
        session.room = rooms[rng() % rooms.size()];

        for (int t = 0; t < 3; t++) {
            Exchange e;
            e.session_id = session.session_id;
            e.turn_index = t;
            e.ts = fixture_timestamp(minute++);
            if (t == 1) {
                e.user_turn = "How is the " + kp + " rollout configured?";
                e.assistant_turn = "The " + kp + " rollout runs three replicas behind the " +
                                   random_word(rng) + " gateway. " + random_sentence(rng, 6, 10);
            } else {
                e.user_turn = random_sentence(rng, 5, 9);
                e.assistant_turn = random_sentence(rng, 7, 12);
            }
            session.exchanges.push_back(std::move(e));
        }
        fixture.sessions.push_back(std::move(session));

        EvalQuestion q;
        q.question_id = "q" + std::to_string(i);
        q.query_text = "what do you recall about the " + kp + " rollout";
        q.answer_session_ids = {"sess_answer_" + std::to_string(i)};
        q.wing_hint = fixture.sessions.back().wing;
        fixture.questions.push_back(std::move(q));
    }

    for (size_t j = 0; j < n_distractor_sessions; j++) {
        EvalSession session;
        session.session_id = "sess_distractor_" + std::to_string(j);
        session.wing = wings[wing_idx++ % wings.size()];
        session.room = rooms[rng() % rooms.size()];
        for (int t = 0; t < 3; t++) {
            Exchange e;
            e.session_id = session.session_id;
            e.turn_index = t;
            e.ts = fixture_timestamp(minute++);
            e.user_turn = random_sentence(rng, 5, 9);
            e.assistant_turn = random_sentence(rng, 7, 12) + " " + random_sentence(rng, 6, 10);
            session.exchanges.push_back(std::move(e));
        }
        fixture.sessions.push_back(std::move(session));
    }

    validate_fixture(fixture);
    return fixture;
}

void save_fixture(const EvalFixture& fixture, std::ostream& out) {
    json j;
    j["questions"] = json::array();
    for (const auto& q : fixture.questions) {
        json jq;
        jq["question_id"] = q.question_id;
        jq["query_text"] = q.query_text;
        jq["answer_session_ids"] = q.answer_session_ids;
        if (q.wing_hint) jq["wing_hint"] = *q.wing_hint;
        j["questions"].push_back(std::move(jq));
    }
    j["sessions"] = json::array();
    for (const auto& s : fixture.sessions) {
        json js;
        js["session_id"] = s.session_id;
        js["wing"] = s.wing;
        js["room"] = s.room;
        js["exchanges"] = json::array();
        for (const auto& e : s.exchanges) {
            json je;
            je["user_turn"] = e.user_turn;
            je["assistant_turn"] = e.assistant_turn;
            je["turn_index"] = e.turn_index;
            if (e.ts) je["ts"] = *e.ts;
            js["exchanges"].push_back(std::move(je));
        }
        j["sessions"].push_back(std::move(js));
    }
    out << j.dump(2) << "\n";
}

EvalFixture load_fixture(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrorKind::parse, std::string("fixture parse: ") + e.what());
    }
    EvalFixture fixture;
    for (const auto& jq : j.value("questions", json::array())) {
        EvalQuestion q;
        q.question_id = jq.at("question_id").get<std::string>();
        q.query_text = jq.at("query_text").get<std::string>();
        q.answer_session_ids = jq.at("answer_session_ids").get<std::vector<std::string>>();
        if (jq.contains("wing_hint")) q.wing_hint = jq["wing_hint"].get<std::string>();
        fixture.questions.push_back(std::move(q));
    }
    for (const auto& js : j.value("sessions", json::array())) {
        EvalSession s;
        s.session_id = js.at("session_id").get<std::string>();
        s.wing = js.at("wing").get<std::string>();
        s.room = js.at("room").get<std::string>();
        int t = 0;
        for (const auto& je : js.value("exchanges", json::array())) {
            Exchange e;
            e.user_turn = je.at("user_turn").get<std::string>();
            e.assistant_turn = je.at("assistant_turn").get<std::string>();
            e.session_id = s.session_id;
            e.turn_index = je.value("turn_index", t);
            if (je.contains("ts")) e.ts = je["ts"].get<std::string>();
            s.exchanges.push_back(std::move(e));
            t++;
        }
        fixture.sessions.push_back(std::move(s));
    }
    validate_fixture(fixture);
    return fixture;
}

void ingest_fixture(const EvalFixture& fixture, Palace& palace, EvalCondition condition) {
    validate_fixture(fixture);

    std::map<std::string, PalaceAddress> address_of;
    for (const auto& s : fixture.sessions) {
        address_of[s.session_id] = PalaceAddress{s.wing, s.room, std::nullopt, std::nullopt};
    }

    if (condition == EvalCondition::aaak) {
        // Lossy condition: the searchable text is the serialized compression,
        // not the verbatim exchange.
        for (const auto& s : fixture.sessions) {
            for (const auto& e : s.exchanges) {
                std::string compressed = serialize_aaak(compress(exchange_content(e)));
                palace.remember(compressed, address_of[s.session_id], DrawerKind::convo_exchange,
                                std::nullopt, e.ts, e.session_id, e.turn_index);
            }
        }
        return;
    }

    // Verbatim conditions route through the regular conversation miner.
    fs::path tmp = fs::path(palace.config().palace_path) / ".fixture_export.jsonl";
    {
        std::ofstream out(tmp);
        if (!out) raise(ErrorKind::io, "cannot write " + tmp.string());
        for (const auto& s : fixture.sessions) {
            for (const auto& e : s.exchanges) {
                json ju{{"session_id", e.session_id}, {"role", "user"}, {"content", e.user_turn}};
                if (e.ts) ju["ts"] = *e.ts;
                json ja{{"session_id", e.session_id},
                        {"role", "assistant"},
                        {"content", e.assistant_turn}};
                if (e.ts) ja["ts"] = *e.ts;
                out << ju.dump() << "\n" << ja.dump() << "\n";
            }
        }
    }
    mine_conversation(palace, tmp.string(),
                      [&](const Exchange& e) { return address_of.at(e.session_id); });
    fs::remove(tmp);
}

EvalReport score_recall_any(const Palace& palace, const EvalFixture& fixture, size_t max_k,
                            bool scoped, SearchMode mode) {
    if (max_k < 1) raise(ErrorKind::invalid_input, "score_recall_any: k must be >= 1");

    auto started = std::chrono::steady_clock::now();
    const std::vector<size_t> standard_ks = {1, 5, 10};
    std::vector<size_t> ks;
    for (size_t k : standard_ks) {
        if (k <= max_k) ks.push_back(k);
    }
    if (ks.empty()) ks.push_back(max_k);

    std::map<size_t, size_t> hits;
    for (const auto& q : fixture.questions) {
        SearchRequest req;
        req.query = q.query_text;
        req.n_results = max_k;
        req.mode = mode;
        if (scoped && q.wing_hint) req.wing = q.wing_hint;

        auto results = palace.search_memories(req);
        std::set<std::string> answers(q.answer_session_ids.begin(), q.answer_session_ids.end());
        for (size_t k : ks) {
            bool hit = false;
            for (size_t i = 0; i < results.size() && i < k; i++) {
                if (results[i].session_id && answers.count(*results[i].session_id)) {
                    hit = true;
                    break;
                }
            }
            if (hit) hits[k]++;
        }
    }

    EvalReport report;
    for (size_t k : ks) {
        report.recall_any_at_k[k] =
            fixture.questions.empty()
                ? 0.0
                : static_cast<double>(hits[k]) / static_cast<double>(fixture.questions.size());
    }
    report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    return report;
}

AblationResult run_ablations(const EvalFixture& fixture, const std::string& work_dir) {
    AblationResult result;
    fs::create_directories(work_dir);

    struct Cell {
        EvalCondition compression;
        EvalCondition metric;
    };
    const std::vector<Cell> cells = {
        {EvalCondition::verbatim, EvalCondition::cosine},
        {EvalCondition::verbatim, EvalCondition::l2},
        {EvalCondition::aaak, EvalCondition::cosine},
        {EvalCondition::aaak, EvalCondition::l2},
    };

    std::map<std::string, EvalReport> by_name;
    for (const auto& cell : cells) {
        std::string base = std::string(to_string(cell.compression)) + "_" + to_string(cell.metric);
        fs::path dir = fs::path(work_dir) / ("palace_" + base);
        fs::remove_all(dir);

        PalaceConfig config = condition_config(cell.metric);
        Palace::init(dir.string(), config);
        Palace palace = Palace::open(dir.string());
        EvalCondition ingest_as =
            cell.compression == EvalCondition::aaak ? EvalCondition::aaak : EvalCondition::verbatim;
        ingest_fixture(fixture, palace, ingest_as);

        for (bool scoped : {true, false}) {
            EvalReport report = score_recall_any(palace, fixture, 10, scoped);
            std::string name = base + (scoped ? "_scoped" : "_unscoped");
            by_name[name] = report;
            result.rows.push_back({name, std::move(report)});
        }
    }

    auto at5 = [&](const std::string& name) { return by_name.at(name).recall_any_at_k.at(5); };
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) result.violations.push_back(msg);
    };

    for (const char* scope : {"_scoped", "_unscoped"}) {
        for (const char* comp : {"verbatim", "aaak"}) {
            std::string cos = std::string(comp) + "_cosine" + scope;
            std::string l2 = std::string(comp) + "_l2" + scope;
            check(at5(cos) == at5(l2),
                  "metric equivalence failed: " + cos + " != " + l2);
        }
        for (const char* met : {"_cosine", "_l2"}) {
            std::string v = std::string("verbatim") + met + scope;
            std::string a = std::string("aaak") + met + scope;
            check(at5(a) <= at5(v), "compression direction failed: " + a + " > " + v);
        }
    }
    for (const char* comp : {"verbatim", "aaak"}) {
        for (const char* met : {"_cosine", "_l2"}) {
            std::string s = std::string(comp) + met + "_scoped";
            std::string u = std::string(comp) + met + "_unscoped";
            check(at5(s) >= at5(u), "scoping direction failed: " + s + " < " + u);
        }
    }

    // Cross-condition breakdown on every row, for the report consumers.
    for (auto& row : result.rows) {
        for (const auto& [name, rep] : by_name) {
            row.report.condition_breakdown[name] = rep.recall_any_at_k.at(5);
        }
    }
    return result;
}

std::string format_ablation_table(const AblationResult& result) {
    std::ostringstream out;
    out << "condition                     r@1     r@5     r@10    ms\n";
    for (const auto& row : result.rows) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-28s  %.4f  %.4f  %.4f  %lld\n", row.condition.c_str(),
                      row.report.recall_any_at_k.at(1), row.report.recall_any_at_k.at(5),
                      row.report.recall_any_at_k.at(10),
                      static_cast<long long>(row.report.runtime_ms));
        out << line;
    }
    for (const auto& v : result.violations) out << "VIOLATION: " << v << "\n";
    return out.str();
}

std::string ablation_report_json(const AblationResult& result) {
    // Runtime is excluded so a fixed seed produces a byte-identical report.
    json j;
    j["conditions"] = json::object();
    for (const auto& row : result.rows) {
        json scores;
        for (const auto& [k, v] : row.report.recall_any_at_k) {
            scores["recall_any@" + std::to_string(k)] = v;
        }
        j["conditions"][row.condition] = scores;
    }
    j["violations"] = result.violations;
    return j.dump(2);
}

}  // namespace palace
