#include "doctest.h"

#include <sstream>

#include "palace/error.hpp"
#include "palace/eval.hpp"
#include "palace/palace.hpp"

#include "testutil.hpp"

using namespace palace;

namespace {

std::string serialize(const EvalFixture& f) {
    std::ostringstream out;
    save_fixture(f, out);
    return out.str();
}

}  // namespace

TEST_CASE("fixture generation") {
    SUBCASE("fixed seed is byte-identical") {
        auto a = generate_fixture(10, 20, 7);
        auto b = generate_fixture(10, 20, 7);
        CHECK(serialize(a) == serialize(b));
    }
    SUBCASE("different seeds differ") {
        CHECK(serialize(generate_fixture(10, 20, 7)) != serialize(generate_fixture(10, 20, 8)));
    }
    SUBCASE("session count = questions + distractors") {
        auto f = generate_fixture(50, 200, 7);
        CHECK(f.sessions.size() == 250);
        CHECK(f.questions.size() == 50);
    }
    SUBCASE("every keyphrase occurs in exactly one session") {
        auto f = generate_fixture(25, 60, 3);
        for (const auto& q : f.questions) {
            // the keyphrase is the distinctive token in the query
            std::string kp;
            for (const auto& tok : {q.query_text}) {
                auto pos = tok.find("_q");
                REQUIRE(pos != std::string::npos);
                size_t start = tok.rfind(' ', pos);
                size_t end = tok.find(' ', pos);
                kp = tok.substr(start + 1, (end == std::string::npos ? tok.size() : end) - start - 1);
            }
            REQUIRE(!kp.empty());
            size_t sessions_with_kp = 0;
            for (const auto& s : f.sessions) {
                bool present = false;
                for (const auto& e : s.exchanges) {
                    if (e.user_turn.find(kp) != std::string::npos ||
                        e.assistant_turn.find(kp) != std::string::npos) {
                        present = true;
                    }
                }
                if (present) {
                    sessions_with_kp++;
                    CHECK(s.session_id == q.answer_session_ids[0]);
                }
            }
            CHECK(sessions_with_kp == 1);
        }
    }
    SUBCASE("wing hints match the answer session") {
        auto f = generate_fixture(12, 12, 5);
        std::map<std::string, std::string> wing_of;
        for (const auto& s : f.sessions) wing_of[s.session_id] = s.wing;
        for (const auto& q : f.questions) {
            REQUIRE(q.wing_hint.has_value());
            CHECK(*q.wing_hint == wing_of[q.answer_session_ids[0]]);
        }
    }
    SUBCASE("save/load round-trip") {
        auto f = generate_fixture(5, 10, 9);
        std::istringstream in(serialize(f));
        auto g = load_fixture(in);
        CHECK(serialize(g) == serialize(f));
    }
}

TEST_CASE("ingest_fixture") {
    TempDir dir;
    auto fixture = generate_fixture(5, 5, 11);  // 10 sessions x 3 exchanges

    SUBCASE("verbatim ingest stores one drawer per exchange") {
        Palace::init(dir.sub("v"));
        Palace p = Palace::open(dir.sub("v"));
        ingest_fixture(fixture, p, EvalCondition::verbatim);
        CHECK(p.drawer_count() == 30);

        SUBCASE("re-ingest leaves counts unchanged") {
            ingest_fixture(fixture, p, EvalCondition::verbatim);
            CHECK(p.drawer_count() == 30);
        }
    }
    SUBCASE("aaak ingest keeps the drawer count but changes the text") {
        Palace::init(dir.sub("a"));
        Palace p = Palace::open(dir.sub("a"));
        ingest_fixture(fixture, p, EvalCondition::aaak);
        CHECK(p.drawer_count() == 30);
        for (const auto& d : p.drawers_by_recency()) {
            CHECK(d.content.rfind("AAAK|", 0) == 0);
        }
    }
    SUBCASE("broken fixture is rejected") {
        EvalFixture bad = fixture;
        bad.questions[0].answer_session_ids = {"no_such_session"};
        Palace::init(dir.sub("b"));
        Palace p = Palace::open(dir.sub("b"));
        CHECK_THROWS_AS(ingest_fixture(bad, p, EvalCondition::verbatim), Error);
    }
}

TEST_CASE("score_recall_any") {
    TempDir dir;
    auto fixture = generate_fixture(10, 20, 13);
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    ingest_fixture(fixture, p, EvalCondition::verbatim);

    auto report = score_recall_any(p, fixture, 10, false);

    SUBCASE("monotone in k") {
        CHECK(report.recall_any_at_k.at(1) <= report.recall_any_at_k.at(5));
        CHECK(report.recall_any_at_k.at(5) <= report.recall_any_at_k.at(10));
    }
    SUBCASE("bounded in [0,1]") {
        for (const auto& [k, v] : report.recall_any_at_k) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("unique-keyphrase fixture hits the ceiling in hybrid mode") {
        CHECK(report.recall_any_at_k.at(5) == 1.0);
    }
    SUBCASE("invalid k rejected") { CHECK_THROWS_AS(score_recall_any(p, fixture, 0, false), Error); }
}

TEST_CASE("ablation grid on a small fixture") {
    TempDir dir;
    auto fixture = generate_fixture(8, 16, 21);
    auto result = run_ablations(fixture, dir.sub("work"));

    CHECK(result.rows.size() == 8);
    CHECK(result.violations.empty());

    std::map<std::string, double> at5;
    for (const auto& row : result.rows) at5[row.condition] = row.report.recall_any_at_k.at(5);

    SUBCASE("cosine and l2 agree to the last digit") {
        CHECK(at5.at("verbatim_cosine_unscoped") == at5.at("verbatim_l2_unscoped"));
        CHECK(at5.at("verbatim_cosine_scoped") == at5.at("verbatim_l2_scoped"));
        CHECK(at5.at("aaak_cosine_unscoped") == at5.at("aaak_l2_unscoped"));
    }
    SUBCASE("aaak never beats verbatim") {
        CHECK(at5.at("aaak_cosine_unscoped") <= at5.at("verbatim_cosine_unscoped"));
        CHECK(at5.at("aaak_cosine_scoped") <= at5.at("verbatim_cosine_scoped"));
    }
    SUBCASE("scoped never loses to unscoped") {
        CHECK(at5.at("verbatim_cosine_scoped") >= at5.at("verbatim_cosine_unscoped"));
        CHECK(at5.at("aaak_cosine_scoped") >= at5.at("aaak_cosine_unscoped"));
    }
    SUBCASE("table and json render") {
        auto table = format_ablation_table(result);
        CHECK(table.find("verbatim_cosine_scoped") != std::string::npos);
        auto j = ablation_report_json(result);
        CHECK(j.find("recall_any@5") != std::string::npos);
        CHECK(j.find("runtime") == std::string::npos);
    }
}
