#include "doctest.h"

#include <string>

#include "palace/error.hpp"
#include "palace/layers.hpp"
#include "palace/palace.hpp"

#include "testutil.hpp"

using namespace palace;

TEST_CASE("token estimation is ceil(chars/4)") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(estimate_tokens(std::string(680, 'x')) == 170);
    // multibyte scalars count once
    CHECK(estimate_tokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9") == 1);
}

TEST_CASE("build_l1") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));

    SUBCASE("empty palace gives empty L1") { CHECK(build_l1(p).empty()); }

    SUBCASE("budget ceiling always holds") {
        PalaceAddress a{"w", "r", {}, {}};
        for (int i = 0; i < 40; i++) {
            p.remember("note number " + std::to_string(i) +
                           " about the rollout pipeline and the gateway configuration work",
                       a, DrawerKind::manual, {}, "2026-01-01T00:" + std::to_string(10 + i) + ":00Z");
        }
        LayerBudget budget;
        auto l1 = build_l1(p, budget);
        CHECK(estimate_tokens(l1) <= budget.l1_max);
        CHECK(!l1.empty());

        SUBCASE("most recent drawers come first") {
            auto pos_late = l1.find("note number 39");
            auto pos_early = l1.find("note number 10");
            CHECK(pos_late != std::string::npos);
            if (pos_early != std::string::npos) CHECK(pos_late < pos_early);
        }
    }

    SUBCASE("identical palace states give identical L1") {
        PalaceAddress a{"w", "r", {}, {}};
        auto fill = [&](Palace& target) {
            target.remember("first fact about storage", a, DrawerKind::manual, {},
                            "2026-01-01T00:00:00Z");
            target.remember("second fact about billing", a, DrawerKind::manual, {},
                            "2026-01-02T00:00:00Z");
        };
        fill(p);
        Palace::init(dir.sub("q"));
        Palace q = Palace::open(dir.sub("q"));
        fill(q);
        CHECK(build_l1(p) == build_l1(q));
    }
}

TEST_CASE("wakeup") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));

    SUBCASE("empty palace: directive + identity only") {
        auto payload = wakeup(p, "agent smith, build assistant");
        CHECK(payload.l1_text.empty());
        CHECK(payload.l0_text == "agent smith, build assistant");
        CHECK(payload.protocol_directive.find("search before claiming ignorance") !=
              std::string::npos);
        CHECK(payload.token_estimate <= kWakeupCeiling);
        CHECK(payload.token_estimate >= estimate_tokens(payload.protocol_directive));
    }

    SUBCASE("ceiling holds for a populated palace") {
        PalaceAddress a{"w", "r", {}, {}};
        for (int i = 0; i < 120; i++) {
            p.remember("long memory line " + std::to_string(i) +
                           " with plenty of words to spend tokens on during wakeup assembly",
                       a);
        }
        auto payload = wakeup(p, std::string(500, 'i'));  // 125 tokens, under l0_max
        CHECK(payload.token_estimate <= kWakeupCeiling);
        CHECK(!payload.l1_text.empty());
    }

    SUBCASE("oversized identity is rejected with the measured estimate") {
        try {
            wakeup(p, std::string(2000, 'x'));  // 500 tokens > 150
            FAIL("expected invalid-input");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_input);
            CHECK(std::string(e.what()).find("500") != std::string::npos);
        }
    }
}

TEST_CASE("load_topic_context") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));

    SUBCASE("unknown room yields empty string, not an error") {
        CHECK(load_topic_context(p, "nonexistent") == "");
    }

    SUBCASE("budget and determinism") {
        PalaceAddress a{"dev", "deploys", {}, {}};
        for (int i = 0; i < 30; i++) {
            p.remember("deploys note " + std::to_string(i) + " covering the release pipeline", a);
        }
        LayerBudget budget;
        auto ctx = load_topic_context(p, "deploys", budget);
        CHECK(!ctx.empty());
        CHECK(estimate_tokens(ctx) <= budget.l2_per_topic_max);
        CHECK(ctx == load_topic_context(p, "deploys", budget));
    }
}

TEST_CASE("diary") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));

    SUBCASE("unknown agent reads empty") { CHECK(p.diary().read("ghost", 5).empty()); }

    SUBCASE("append three, read last two, chronological order") {
        p.diary().append("researcher", "s1", "first entry");
        p.diary().append("researcher", "s1", "second entry");
        p.diary().append("researcher", "s2", "third entry");
        auto entries = p.diary().read("researcher", 2);
        REQUIRE(entries.size() == 2);
        CHECK(entries[0].text == "second entry");
        CHECK(entries[1].text == "third entry");
    }

    SUBCASE("entries round-trip byte-identical") {
        std::string text = "bytes \xc3\xa9 with\ttabs and \"quotes\"";
        p.diary().append("scribe", "s", text);
        auto entries = p.diary().read("scribe", 1);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].text == text);
    }

    SUBCASE("append-only survives reopen") {
        p.diary().append("keeper", "s", "persisted line");
        Palace q = Palace::open(dir.sub("p"));
        auto entries = q.diary().read("keeper", 10);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].text == "persisted line");
    }

    SUBCASE("invalid agent id rejected") {
        CHECK_THROWS_AS(p.diary().append("Bad Agent", "s", "x"), Error);
    }
}
