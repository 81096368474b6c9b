#include "doctest.h"

#include <random>

#include "palace/dialect.hpp"
#include "palace/error.hpp"

using namespace palace;

namespace {

std::string random_sentence_text(std::mt19937_64& rng, size_t n_sentences) {
    static const std::vector<std::string> words = {
        "deploy",  "gateway", "billing", "invoice", "cluster", "timeout", "review",
        "decided", "urgent",  "pipeline", "storage", "rollout", "replica", "cache"};
    std::string out;
    for (size_t s = 0; s < n_sentences; s++) {
        size_t n = 5 + rng() % 8;
        for (size_t i = 0; i < n; i++) {
            out += words[rng() % words.size()];
            out += (i + 1 == n) ? "" : " ";
        }
        out += ". ";
    }
    return out;
}

AaakRecord random_record(std::mt19937_64& rng) {
    AaakRecord rec;
    auto word = [&](size_t len) {
        std::string w;
        for (size_t i = 0; i < len; i++) w += static_cast<char>('a' + rng() % 26);
        return w;
    };
    for (size_t i = 0; i < rng() % 4; i++) rec.entities.push_back(word(3 + rng() % 6));
    for (size_t i = 0; i < rng() % 5; i++) rec.topics.push_back(word(3 + rng() % 6));
    for (size_t i = 0; i < rng() % 3; i++) {
        std::string s = word(4) + " with | pipe and \" quote and \\ slash " + word(4);
        rec.key_sentences.push_back(s);
    }
    if (rng() % 2) rec.emotions.push_back("positive");
    if (rng() % 2) rec.flags.push_back("todo");
    if (rng() % 2) rec.source_drawer_id = "drawer_w_r_" + word(12);
    return rec;
}

}  // namespace

TEST_CASE("split_sentences") {
    auto s = split_sentences("First point. Second point! Third point?");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == "First point.");
    CHECK(s[1] == "Second point!");
    CHECK(s[2] == "Third point?");

    SUBCASE("abbreviations do not split") {
        auto t = split_sentences("Dr. Smith arrived at 9. We started.");
        REQUIRE(t.size() == 2);
        CHECK(t[0] == "Dr. Smith arrived at 9.");
    }
    SUBCASE("unterminated tail is a sentence") {
        auto t = split_sentences("Complete sentence. trailing fragment");
        REQUIRE(t.size() == 2);
        CHECK(t[1] == "trailing fragment");
    }
    SUBCASE("e.g. stays together") {
        auto t = split_sentences("Use a cache, e.g. redis. Then measure.");
        REQUIRE(t.size() == 2);
    }
}

TEST_CASE("compress basics") {
    SUBCASE("single sentence becomes the sole key sentence") {
        auto rec = compress("the gateway timeout was raised to thirty seconds");
        REQUIRE(rec.key_sentences.size() == 1);
        CHECK(rec.key_sentences[0] == "the gateway timeout was raised to thirty seconds");
    }
    SUBCASE("deterministic") {
        std::string text = "Alpha beta gamma. Delta epsilon zeta. Eta theta iota.";
        CHECK(compress(text) == compress(text));
    }
    SUBCASE("at most five topics, three key sentences") {
        std::mt19937_64 rng(1);
        auto rec = compress(random_sentence_text(rng, 12));
        CHECK(rec.topics.size() <= 5);
        CHECK(rec.key_sentences.size() <= 3);
    }
    SUBCASE("key sentences are verbatim substrings") {
        std::mt19937_64 rng(2);
        for (int i = 0; i < 20; i++) {
            std::string text = random_sentence_text(rng, 3 + rng() % 10);
            auto rec = compress(text);
            for (const auto& s : rec.key_sentences) {
                CHECK(text.find(s) != std::string::npos);
            }
        }
    }
    SUBCASE("emotion and flag keyword matching") {
        auto rec = compress("This is urgent, the deadline moved. We decided to ship.");
        CHECK(std::find(rec.emotions.begin(), rec.emotions.end(), "urgent") != rec.emotions.end());
        CHECK(std::find(rec.flags.begin(), rec.flags.end(), "decision") != rec.flags.end());
        CHECK(std::find(rec.flags.begin(), rec.flags.end(), "question") == rec.flags.end());
    }
    SUBCASE("neutral when nothing matches") {
        auto rec = compress("the cat sat on the mat");
        CHECK(rec.emotions == std::vector<std::string>{"neutral"});
    }
    SUBCASE("question flag from question mark") {
        auto rec = compress("should we rotate the keys?");
        CHECK(std::find(rec.flags.begin(), rec.flags.end(), "question") != rec.flags.end());
    }
    SUBCASE("empty content rejected") { CHECK_THROWS_AS(compress(""), Error); }
}

TEST_CASE("records for sources over 400 chars are strictly smaller") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; i++) {
        std::string text = random_sentence_text(rng, 6 + rng() % 20);
        if (text.size() <= 400) continue;
        auto rec = compress(text);
        CHECK(serialize_aaak(rec).size() < text.size());
    }
    SUBCASE("2000-char input compresses") {
        std::string text;
        while (text.size() < 2000) text += "the billing rollout shipped to the staging cluster. ";
        auto rec = compress(text);
        CHECK(serialize_aaak(rec).size() < text.size());
        CHECK(compression_ratio(text, rec) > 1.0);
    }
}

TEST_CASE("serialize format") {
    SUBCASE("empty record") {
        AaakRecord rec;
        CHECK(serialize_aaak(rec) == "AAAK|E:|T:|K:|M:|F:");
    }
    SUBCASE("full record layout") {
        AaakRecord rec;
        rec.entities = {"a", "b"};
        rec.topics = {"x", "y"};
        rec.key_sentences = {"s1", "s2"};
        rec.emotions = {"positive"};
        rec.flags = {"todo"};
        CHECK(serialize_aaak(rec) == "AAAK|E:a,b|T:x,y|K:\"s1\"|\"s2\"|M:positive|F:todo");
    }
    SUBCASE("pipes in sentences are escaped") {
        AaakRecord rec;
        rec.key_sentences = {"left | right"};
        auto line = serialize_aaak(rec);
        CHECK(line.find("\\|") != std::string::npos);
        CHECK(parse_aaak(line).key_sentences[0] == "left | right");
    }
}

TEST_CASE("parse round-trips serialize for random records") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; i++) {
        AaakRecord rec = random_record(rng);
        AaakRecord back = parse_aaak(serialize_aaak(rec));
        CHECK(back == rec);
    }
    SUBCASE("malformed input is a parse error") {
        CHECK_THROWS_AS(parse_aaak("not an aaak line"), Error);
        CHECK_THROWS_AS(parse_aaak("AAAK|E:|T:|K:unquoted|M:|F:"), Error);
    }
}

TEST_CASE("compression_ratio reports honestly") {
    SUBCASE("tiny inputs may have ratio below 1") {
        auto rec = compress("hi there");
        CHECK(compression_ratio("hi there", rec) < 1.0);
    }
    SUBCASE("repetitive long input compresses above 1") {
        std::string text;
        while (text.size() < 1500) text += "repeated filler material about the deploy pipeline. ";
        auto rec = compress(text);
        CHECK(compression_ratio(text, rec) > 1.0);
    }
}
