#pragma once

#include <string>
#include <vector>

namespace palace {

// Lossy structured summary of one drawer. There is deliberately no
// decompress operation: the original text cannot be reconstructed from a
// record, only pointed at via source_drawer_id.
struct AaakRecord {
    std::vector<std::string> entities;
    std::vector<std::string> topics;         // at most 5
    std::vector<std::string> key_sentences;  // at most 3, verbatim from the source
    std::vector<std::string> emotions;       // from {positive, negative, neutral, urgent}
    std::vector<std::string> flags;          // from {todo, decision, question, fact}
    std::string source_drawer_id;

    bool operator==(const AaakRecord&) const = default;
};

// Sentence split on . ! ? followed by whitespace or end of text, with an
// abbreviation guard; a trailing unterminated segment counts as a sentence.
std::vector<std::string> split_sentences(const std::string& text);

// Deterministic extractive compression: entities via the heuristic
// extractor, topics as top-5 TF terms after stopword removal, key
// sentences as top-3 by TF-sum weighted 1.5x for the opening sentence,
// emotions/flags by keyword matching. For sources over 400 chars the
// serialized record is guaranteed strictly shorter than the source (key
// sentences, then topics and entities, are shed until it fits).
AaakRecord compress(const std::string& content);

// AAAK|E:a,b|T:x,y|K:"s1"|"s2"|M:positive|F:todo
// Sections pipe-delimited, list fields comma-joined, sentences quoted with
// backslash escapes for \ " and |. A non-empty source_drawer_id appends a
// final |S:<id> section.
std::string serialize_aaak(const AaakRecord& record);

// Inverse of serialize_aaak. Throws Error(parse) on malformed input.
AaakRecord parse_aaak(const std::string& line);

// len(content) / len(serialize_aaak(record)); can drop below 1 for tiny
// inputs, which is reported as-is.
double compression_ratio(const std::string& content, const AaakRecord& record);

}  // namespace palace
