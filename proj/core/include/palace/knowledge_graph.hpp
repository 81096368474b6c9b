#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace palace {

struct Entity {
    std::string id;
    std::string name;
    std::string type;
    std::string properties;  // opaque JSON-object string
    std::string created_at;  // ISO-8601
};

// Subject/predicate/object fact with a half-open validity interval
// [valid_from, valid_to). Either bound may be absent (open-ended).
struct Triple {
    std::string id;
    std::string subject;
    std::string predicate;
    std::string object;
    std::optional<std::string> valid_from;
    std::optional<std::string> valid_to;
    double confidence = 1.0;
    std::optional<std::string> source_closet;
    std::optional<std::string> source_file;
    std::string extracted_at;  // ISO-8601
};

// Confidence assigned to heuristic extractions.
constexpr double kHeuristicConfidence = 0.5;

// Heuristic entity extraction: maximal runs of capitalized words (single
// capitalized words are skipped at sentence starts) plus any of the
// configured keyword entities present in the text. First-occurrence order,
// deduplicated.
std::vector<std::string> extract_entities(const std::string& text,
                                          const std::vector<std::string>& keyword_entities = {});

// Embedded temporal triple store over a single SQLite file with two
// tables, `entities` and `triples`. Deduplication is exact-match only on
// (subject, predicate, object, valid_from, valid_to); no contradiction
// detection of any kind. Lookups are single-hop; composing hops is the
// caller's business.
class KnowledgeGraph {
public:
    explicit KnowledgeGraph(const std::string& db_path);
    ~KnowledgeGraph();

    KnowledgeGraph(KnowledgeGraph&&) noexcept;
    KnowledgeGraph& operator=(KnowledgeGraph&&) noexcept;

    // Pure function of the dedup identity tuple.
    static std::string triple_identity(const Triple& t);

    // Inserts unless an identical (subject, predicate, object, valid_from,
    // valid_to) already exists; returns whether a row was added. Throws
    // Error(invalid_input) for confidence outside [0,1] or an inverted
    // interval. t.id and t.extracted_at are filled in when empty.
    bool add_triple(Triple t);

    // All triples with the given subject. With at_time set, only triples
    // whose validity interval contains it: (valid_from absent or <= t) and
    // (valid_to absent or > t).
    std::vector<Triple> query_by_subject(const std::string& subject,
                                         const std::optional<std::string>& at_time = {}) const;

    // Exact, case-sensitive predicate match.
    std::vector<Triple> query_by_predicate(const std::string& predicate) const;

    // Sets the interval end of an existing triple (fact supersession
    // without deletion). Unknown id -> Error(not_found); valid_to earlier
    // than valid_from -> Error(invalid_input).
    void close_validity(const std::string& triple_id, const std::string& valid_to);

    // Inserts the entity if its name is new; returns whether a row was
    // added. Entity id derives from the name.
    bool upsert_entity(const std::string& name, const std::string& type,
                       const std::string& properties = "{}");

    std::vector<Entity> list_entities() const;
    size_t triple_count() const;
    size_t entity_count() const;

    // Triple records as JSON-lines, for fixtures and migration.
    void dump_jsonl(std::ostream& out) const;
    // Replays triples through add_triple (exact dedup applies); returns the
    // number actually added.
    size_t load_jsonl(std::istream& in);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace palace
