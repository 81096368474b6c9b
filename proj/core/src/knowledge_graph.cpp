#include "palace/knowledge_graph.hpp"

#include <sqlite3.h>

#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace palace {

namespace {

using nlohmann::json;

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}

struct RawToken {
    std::string text;
    bool sentence_start = false;
};

std::vector<RawToken> raw_tokens(const std::string& text) {
    std::vector<RawToken> tokens;
    bool at_sentence_start = true;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (is_word_char(c)) {
            size_t j = i;
            while (j < text.size() && is_word_char(text[j])) j++;
            tokens.push_back({text.substr(i, j - i), at_sentence_start});
            at_sentence_start = false;
            i = j;
        } else {
            if (c == '.' || c == '!' || c == '?' || c == '\n') at_sentence_start = true;
            i++;
        }
    }
    return tokens;
}

// Capitalized sentence openers that are grammar, not names. A run like
// "Then Grace" sheds the opener and keeps "Grace".
bool is_sentence_starter(const std::string& word) {
    static const std::set<std::string> starters = {
        "the",   "a",     "an",    "this",  "that",   "these", "those",  "it",    "i",
        "we",    "you",   "he",    "she",   "they",   "my",    "our",    "your",  "his",
        "her",   "their", "but",   "and",   "or",     "so",    "if",     "as",    "at",
        "on",    "in",    "to",    "for",   "with",   "from",  "by",     "then",  "there",
        "here",  "when",  "where", "after", "before", "later", "also",   "yes",   "no",
        "not",   "do",    "does",  "did",   "is",     "are",   "was",    "were",  "be",
        "note",  "see",   "first", "next",  "now",    "once",  "please", "let",   "how",
        "what",  "why",   "who",   "which", "while",  "still", "just",   "even",  "thus",
        "today", "use",   "using", "however",
    };
    return starters.count(util::to_lower(word)) > 0;
}

}  // namespace

std::vector<std::string> extract_entities(const std::string& text,
                                          const std::vector<std::string>& keyword_entities) {
    std::vector<std::string> out;
    auto push_unique = [&](const std::string& name) {
        for (const auto& e : out) {
            if (e == name) return;
        }
        out.push_back(name);
    };

    auto tokens = raw_tokens(text);
    size_t i = 0;
    while (i < tokens.size()) {
        if (!tokens[i].text.empty() && is_upper(tokens[i].text[0])) {
            size_t j = i;
            while (j < tokens.size() && !tokens[j].text.empty() && is_upper(tokens[j].text[0])) j++;
            // Shed a sentence-opening grammar word from the front of the run.
            if (tokens[i].sentence_start && is_sentence_starter(tokens[i].text)) i++;
            size_t run = j - i;
            // A lone capitalized word at a sentence start is almost always
            // just capitalization, not a name.
            if (run >= 2 || (run == 1 && !tokens[i].sentence_start)) {
                std::string name = tokens[i].text;
                for (size_t k = i + 1; k < j; k++) name += " " + tokens[k].text;
                push_unique(name);
            }
            i = j;
        } else {
            i++;
        }
    }

    if (!keyword_entities.empty()) {
        auto words = util::tokenize_words(text);
        for (const auto& kw : keyword_entities) {
            auto kw_words = util::tokenize_words(kw);
            if (kw_words.empty()) continue;
            for (size_t s = 0; s + kw_words.size() <= words.size(); s++) {
                bool match = true;
                for (size_t k = 0; k < kw_words.size(); k++) {
                    if (words[s + k] != kw_words[k]) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    push_unique(kw);
                    break;
                }
            }
        }
    }
    return out;
}

struct KnowledgeGraph::Impl {
    sqlite3* db = nullptr;
    mutable std::mutex mutex;

    ~Impl() {
        if (db) sqlite3_close(db);
    }

    void exec(const char* sql) {
        char* err = nullptr;
        if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            std::string msg = err ? err : "unknown sqlite error";
            sqlite3_free(err);
            raise(ErrorKind::io, "kgraph: " + msg);
        }
    }

    sqlite3_stmt* prepare(const std::string& sql) const {
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
            raise(ErrorKind::io, std::string("kgraph prepare: ") + sqlite3_errmsg(db));
        }
        return stmt;
    }

    static void bind_text(sqlite3_stmt* stmt, int idx, const std::string& v) {
        sqlite3_bind_text(stmt, idx, v.c_str(), -1, SQLITE_TRANSIENT);
    }

    static void bind_opt(sqlite3_stmt* stmt, int idx, const std::optional<std::string>& v) {
        if (v) bind_text(stmt, idx, *v);
        else sqlite3_bind_null(stmt, idx);
    }

    static std::optional<std::string> col_opt(sqlite3_stmt* stmt, int idx) {
        if (sqlite3_column_type(stmt, idx) == SQLITE_NULL) return std::nullopt;
        return std::string(reinterpret_cast<const char*>(sqlite3_column_text(stmt, idx)));
    }

    static std::string col_text(sqlite3_stmt* stmt, int idx) {
        const unsigned char* p = sqlite3_column_text(stmt, idx);
        return p ? reinterpret_cast<const char*>(p) : "";
    }

    static Triple row_to_triple(sqlite3_stmt* stmt) {
        Triple t;
        t.id = col_text(stmt, 0);
        t.subject = col_text(stmt, 1);
        t.predicate = col_text(stmt, 2);
        t.object = col_text(stmt, 3);
        t.valid_from = col_opt(stmt, 4);
        t.valid_to = col_opt(stmt, 5);
        t.confidence = sqlite3_column_double(stmt, 6);
        t.source_closet = col_opt(stmt, 7);
        t.source_file = col_opt(stmt, 8);
        t.extracted_at = col_text(stmt, 9);
        return t;
    }

    std::vector<Triple> select(const std::string& sql,
                               const std::vector<std::optional<std::string>>& binds) const {
        sqlite3_stmt* stmt = prepare(sql);
        for (size_t i = 0; i < binds.size(); i++) {
            bind_opt(stmt, static_cast<int>(i) + 1, binds[i]);
        }
        std::vector<Triple> out;
        while (sqlite3_step(stmt) == SQLITE_ROW) out.push_back(row_to_triple(stmt));
        sqlite3_finalize(stmt);
        return out;
    }
};

static const char* kSelectCols =
    "id, subject, predicate, object, valid_from, valid_to, confidence, "
    "source_closet, source_file, extracted_at";

KnowledgeGraph::KnowledgeGraph(const std::string& db_path) : impl_(std::make_unique<Impl>()) {
    if (sqlite3_open(db_path.c_str(), &impl_->db) != SQLITE_OK) {
        raise(ErrorKind::io, "cannot open knowledge graph at " + db_path);
    }
    impl_->exec(
        "CREATE TABLE IF NOT EXISTS entities ("
        "    id TEXT PRIMARY KEY, name TEXT, type TEXT,"
        "    properties TEXT, created_at TEXT"
        ");"
        "CREATE TABLE IF NOT EXISTS triples ("
        "    id TEXT PRIMARY KEY, subject TEXT, predicate TEXT, object TEXT,"
        "    valid_from TEXT, valid_to TEXT, confidence REAL,"
        "    source_closet TEXT, source_file TEXT, extracted_at TEXT"
        ");"
        "CREATE INDEX IF NOT EXISTS idx_triples_subject ON triples(subject);"
        "CREATE INDEX IF NOT EXISTS idx_triples_predicate ON triples(predicate);");
}

KnowledgeGraph::~KnowledgeGraph() = default;
KnowledgeGraph::KnowledgeGraph(KnowledgeGraph&&) noexcept = default;
KnowledgeGraph& KnowledgeGraph::operator=(KnowledgeGraph&&) noexcept = default;

std::string KnowledgeGraph::triple_identity(const Triple& t) {
    // \x1f separates fields; a presence marker keeps absent and empty
    // bounds distinct.
    std::string key = t.subject;
    key += '\x1f';
    key += t.predicate;
    key += '\x1f';
    key += t.object;
    key += '\x1f';
    key += t.valid_from ? "1" + *t.valid_from : std::string("0");
    key += '\x1f';
    key += t.valid_to ? "1" + *t.valid_to : std::string("0");
    return "triple_" + util::md5_hex(key).substr(0, 16);
}

bool KnowledgeGraph::add_triple(Triple t) {
    if (t.confidence < 0.0 || t.confidence > 1.0) {
        raise(ErrorKind::invalid_input,
              "triple confidence must be in [0,1], got " + std::to_string(t.confidence));
    }
    if (t.valid_from && t.valid_to && *t.valid_to < *t.valid_from) {
        raise(ErrorKind::invalid_input, "triple validity interval is inverted");
    }
    if (t.subject.empty() || t.predicate.empty()) {
        raise(ErrorKind::invalid_input, "triple subject and predicate must be non-empty");
    }
    t.id = triple_identity(t);
    if (t.extracted_at.empty()) t.extracted_at = util::iso8601_now();

    std::lock_guard lock(impl_->mutex);
    sqlite3_stmt* stmt = impl_->prepare(
        "INSERT OR IGNORE INTO triples (id, subject, predicate, object, valid_from, valid_to,"
        " confidence, source_closet, source_file, extracted_at)"
        " VALUES (?,?,?,?,?,?,?,?,?,?)");
    Impl::bind_text(stmt, 1, t.id);
    Impl::bind_text(stmt, 2, t.subject);
    Impl::bind_text(stmt, 3, t.predicate);
    Impl::bind_text(stmt, 4, t.object);
    Impl::bind_opt(stmt, 5, t.valid_from);
    Impl::bind_opt(stmt, 6, t.valid_to);
    sqlite3_bind_double(stmt, 7, t.confidence);
    Impl::bind_opt(stmt, 8, t.source_closet);
    Impl::bind_opt(stmt, 9, t.source_file);
    Impl::bind_text(stmt, 10, t.extracted_at);
    int rc = sqlite3_step(stmt);
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE) raise(ErrorKind::io, "kgraph insert failed");
    return sqlite3_changes(impl_->db) > 0;
}

std::vector<Triple> KnowledgeGraph::query_by_subject(
    const std::string& subject, const std::optional<std::string>& at_time) const {
    std::lock_guard lock(impl_->mutex);
    if (!at_time) {
        return impl_->select(std::string("SELECT ") + kSelectCols +
                                 " FROM triples WHERE subject = ? ORDER BY id",
                             {subject});
    }
    return impl_->select(std::string("SELECT ") + kSelectCols +
                             " FROM triples WHERE subject = ?"
                             " AND (valid_from IS NULL OR valid_from <= ?)"
                             " AND (valid_to IS NULL OR valid_to > ?)"
                             " ORDER BY id",
                         {subject, *at_time, *at_time});
}

std::vector<Triple> KnowledgeGraph::query_by_predicate(const std::string& predicate) const {
    std::lock_guard lock(impl_->mutex);
    return impl_->select(std::string("SELECT ") + kSelectCols +
                             " FROM triples WHERE predicate = ? ORDER BY id",
                         {predicate});
}

void KnowledgeGraph::close_validity(const std::string& triple_id, const std::string& valid_to) {
    std::lock_guard lock(impl_->mutex);
    auto rows = impl_->select(
        std::string("SELECT ") + kSelectCols + " FROM triples WHERE id = ?", {triple_id});
    if (rows.empty()) raise(ErrorKind::not_found, "unknown triple id: " + triple_id);
    if (rows[0].valid_from && valid_to < *rows[0].valid_from) {
        raise(ErrorKind::invalid_input, "valid_to precedes valid_from");
    }
    sqlite3_stmt* stmt = impl_->prepare("UPDATE triples SET valid_to = ? WHERE id = ?");
    Impl::bind_text(stmt, 1, valid_to);
    Impl::bind_text(stmt, 2, triple_id);
    int rc = sqlite3_step(stmt);
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE) raise(ErrorKind::io, "kgraph update failed");
}

bool KnowledgeGraph::upsert_entity(const std::string& name, const std::string& type,
                                   const std::string& properties) {
    if (name.empty()) raise(ErrorKind::invalid_input, "entity name must be non-empty");
    std::lock_guard lock(impl_->mutex);
    sqlite3_stmt* stmt = impl_->prepare(
        "INSERT OR IGNORE INTO entities (id, name, type, properties, created_at)"
        " VALUES (?,?,?,?,?)");
    std::string id = "entity_" + util::md5_hex(name).substr(0, 16);
    Impl::bind_text(stmt, 1, id);
    Impl::bind_text(stmt, 2, name);
    Impl::bind_text(stmt, 3, type);
    Impl::bind_text(stmt, 4, properties);
    Impl::bind_text(stmt, 5, util::iso8601_now());
    int rc = sqlite3_step(stmt);
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE) raise(ErrorKind::io, "kgraph entity insert failed");
    return sqlite3_changes(impl_->db) > 0;
}

std::vector<Entity> KnowledgeGraph::list_entities() const {
    std::lock_guard lock(impl_->mutex);
    sqlite3_stmt* stmt =
        impl_->prepare("SELECT id, name, type, properties, created_at FROM entities ORDER BY name");
    std::vector<Entity> out;
    while (sqlite3_step(stmt) == SQLITE_ROW) {
        Entity e;
        e.id = Impl::col_text(stmt, 0);
        e.name = Impl::col_text(stmt, 1);
        e.type = Impl::col_text(stmt, 2);
        e.properties = Impl::col_text(stmt, 3);
        e.created_at = Impl::col_text(stmt, 4);
        out.push_back(std::move(e));
    }
    sqlite3_finalize(stmt);
    return out;
}

size_t KnowledgeGraph::triple_count() const {
    std::lock_guard lock(impl_->mutex);
    sqlite3_stmt* stmt = impl_->prepare("SELECT COUNT(*) FROM triples");
    size_t n = 0;
    if (sqlite3_step(stmt) == SQLITE_ROW) n = static_cast<size_t>(sqlite3_column_int64(stmt, 0));
    sqlite3_finalize(stmt);
    return n;
}

size_t KnowledgeGraph::entity_count() const {
    std::lock_guard lock(impl_->mutex);
    sqlite3_stmt* stmt = impl_->prepare("SELECT COUNT(*) FROM entities");
    size_t n = 0;
    if (sqlite3_step(stmt) == SQLITE_ROW) n = static_cast<size_t>(sqlite3_column_int64(stmt, 0));
    sqlite3_finalize(stmt);
    return n;
}

void KnowledgeGraph::dump_jsonl(std::ostream& out) const {
    std::vector<Triple> all;
    {
        std::lock_guard lock(impl_->mutex);
        all = impl_->select(std::string("SELECT ") + kSelectCols + " FROM triples ORDER BY id", {});
    }
    for (const Triple& t : all) {
        json j;
        j["id"] = t.id;
        j["subject"] = t.subject;
        j["predicate"] = t.predicate;
        j["object"] = t.object;
        j["valid_from"] = t.valid_from ? json(*t.valid_from) : json(nullptr);
        j["valid_to"] = t.valid_to ? json(*t.valid_to) : json(nullptr);
        j["confidence"] = t.confidence;
        j["source_closet"] = t.source_closet ? json(*t.source_closet) : json(nullptr);
        j["source_file"] = t.source_file ? json(*t.source_file) : json(nullptr);
        j["extracted_at"] = t.extracted_at;
        out << j.dump() << "\n";
    }
}

size_t KnowledgeGraph::load_jsonl(std::istream& in) {
    size_t added = 0;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            raise(ErrorKind::parse,
                  "kgraph load: bad JSON on line " + std::to_string(line_no) + ": " + e.what());
        }
        Triple t;
        t.subject = j.value("subject", "");
        t.predicate = j.value("predicate", "");
        t.object = j.value("object", "");
        if (j.contains("valid_from") && !j["valid_from"].is_null())
            t.valid_from = j["valid_from"].get<std::string>();
        if (j.contains("valid_to") && !j["valid_to"].is_null())
            t.valid_to = j["valid_to"].get<std::string>();
        t.confidence = j.value("confidence", 1.0);
        if (j.contains("source_closet") && !j["source_closet"].is_null())
            t.source_closet = j["source_closet"].get<std::string>();
        if (j.contains("source_file") && !j["source_file"].is_null())
            t.source_file = j["source_file"].get<std::string>();
        t.extracted_at = j.value("extracted_at", "");
        if (add_triple(std::move(t))) added++;
    }
    return added;
}

}  // namespace palace
