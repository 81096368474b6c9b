#include "palace/palace.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <shared_mutex>

#include <nlohmann/json.hpp>

#include "palace/dialect.hpp"
#include "palace/error.hpp"
#include "palace/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace palace {

const std::string& palace_protocol_directive() {
    static const std::string directive =
        "PALACE_PROTOCOL: A persistent memory palace is attached to this session. "
        "Always search before claiming ignorance: when asked about prior work, "
        "decisions, people, or preferences, call recall with specific keywords first, "
        "narrowing by wing or room when known. Store durable new facts with remember. "
        "Retrieved drawer content is verbatim source material; never paraphrase it "
        "when quoting.";
    return directive;
}

namespace {

json drawer_to_json(const Drawer& d) {
    json j;
    j["id"] = d.id;
    j["content"] = d.content;
    j["wing"] = d.address.wing;
    j["room"] = d.address.room;
    if (d.address.hall) j["hall"] = *d.address.hall;
    if (d.address.closet) j["closet"] = *d.address.closet;
    if (d.source_file) j["source_file"] = *d.source_file;
    j["timestamp"] = d.timestamp;
    j["kind"] = to_string(d.kind);
    if (d.session_id) j["session_id"] = *d.session_id;
    if (d.turn_index) j["turn_index"] = *d.turn_index;
    return j;
}

Drawer drawer_from_json(const json& j) {
    Drawer d;
    d.id = j.at("id").get<std::string>();
    d.content = j.at("content").get<std::string>();
    d.address.wing = j.at("wing").get<std::string>();
    d.address.room = j.at("room").get<std::string>();
    if (j.contains("hall")) d.address.hall = j["hall"].get<std::string>();
    if (j.contains("closet")) d.address.closet = j["closet"].get<std::string>();
    if (j.contains("source_file")) d.source_file = j["source_file"].get<std::string>();
    d.timestamp = j.value("timestamp", "");
    d.kind = drawer_kind_from_string(j.value("kind", "manual"));
    if (j.contains("session_id")) d.session_id = j["session_id"].get<std::string>();
    if (j.contains("turn_index")) d.turn_index = j["turn_index"].get<int>();
    return d;
}

std::map<std::string, std::string> metadata_for(const Drawer& d) {
    std::map<std::string, std::string> m;
    m["wing"] = d.address.wing;
    m["room"] = d.address.room;
    if (d.address.hall) m["hall"] = *d.address.hall;
    if (d.address.closet) m["closet"] = *d.address.closet;
    if (d.source_file) m["source_file"] = *d.source_file;
    m["timestamp"] = d.timestamp;
    m["kind"] = to_string(d.kind);
    if (d.session_id) m["session_id"] = *d.session_id;
    if (d.turn_index) m["turn_index"] = std::to_string(*d.turn_index);
    return m;
}

}  // namespace

struct Palace::Impl {
    PalaceConfig config;
    std::unique_ptr<EmbeddingProvider> provider;
    std::optional<VectorIndex> index;
    Bm25Index bm25;
    std::map<std::string, Drawer> drawers;
    std::map<std::string, ClosetEntry> closets;
    std::vector<Tunnel> tunnels;
    std::set<std::pair<std::string, std::string>> tunnel_pairs;
    std::optional<KnowledgeGraph> kg;
    std::optional<DiaryStore> diary;
    std::ofstream drawer_log;
    mutable std::shared_mutex mutex;

    fs::path root() const { return fs::path(config.palace_path); }
    fs::path drawers_path() const { return root() / "drawers.jsonl"; }
    fs::path closets_path() const { return root() / "closets.jsonl"; }
    fs::path tunnels_path() const { return root() / "tunnels.jsonl"; }

    void append_drawer_record(const json& j) {
        drawer_log << j.dump() << "\n";
        drawer_log.flush();
    }

    void append_jsonl(const fs::path& file, const json& j) {
        std::ofstream out(file, std::ios::app);
        if (!out) raise(ErrorKind::io, "cannot append to " + file.string());
        out << j.dump() << "\n";
    }

    void load_drawers() {
        std::ifstream in(drawers_path());
        if (!in) return;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                raise(ErrorKind::parse, "drawer store line " + std::to_string(line_no) + ": " + e.what());
            }
            if (j.contains("op") && j["op"] == "del") {
                drawers.erase(j.at("id").get<std::string>());
            } else {
                Drawer d = drawer_from_json(j);
                drawers[d.id] = std::move(d);
            }
        }
    }

    void load_closets() {
        std::ifstream in(closets_path());
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            ClosetEntry entry;
            entry.closet_id = j.at("closet_id").get<std::string>();
            entry.summary_line = j.at("summary_line").get<std::string>();
            entry.member_drawer_ids = j.at("members").get<std::vector<std::string>>();
            closets[entry.closet_id] = std::move(entry);
        }
    }

    void load_tunnels() {
        std::ifstream in(tunnels_path());
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            Tunnel t{j.at("from").get<std::string>(), j.at("to").get<std::string>(),
                     j.value("label", ""), j.value("created_at", "")};
            auto key = std::make_pair(t.from_drawer_id, t.to_drawer_id);
            if (tunnel_pairs.insert(key).second) tunnels.push_back(std::move(t));
        }
    }

    // Reconcile store and index after a crash or partial write: the drawer
    // store is the source of truth.
    void heal_index() {
        std::vector<std::string> to_remove;
        for (const auto& id : index->ids()) {
            if (!drawers.count(id)) to_remove.push_back(id);
        }
        for (const auto& id : to_remove) index->remove(id);
        for (const auto& [id, d] : drawers) {
            if (!index->contains(id)) {
                index->insert({id, embed_text(*provider, d.content), metadata_for(d)});
            }
        }
    }

    void rebuild_bm25() {
        for (const auto& [id, d] : drawers) bm25.add(id, d.content);
    }

    WhereFilter filter_for(const SearchRequest& req) const {
        WhereFilter f;
        f.wing = req.wing;
        f.room = req.room;
        return f;
    }

    bool drawer_matches(const std::string& id, const WhereFilter& f) const {
        auto it = drawers.find(id);
        if (it == drawers.end()) return false;
        const auto& a = it->second.address;
        if (f.wing && a.wing != *f.wing) return false;
        if (f.room && a.room != *f.room) return false;
        return true;
    }
};

Palace::Palace() : impl_(std::make_unique<Impl>()) {}
Palace::~Palace() {
    if (impl_ && impl_->index) {
        try {
            impl_->index->save_snapshot();
        } catch (...) {
            // best-effort persistence on teardown; the log already has
            // every record
        }
    }
}
Palace::Palace(Palace&&) noexcept = default;
Palace& Palace::operator=(Palace&&) noexcept = default;

bool Palace::exists(const std::string& path) {
    return fs::exists(fs::path(path) / "palace.yaml");
}

void Palace::init(const std::string& path, const PalaceConfig& config) {
    if (exists(path)) raise(ErrorKind::invalid_input, "palace already exists at " + path);
    fs::create_directories(path);
    fs::create_directories(fs::path(path) / "index");
    fs::create_directories(fs::path(path) / "diaries");
    PalaceConfig c = config;
    c.palace_path = path;
    write_config(c);
}

Palace Palace::open(const std::string& path) {
    if (!exists(path)) raise(ErrorKind::not_found, "no palace at " + path + " (missing palace.yaml)");
    Palace p;
    Impl& impl = *p.impl_;
    impl.config = load_config(path);

    if (!impl.config.embedding_provider_url.empty()) {
        impl.provider = std::make_unique<HttpEmbeddingProvider>(impl.config.embedding_provider_url,
                                                                impl.config.embedding_dim);
    } else {
        impl.provider = std::make_unique<BuiltinHashEmbedder>(impl.config.embedding_dim);
    }

    impl.index = VectorIndex::open((impl.root() / "index").string(), impl.config.embedding_dim,
                                   impl.config.distance_metric);
    impl.load_drawers();
    impl.load_closets();
    impl.load_tunnels();
    impl.heal_index();
    impl.rebuild_bm25();
    impl.kg.emplace((impl.root() / "kgraph.db").string());
    impl.diary.emplace((impl.root() / "diaries").string());

    impl.drawer_log.open(impl.drawers_path(), std::ios::app);
    if (!impl.drawer_log) raise(ErrorKind::io, "cannot open drawer store for append");
    return p;
}

const PalaceConfig& Palace::config() const { return impl_->config; }

RememberResult Palace::remember(const std::string& content, const PalaceAddress& address,
                                DrawerKind kind, const std::optional<std::string>& source_file,
                                const std::optional<std::string>& timestamp,
                                const std::optional<std::string>& session_id,
                                std::optional<int> turn_index) {
    if (content.empty()) raise(ErrorKind::invalid_input, "remember: content must be non-empty");
    validate_address(address);

    std::string id = derive_drawer_id(address.wing, address.room, content);

    std::unique_lock lock(impl_->mutex);
    if (impl_->drawers.count(id)) return {id, true};

    Drawer d;
    d.id = id;
    d.content = content;
    d.address = address;
    d.source_file = source_file;
    d.timestamp = timestamp.value_or(util::iso8601_now());
    d.kind = kind;
    d.session_id = session_id;
    d.turn_index = turn_index;

    EmbeddingVector vec = embed_text(*impl_->provider, content);

    impl_->append_drawer_record(drawer_to_json(d));
    impl_->index->insert({id, std::move(vec), metadata_for(d)});
    impl_->bm25.add(id, content);
    for (const auto& name : extract_entities(content, impl_->config.entity_keywords)) {
        impl_->kg->upsert_entity(name, "extracted");
    }
    impl_->drawers[id] = std::move(d);
    return {id, false};
}

bool Palace::forget(const std::string& drawer_id) {
    std::unique_lock lock(impl_->mutex);
    auto it = impl_->drawers.find(drawer_id);
    if (it == impl_->drawers.end()) return false;
    json tomb;
    tomb["op"] = "del";
    tomb["id"] = drawer_id;
    impl_->append_drawer_record(tomb);
    impl_->index->remove(drawer_id);
    impl_->bm25.remove(drawer_id);
    impl_->drawers.erase(it);
    return true;
}

std::optional<Drawer> Palace::get_drawer(const std::string& drawer_id) const {
    std::shared_lock lock(impl_->mutex);
    auto it = impl_->drawers.find(drawer_id);
    if (it == impl_->drawers.end()) return std::nullopt;
    return it->second;
}

size_t Palace::drawer_count() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->drawers.size();
}

std::vector<std::string> Palace::wings() const {
    std::shared_lock lock(impl_->mutex);
    std::set<std::string> wings;
    for (const auto& [id, d] : impl_->drawers) wings.insert(d.address.wing);
    return {wings.begin(), wings.end()};
}

std::vector<std::string> Palace::rooms(const std::optional<std::string>& wing) const {
    std::shared_lock lock(impl_->mutex);
    std::set<std::string> rooms;
    for (const auto& [id, d] : impl_->drawers) {
        if (wing && d.address.wing != *wing) continue;
        rooms.insert(d.address.room);
    }
    return {rooms.begin(), rooms.end()};
}

std::vector<Drawer> Palace::drawers_by_recency() const {
    std::shared_lock lock(impl_->mutex);
    std::vector<Drawer> out;
    out.reserve(impl_->drawers.size());
    for (const auto& [id, d] : impl_->drawers) out.push_back(d);
    std::sort(out.begin(), out.end(), [](const Drawer& a, const Drawer& b) {
        if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
        return a.id < b.id;
    });
    return out;
}

std::vector<std::vector<std::string>> Palace::dedup_groups() const {
    std::shared_lock lock(impl_->mutex);
    std::map<std::string, std::vector<std::string>> by_hash;
    for (const auto& [id, d] : impl_->drawers) {
        by_hash[util::md5_hex(d.content)].push_back(id);
    }
    std::vector<std::vector<std::string>> groups;
    for (auto& [hash, ids] : by_hash) {
        if (ids.size() >= 2) {
            std::sort(ids.begin(), ids.end());
            groups.push_back(std::move(ids));
        }
    }
    return groups;
}

PalaceStatus Palace::status() const {
    std::shared_lock lock(impl_->mutex);
    std::set<std::string> wings;
    std::set<std::pair<std::string, std::string>> rooms;
    for (const auto& [id, d] : impl_->drawers) {
        wings.insert(d.address.wing);
        rooms.insert({d.address.wing, d.address.room});
    }
    return {wings.size(), rooms.size(), impl_->drawers.size(), palace_protocol_directive()};
}

std::vector<SearchResult> Palace::search_memories(const SearchRequest& request) const {
    if (request.query.empty()) raise(ErrorKind::invalid_input, "search: query must be non-empty");
    if (request.n_results < 1) raise(ErrorKind::invalid_input, "search: n_results must be >= 1");
    if (request.max_distance < 0) raise(ErrorKind::invalid_input, "search: max_distance must be >= 0");

    std::shared_lock lock(impl_->mutex);
    WhereFilter filter = impl_->filter_for(request);
    size_t depth = std::max<size_t>(request.n_results * 4, 20);

    std::vector<SearchHit> semantic_hits;
    if (request.mode != SearchMode::keyword) {
        EmbeddingVector qv = embed_text(*impl_->provider, request.query);
        semantic_hits = impl_->index->query_hnsw(qv, depth, filter);
        if (request.max_distance > 0.0) {
            std::erase_if(semantic_hits,
                          [&](const SearchHit& h) { return h.distance > request.max_distance; });
        }
    }

    std::vector<std::pair<std::string, double>> keyword_hits;
    std::vector<std::string> query_terms = util::tokenize_words(request.query);
    if (request.mode != SearchMode::semantic) {
        keyword_hits = impl_->bm25.query(query_terms, depth, [&](const std::string& id) {
            return impl_->drawer_matches(id, filter);
        });
    }

    std::map<std::string, double> distance_of;
    for (const auto& h : semantic_hits) distance_of[h.drawer_id] = h.distance;
    std::map<std::string, double> bm25_of;
    for (const auto& [id, s] : keyword_hits) bm25_of[id] = s;

    // (id, ordering score) in final order
    std::vector<std::pair<std::string, double>> ranked;
    if (request.mode == SearchMode::semantic) {
        for (const auto& h : semantic_hits) ranked.emplace_back(h.drawer_id, -h.distance);
    } else if (request.mode == SearchMode::keyword) {
        ranked = keyword_hits;
    } else {
        // Closets whose summary shares a term with the query boost their
        // members; drawers remain the source of truth.
        std::set<std::string> boosted;
        std::set<std::string> term_set(query_terms.begin(), query_terms.end());
        for (const auto& [cid, closet] : impl_->closets) {
            bool matched = false;
            for (const auto& tok : util::tokenize_words(closet.summary_line)) {
                if (term_set.count(tok)) {
                    matched = true;
                    break;
                }
            }
            if (!matched) continue;
            for (const auto& member : closet.member_drawer_ids) boosted.insert(member);
        }
        std::vector<std::string> semantic_ids;
        semantic_ids.reserve(semantic_hits.size());
        for (const auto& h : semantic_hits) semantic_ids.push_back(h.drawer_id);
        std::vector<std::string> keyword_ids;
        keyword_ids.reserve(keyword_hits.size());
        for (const auto& [id, s] : keyword_hits) keyword_ids.push_back(id);
        ranked = fuse_scores(semantic_ids, keyword_ids, boosted);
    }

    std::vector<SearchResult> results;
    for (const auto& [id, score] : ranked) {
        if (results.size() >= request.n_results) break;
        auto it = impl_->drawers.find(id);
        if (it == impl_->drawers.end()) continue;
        const Drawer& d = it->second;
        SearchResult r;
        r.drawer_id = id;
        r.content = d.content;
        r.address = d.address;
        r.distance = distance_of.count(id) ? distance_of[id] : 0.0;
        r.keyword_score = request.mode == SearchMode::semantic ? 0.0
                          : (bm25_of.count(id) ? bm25_of[id] : 0.0);
        r.fused_score = score;
        bool in_sem = distance_of.count(id) > 0;
        bool in_kw = bm25_of.count(id) > 0;
        r.provenance = in_sem && in_kw ? ResultProvenance::both
                       : in_kw        ? ResultProvenance::keyword
                                      : ResultProvenance::semantic;
        r.session_id = d.session_id;
        results.push_back(std::move(r));
    }
    return results;
}

ClosetEntry Palace::create_closet(const std::string& closet_id,
                                  const std::vector<std::string>& member_drawer_ids) {
    if (!util::is_identifier(closet_id)) {
        raise(ErrorKind::invalid_input, "closet_id must match [a-z0-9_]+: '" + closet_id + "'");
    }
    if (member_drawer_ids.empty()) {
        raise(ErrorKind::invalid_input, "closet must have at least one member drawer");
    }

    std::unique_lock lock(impl_->mutex);
    for (const auto& id : member_drawer_ids) {
        if (!impl_->drawers.count(id)) raise(ErrorKind::not_found, "unknown drawer: " + id);
    }

    // Summary = members' top key sentences, packed into one <= 200 char line.
    std::string summary;
    for (const auto& id : member_drawer_ids) {
        AaakRecord rec = compress(impl_->drawers[id].content);
        if (rec.key_sentences.empty()) continue;
        std::string line = rec.key_sentences[0];
        for (char& c : line) {
            if (c == '\n' || c == '\r') c = ' ';
        }
        if (!summary.empty()) summary += "; ";
        summary += line;
        if (util::utf8_length(summary) >= 200) break;
    }
    summary = util::utf8_substr(summary, 0, 200);

    ClosetEntry entry{closet_id, summary, member_drawer_ids};
    impl_->closets[closet_id] = entry;
    json j;
    j["closet_id"] = entry.closet_id;
    j["summary_line"] = entry.summary_line;
    j["members"] = entry.member_drawer_ids;
    impl_->append_jsonl(impl_->closets_path(), j);

    // Mark members; their ids never change (id covers wing/room/content only).
    for (const auto& id : member_drawer_ids) {
        Drawer& d = impl_->drawers[id];
        d.address.closet = closet_id;
        impl_->append_drawer_record(drawer_to_json(d));
        impl_->index->update_metadata(id, metadata_for(d));
    }
    return entry;
}

std::vector<ClosetEntry> Palace::closets() const {
    std::shared_lock lock(impl_->mutex);
    std::vector<ClosetEntry> out;
    out.reserve(impl_->closets.size());
    for (const auto& [id, c] : impl_->closets) out.push_back(c);
    return out;
}

bool Palace::add_tunnel(const std::string& from_drawer_id, const std::string& to_drawer_id,
                        const std::string& label) {
    if (from_drawer_id == to_drawer_id) {
        raise(ErrorKind::invalid_input, "tunnel endpoints must differ");
    }
    std::unique_lock lock(impl_->mutex);
    if (!impl_->drawers.count(from_drawer_id)) {
        raise(ErrorKind::not_found, "unknown drawer: " + from_drawer_id);
    }
    if (!impl_->drawers.count(to_drawer_id)) {
        raise(ErrorKind::not_found, "unknown drawer: " + to_drawer_id);
    }
    auto key = std::make_pair(from_drawer_id, to_drawer_id);
    if (!impl_->tunnel_pairs.insert(key).second) return false;

    Tunnel t{from_drawer_id, to_drawer_id, label, util::iso8601_now()};
    impl_->tunnels.push_back(t);
    json j;
    j["from"] = t.from_drawer_id;
    j["to"] = t.to_drawer_id;
    j["label"] = t.label;
    j["created_at"] = t.created_at;
    impl_->append_jsonl(impl_->tunnels_path(), j);
    return true;
}

std::vector<Drawer> Palace::follow_tunnels(const std::string& drawer_id) const {
    std::shared_lock lock(impl_->mutex);
    if (!impl_->drawers.count(drawer_id)) {
        raise(ErrorKind::not_found, "unknown drawer: " + drawer_id);
    }
    std::set<std::string> neighbor_ids;
    for (const auto& t : impl_->tunnels) {
        if (t.from_drawer_id == drawer_id) neighbor_ids.insert(t.to_drawer_id);
        if (t.to_drawer_id == drawer_id) neighbor_ids.insert(t.from_drawer_id);
    }
    std::vector<Drawer> out;
    for (const auto& id : neighbor_ids) {
        auto it = impl_->drawers.find(id);
        if (it != impl_->drawers.end()) out.push_back(it->second);
    }
    return out;
}

std::vector<Tunnel> Palace::tunnels() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->tunnels;
}

KnowledgeGraph& Palace::kg() { return *impl_->kg; }
const KnowledgeGraph& Palace::kg() const { return *impl_->kg; }
DiaryStore& Palace::diary() { return *impl_->diary; }
const DiaryStore& Palace::diary() const { return *impl_->diary; }
VectorIndex& Palace::index() { return *impl_->index; }
const VectorIndex& Palace::index() const { return *impl_->index; }
EmbeddingProvider& Palace::embedder() const { return *impl_->provider; }

void Palace::save() {
    if (impl_->index) impl_->index->save_snapshot();
}

}  // namespace palace
