#include "palace/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "palace/error.hpp"

namespace fs = std::filesystem;

namespace palace {

bool WhereFilter::matches(const std::map<std::string, std::string>& metadata) const {
    auto field_is = [&](const char* key, const std::optional<std::string>& want) {
        if (!want) return true;
        auto it = metadata.find(key);
        return it != metadata.end() && it->second == *want;
    };
    return field_is("wing", wing) && field_is("room", room) && field_is("hall", hall);
}

namespace {

constexpr uint32_t kSnapshotMagic = 0x50534E31;  // "PSN1"
constexpr uint32_t kLogMagic = 0x504C4731;       // "PLG1"
constexpr uint32_t kFormatVersion = 1;
constexpr int kMaxLevelCap = 32;

// (distance, slot) with deterministic tie-breaking on slot.
using DistSlot = std::pair<double, uint32_t>;

void write_u8(std::ostream& out, uint8_t v) { out.put(static_cast<char>(v)); }
void write_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void write_i32(std::ostream& out, int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_vec(std::ostream& out, const std::vector<float>& v) {
    write_u32(out, static_cast<uint32_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
}

void write_meta(std::ostream& out, const std::map<std::string, std::string>& m) {
    write_u32(out, static_cast<uint32_t>(m.size()));
    for (const auto& [k, v] : m) {
        write_str(out, k);
        write_str(out, v);
    }
}

bool read_u8(std::istream& in, uint8_t& v) {
    int c = in.get();
    if (c == EOF) return false;
    v = static_cast<uint8_t>(c);
    return true;
}
bool read_u32(std::istream& in, uint32_t& v) { return bool(in.read(reinterpret_cast<char*>(&v), 4)); }
bool read_u64(std::istream& in, uint64_t& v) { return bool(in.read(reinterpret_cast<char*>(&v), 8)); }
bool read_i32(std::istream& in, int32_t& v) { return bool(in.read(reinterpret_cast<char*>(&v), 4)); }

bool read_str(std::istream& in, std::string& s) {
    uint32_t n = 0;
    if (!read_u32(in, n)) return false;
    s.resize(n);
    return bool(in.read(s.data(), n));
}

bool read_vec(std::istream& in, std::vector<float>& v) {
    uint32_t n = 0;
    if (!read_u32(in, n)) return false;
    v.resize(n);
    return bool(in.read(reinterpret_cast<char*>(v.data()),
                        static_cast<std::streamsize>(n * sizeof(float))));
}

bool read_meta(std::istream& in, std::map<std::string, std::string>& m) {
    uint32_t n = 0;
    if (!read_u32(in, n)) return false;
    m.clear();
    for (uint32_t i = 0; i < n; i++) {
        std::string k, v;
        if (!read_str(in, k) || !read_str(in, v)) return false;
        m[std::move(k)] = std::move(v);
    }
    return true;
}

}  // namespace

struct VectorIndex::Impl {
    struct Node {
        std::string id;
        std::vector<float> vec;
        double norm = 1.0;
        std::map<std::string, std::string> meta;
        bool deleted = false;
        int level = 0;
        std::vector<std::vector<uint32_t>> links;  // per layer 0..level
    };

    size_t dim;
    DistanceMetric metric;
    HnswParams params;
    double level_mult;

    std::vector<Node> nodes;
    std::unordered_map<std::string, uint32_t> slot_of;  // live ids only
    uint32_t entry = UINT32_MAX;
    int max_level = -1;
    size_t tombstones = 0;
    std::mt19937_64 rng;

    // persistence
    std::string dir;  // empty = in-memory only
    std::ofstream log;
    size_t log_records = 0;

    mutable std::shared_mutex mutex;

    Impl(size_t d, DistanceMetric m, HnswParams p)
        : dim(d), metric(m), params(p),
          level_mult(1.0 / std::log(static_cast<double>(std::max<size_t>(p.M, 2)))),
          rng(p.seed) {
        if (params.M < 2) raise(ErrorKind::invalid_input, "HnswParams.M must be >= 2");
    }

    // Stored vectors are unit-normalized at write time, so both metrics are
    // computed from one dot product: cosine as 1 - sim, l2 as the Euclidean
    // distance between the normalized representatives, sqrt(2 - 2 sim).
    // That makes cosine and l2 rankings identical by construction, ties
    // included, instead of letting float-level norm noise break ties
    // differently per metric.
    double distance(std::span<const float> q, double q_norm, const Node& n) const {
        double dot = 0.0;
        for (size_t i = 0; i < dim; i++) {
            dot += static_cast<double>(q[i]) * static_cast<double>(n.vec[i]);
        }
        double denom = q_norm * n.norm;
        double sim = denom == 0.0 ? -1.0 : dot / denom;
        if (metric == DistanceMetric::cosine) return 1.0 - sim;
        return std::sqrt(std::max(0.0, 2.0 - 2.0 * sim));
    }

    int sample_level() {
        // Standard HNSW exponential level sampling with the seeded RNG.
        double u = (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
        int level = static_cast<int>(std::floor(-std::log(u) * level_mult));
        return std::min(level, kMaxLevelCap);
    }

    uint32_t greedy_descend(std::span<const float> q, double q_norm, uint32_t ep, int lc) const {
        double best = distance(q, q_norm, nodes[ep]);
        bool improved = true;
        while (improved) {
            improved = false;
            for (uint32_t n : nodes[ep].links[static_cast<size_t>(lc)]) {
                double d = distance(q, q_norm, nodes[n]);
                if (d < best) {
                    best = d;
                    ep = n;
                    improved = true;
                }
            }
        }
        return ep;
    }

    // Beam search within one layer. Tombstoned nodes stay routable; they are
    // kept out of the result set unless include_deleted (construction needs
    // them as link candidates to keep the graph connected).
    std::vector<DistSlot> search_layer(std::span<const float> q, double q_norm,
                                       const std::vector<uint32_t>& eps, size_t ef, int lc,
                                       bool include_deleted) const {
        std::priority_queue<DistSlot, std::vector<DistSlot>, std::greater<>> candidates;
        std::priority_queue<DistSlot> result;  // max-heap, size <= ef
        std::vector<char> visited(nodes.size(), 0);

        for (uint32_t ep : eps) {
            if (visited[ep]) continue;
            visited[ep] = 1;
            double d = distance(q, q_norm, nodes[ep]);
            candidates.emplace(d, ep);
            if (include_deleted || !nodes[ep].deleted) result.emplace(d, ep);
        }

        while (!candidates.empty()) {
            auto [cd, c] = candidates.top();
            candidates.pop();
            if (result.size() >= ef && cd > result.top().first) break;
            for (uint32_t n : nodes[c].links[static_cast<size_t>(lc)]) {
                if (visited[n]) continue;
                visited[n] = 1;
                double d = distance(q, q_norm, nodes[n]);
                if (result.size() < ef || d < result.top().first ||
                    (d == result.top().first && n < result.top().second)) {
                    candidates.emplace(d, n);
                    if (include_deleted || !nodes[n].deleted) {
                        result.emplace(d, n);
                        if (result.size() > ef) result.pop();
                    }
                }
            }
        }

        std::vector<DistSlot> out(result.size());
        for (size_t i = result.size(); i-- > 0;) {
            out[i] = result.top();
            result.pop();
        }
        return out;
    }

    // Heuristic neighbor selection: keep a candidate only if it is closer
    // to q than to every already selected neighbor (spreads links across
    // directions), then fill any remaining slots with the closest pruned
    // candidates so sparse regions keep their connectivity.
    std::vector<uint32_t> select_neighbors(std::span<const float> q, double q_norm,
                                           std::vector<DistSlot> candidates, size_t m) const {
        (void)q;
        (void)q_norm;
        std::sort(candidates.begin(), candidates.end());
        std::vector<uint32_t> selected;
        std::vector<uint32_t> pruned;
        selected.reserve(m);
        for (const auto& [d, c] : candidates) {
            if (selected.size() >= m) break;
            bool keep = true;
            for (uint32_t s : selected) {
                const Node& cn = nodes[c];
                double d_cs = distance(std::span<const float>(cn.vec.data(), cn.vec.size()),
                                       cn.norm, nodes[s]);
                if (d_cs < d) {
                    keep = false;
                    break;
                }
            }
            if (keep) selected.push_back(c);
            else pruned.push_back(c);
        }
        for (uint32_t c : pruned) {
            if (selected.size() >= m) break;
            selected.push_back(c);
        }
        return selected;
    }

    void shrink_links(uint32_t slot, int lc) {
        size_t m_max = (lc == 0) ? params.M * 2 : params.M;
        auto& links = nodes[slot].links[static_cast<size_t>(lc)];
        if (links.size() <= m_max) return;
        const Node& node = nodes[slot];
        std::span<const float> v(node.vec.data(), node.vec.size());
        std::vector<DistSlot> candidates;
        candidates.reserve(links.size());
        for (uint32_t n : links) candidates.emplace_back(distance(v, node.norm, nodes[n]), n);
        links = select_neighbors(v, node.norm, std::move(candidates), m_max);
    }

    void insert_into_graph(uint32_t slot) {
        Node& node = nodes[slot];
        std::span<const float> v(node.vec.data(), node.vec.size());
        int level = node.level;

        if (entry == UINT32_MAX) {
            entry = slot;
            max_level = level;
            return;
        }

        uint32_t ep = entry;
        for (int lc = max_level; lc > level; lc--) {
            ep = greedy_descend(v, node.norm, ep, lc);
        }

        std::vector<uint32_t> eps{ep};
        for (int lc = std::min(level, max_level); lc >= 0; lc--) {
            auto w = search_layer(v, node.norm, eps, params.ef_construction, lc, true);
            auto neighbors = select_neighbors(v, node.norm, w, params.M);
            for (uint32_t n : neighbors) {
                nodes[slot].links[static_cast<size_t>(lc)].push_back(n);
                nodes[n].links[static_cast<size_t>(lc)].push_back(slot);
                shrink_links(n, lc);
            }
            eps.clear();
            eps.reserve(w.size());
            for (const auto& [d, s] : w) eps.push_back(s);
        }

        if (level > max_level) {
            entry = slot;
            max_level = level;
        }
    }

    void do_insert(const IndexedDrawer& item, bool log_it) {
        if (item.vector.size() != dim) {
            raise(ErrorKind::invalid_input,
                  "insert: vector dimension " + std::to_string(item.vector.size()) +
                      " does not match index dimension " + std::to_string(dim));
        }
        if (slot_of.count(item.drawer_id)) return;  // live duplicate: no-op

        Node node;
        node.id = item.drawer_id;
        node.vec = item.vector;
        node.norm = vector_norm(item.vector);
        node.meta = item.metadata;
        node.level = sample_level();
        node.links.resize(static_cast<size_t>(node.level) + 1);

        uint32_t slot = static_cast<uint32_t>(nodes.size());
        nodes.push_back(std::move(node));
        slot_of[item.drawer_id] = slot;
        insert_into_graph(slot);

        if (log_it && log.is_open()) {
            write_u8(log, 1);
            write_str(log, item.drawer_id);
            write_vec(log, item.vector);
            write_meta(log, item.metadata);
            log.flush();
            log_records++;
        }
    }

    bool do_remove(const std::string& id, bool log_it) {
        auto it = slot_of.find(id);
        if (it == slot_of.end()) return false;
        nodes[it->second].deleted = true;
        slot_of.erase(it);
        tombstones++;

        if (log_it && log.is_open()) {
            write_u8(log, 2);
            write_str(log, id);
            log.flush();
            log_records++;
        }

        if (!nodes.empty() && tombstones * 4 > nodes.size()) rebuild();
        return true;
    }

    void do_update_metadata(const std::string& id, std::map<std::string, std::string> meta,
                            bool log_it) {
        auto it = slot_of.find(id);
        if (it == slot_of.end()) raise(ErrorKind::not_found, "update_metadata: unknown drawer " + id);
        nodes[it->second].meta = meta;

        if (log_it && log.is_open()) {
            write_u8(log, 3);
            write_str(log, id);
            write_meta(log, meta);
            log.flush();
            log_records++;
        }
    }

    // Drops tombstones by rebuilding the graph from live nodes in slot
    // order. The RNG keeps advancing, so results stay deterministic for a
    // fixed operation sequence.
    void rebuild() {
        std::vector<Node> old = std::move(nodes);
        nodes.clear();
        slot_of.clear();
        entry = UINT32_MAX;
        max_level = -1;
        tombstones = 0;
        for (auto& n : old) {
            if (n.deleted) continue;
            IndexedDrawer item{n.id, std::move(n.vec), std::move(n.meta)};
            do_insert(item, false);
        }
    }

    std::vector<SearchHit> finalize(std::vector<std::pair<double, uint32_t>> scored,
                                    size_t k) const {
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return nodes[a.second].id < nodes[b.second].id;
        });
        if (scored.size() > k) scored.resize(k);
        std::vector<SearchHit> out;
        out.reserve(scored.size());
        for (const auto& [d, s] : scored) out.push_back({nodes[s].id, d});
        return out;
    }

    std::vector<SearchHit> exact(std::span<const float> q, size_t k, const WhereFilter& filter) const {
        double q_norm = vector_norm(q);
        std::vector<std::pair<double, uint32_t>> scored;
        for (uint32_t s = 0; s < nodes.size(); s++) {
            const Node& n = nodes[s];
            if (n.deleted) continue;
            if (!filter.matches(n.meta)) continue;
            scored.emplace_back(distance(q, q_norm, n), s);
        }
        return finalize(std::move(scored), k);
    }

    std::vector<SearchHit> approx(std::span<const float> q, size_t k, const WhereFilter& filter,
                                  size_t ef) const {
        if (entry == UINT32_MAX || slot_of.empty()) return {};
        double q_norm = vector_norm(q);

        size_t base_ef = std::max(ef == 0 ? params.ef_search : ef, k);
        size_t ef_cur = base_ef;
        for (;;) {
            uint32_t ep = entry;
            for (int lc = max_level; lc >= 1; lc--) ep = greedy_descend(q, q_norm, ep, lc);
            auto w = search_layer(q, q_norm, {ep}, ef_cur, 0, false);

            std::vector<std::pair<double, uint32_t>> filtered;
            filtered.reserve(w.size());
            for (const auto& [d, s] : w) {
                if (filter.matches(nodes[s].meta)) filtered.emplace_back(d, s);
            }

            bool exhausted = w.size() < ef_cur;  // beam covered everything reachable
            if (filtered.size() >= k || ef_cur >= base_ef * 8 || exhausted) {
                return finalize(std::move(filtered), k);
            }
            ef_cur *= 2;
        }
    }

    // -- persistence ---------------------------------------------------

    fs::path snapshot_path() const { return fs::path(dir) / "snapshot.bin"; }
    fs::path log_path() const { return fs::path(dir) / "insert.log"; }

    void write_log_header(std::ostream& out) const {
        write_u32(out, kLogMagic);
        write_u32(out, kFormatVersion);
        write_u32(out, static_cast<uint32_t>(dim));
        write_u8(out, metric == DistanceMetric::cosine ? 0 : 1);
    }

    void open_log_for_append() {
        log.open(log_path(), std::ios::binary | std::ios::app);
        if (!log) raise(ErrorKind::io, "cannot open index log " + log_path().string());
    }

    void save_snapshot_locked() {
        if (dir.empty()) return;
        fs::path tmp = snapshot_path();
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) raise(ErrorKind::io, "cannot write index snapshot " + tmp.string());
            write_u32(out, kSnapshotMagic);
            write_u32(out, kFormatVersion);
            write_u32(out, static_cast<uint32_t>(dim));
            write_u8(out, metric == DistanceMetric::cosine ? 0 : 1);
            write_u32(out, static_cast<uint32_t>(params.M));
            write_u32(out, static_cast<uint32_t>(params.ef_construction));
            write_u32(out, static_cast<uint32_t>(params.ef_search));
            write_u64(out, params.seed);
            std::ostringstream rng_state;
            rng_state << rng;
            write_str(out, rng_state.str());
            write_u32(out, entry);
            write_i32(out, max_level);
            write_u64(out, tombstones);
            write_u64(out, nodes.size());
            for (const Node& n : nodes) {
                write_str(out, n.id);
                write_vec(out, n.vec);
                write_meta(out, n.meta);
                write_u8(out, n.deleted ? 1 : 0);
                write_i32(out, n.level);
                for (const auto& layer : n.links) {
                    write_u32(out, static_cast<uint32_t>(layer.size()));
                    for (uint32_t l : layer) write_u32(out, l);
                }
            }
            if (!out) raise(ErrorKind::io, "short write on index snapshot");
        }
        fs::rename(tmp, snapshot_path());

        // Snapshot covers everything; restart the log.
        if (log.is_open()) log.close();
        std::ofstream fresh(log_path(), std::ios::binary | std::ios::trunc);
        write_log_header(fresh);
        fresh.close();
        open_log_for_append();
        log_records = 0;
    }

    bool load_snapshot() {
        std::ifstream in(snapshot_path(), std::ios::binary);
        if (!in) return false;
        uint32_t magic = 0, version = 0, file_dim = 0;
        uint8_t file_metric = 0;
        if (!read_u32(in, magic) || magic != kSnapshotMagic) {
            raise(ErrorKind::io, "bad index snapshot magic in " + snapshot_path().string());
        }
        read_u32(in, version);
        read_u32(in, file_dim);
        read_u8(in, file_metric);
        if (file_dim != dim) {
            raise(ErrorKind::config, "index snapshot dimension " + std::to_string(file_dim) +
                                         " does not match configured " + std::to_string(dim));
        }
        uint32_t m = 0, efc = 0, efs = 0;
        uint64_t seed = 0;
        read_u32(in, m);
        read_u32(in, efc);
        read_u32(in, efs);
        read_u64(in, seed);
        params.M = m;
        params.ef_construction = efc;
        params.ef_search = efs;
        params.seed = seed;
        level_mult = 1.0 / std::log(static_cast<double>(std::max<size_t>(params.M, 2)));
        std::string rng_state;
        read_str(in, rng_state);
        std::istringstream rs(rng_state);
        rs >> rng;
        read_u32(in, entry);
        read_i32(in, max_level);
        uint64_t tomb = 0, count = 0;
        read_u64(in, tomb);
        read_u64(in, count);
        tombstones = tomb;
        nodes.clear();
        nodes.reserve(count);
        for (uint64_t i = 0; i < count; i++) {
            Node n;
            uint8_t deleted = 0;
            if (!read_str(in, n.id) || !read_vec(in, n.vec) || !read_meta(in, n.meta) ||
                !read_u8(in, deleted) || !read_i32(in, n.level)) {
                raise(ErrorKind::io, "truncated index snapshot");
            }
            n.deleted = deleted != 0;
            n.norm = vector_norm(n.vec);
            n.links.resize(static_cast<size_t>(n.level) + 1);
            for (auto& layer : n.links) {
                uint32_t cnt = 0;
                if (!read_u32(in, cnt)) raise(ErrorKind::io, "truncated index snapshot");
                layer.resize(cnt);
                for (uint32_t& l : layer) read_u32(in, l);
            }
            if (!n.deleted) slot_of[n.id] = static_cast<uint32_t>(nodes.size());
            nodes.push_back(std::move(n));
        }
        return true;
    }

    void replay_log() {
        std::ifstream in(log_path(), std::ios::binary);
        if (!in) return;
        uint32_t magic = 0, version = 0, file_dim = 0;
        uint8_t file_metric = 0;
        if (!read_u32(in, magic)) return;  // empty file
        if (magic != kLogMagic) raise(ErrorKind::io, "bad index log magic");
        read_u32(in, version);
        read_u32(in, file_dim);
        read_u8(in, file_metric);
        if (file_dim != dim) {
            raise(ErrorKind::config, "index log dimension does not match configured dimension");
        }
        uint8_t op = 0;
        while (read_u8(in, op)) {
            if (op == 1) {
                IndexedDrawer item;
                if (!read_str(in, item.drawer_id) || !read_vec(in, item.vector) ||
                    !read_meta(in, item.metadata)) {
                    break;  // torn tail record; everything before it is intact
                }
                do_insert(item, false);
                log_records++;
            } else if (op == 2) {
                std::string id;
                if (!read_str(in, id)) break;
                do_remove(id, false);
                log_records++;
            } else if (op == 3) {
                std::string id;
                std::map<std::string, std::string> meta;
                if (!read_str(in, id) || !read_meta(in, meta)) break;
                if (slot_of.count(id)) do_update_metadata(id, std::move(meta), false);
                log_records++;
            } else {
                raise(ErrorKind::io, "unknown index log record type");
            }
        }
    }
};

VectorIndex::VectorIndex(size_t dim, DistanceMetric metric, HnswParams params)
    : impl_(std::make_unique<Impl>(dim, metric, params)) {}

VectorIndex::~VectorIndex() = default;
VectorIndex::VectorIndex(VectorIndex&&) noexcept = default;
VectorIndex& VectorIndex::operator=(VectorIndex&&) noexcept = default;

VectorIndex VectorIndex::open(const std::string& dir, size_t dim, DistanceMetric metric,
                              HnswParams params) {
    fs::create_directories(dir);
    VectorIndex index(dim, metric, params);
    index.impl_->dir = dir;
    index.impl_->load_snapshot();
    index.impl_->replay_log();
    if (!fs::exists(index.impl_->log_path())) {
        std::ofstream fresh(index.impl_->log_path(), std::ios::binary);
        index.impl_->write_log_header(fresh);
    }
    index.impl_->open_log_for_append();
    return index;
}

void VectorIndex::save_snapshot() {
    std::unique_lock lock(impl_->mutex);
    impl_->save_snapshot_locked();
}

void VectorIndex::insert(const IndexedDrawer& item) {
    std::unique_lock lock(impl_->mutex);
    impl_->do_insert(item, true);
}

bool VectorIndex::remove(const std::string& drawer_id) {
    std::unique_lock lock(impl_->mutex);
    return impl_->do_remove(drawer_id, true);
}

void VectorIndex::update_metadata(const std::string& drawer_id,
                                  std::map<std::string, std::string> metadata) {
    std::unique_lock lock(impl_->mutex);
    impl_->do_update_metadata(drawer_id, std::move(metadata), true);
}

std::vector<SearchHit> VectorIndex::query_exact(std::span<const float> query, size_t k,
                                                const WhereFilter& filter) const {
    if (k < 1) raise(ErrorKind::invalid_input, "query_exact: k must be >= 1");
    if (query.size() != impl_->dim) raise(ErrorKind::invalid_input, "query_exact: dimension mismatch");
    std::shared_lock lock(impl_->mutex);
    return impl_->exact(query, k, filter);
}

std::vector<SearchHit> VectorIndex::query_hnsw(std::span<const float> query, size_t k,
                                               const WhereFilter& filter, size_t ef) const {
    if (k < 1) raise(ErrorKind::invalid_input, "query_hnsw: k must be >= 1");
    if (query.size() != impl_->dim) raise(ErrorKind::invalid_input, "query_hnsw: dimension mismatch");
    std::shared_lock lock(impl_->mutex);
    return impl_->approx(query, k, filter, ef);
}

bool VectorIndex::contains(const std::string& drawer_id) const {
    std::shared_lock lock(impl_->mutex);
    return impl_->slot_of.count(drawer_id) > 0;
}

std::optional<std::map<std::string, std::string>> VectorIndex::metadata(
    const std::string& drawer_id) const {
    std::shared_lock lock(impl_->mutex);
    auto it = impl_->slot_of.find(drawer_id);
    if (it == impl_->slot_of.end()) return std::nullopt;
    return impl_->nodes[it->second].meta;
}

size_t VectorIndex::size() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->slot_of.size();
}

size_t VectorIndex::dim() const { return impl_->dim; }
DistanceMetric VectorIndex::metric() const { return impl_->metric; }

std::vector<std::string> VectorIndex::ids() const {
    std::shared_lock lock(impl_->mutex);
    std::vector<std::string> out;
    out.reserve(impl_->slot_of.size());
    for (const auto& [id, slot] : impl_->slot_of) out.push_back(id);
    return out;
}

std::vector<size_t> VectorIndex::layer0_degrees() const {
    std::shared_lock lock(impl_->mutex);
    std::vector<size_t> out;
    out.reserve(impl_->nodes.size());
    for (const auto& n : impl_->nodes) out.push_back(n.links[0].size());
    return out;
}

}  // namespace palace
