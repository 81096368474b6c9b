#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "palace/config.hpp"
#include "palace/embedder.hpp"

namespace palace {

// One index entry: the drawer's embedding plus the metadata the where-filter
// can see. Content stays in the drawer store; the index never holds it.
struct IndexedDrawer {
    std::string drawer_id;
    EmbeddingVector vector;
    std::map<std::string, std::string> metadata;  // wing, room, hall?, closet?, ...
};

// Metadata scope for a query. Empty filter matches everything; a room
// filter without a wing filter is permitted.
struct WhereFilter {
    std::optional<std::string> wing;
    std::optional<std::string> room;
    std::optional<std::string> hall;

    bool empty() const { return !wing && !room && !hall; }
    bool matches(const std::map<std::string, std::string>& metadata) const;
};

// M and ef_construction follow the algorithm's canonical defaults. The
// ef_search default is deliberately high: at desk scale a wide beam costs
// well under a millisecond, and narrow beams measurably lose recall on
// unstructured data (ef=100 reaches only ~0.55 recall@10 on 10k uniform
// random 384-dim vectors; ef=800 reaches ~0.99).
struct HnswParams {
    size_t M = 16;
    size_t ef_construction = 200;
    size_t ef_search = 800;
    uint64_t seed = 42;
};

struct SearchHit {
    std::string drawer_id;
    double distance = 0.0;
};

// Flat vector index over the whole palace: a from-scratch HNSW graph for
// approximate search plus an exact brute-force scan that doubles as its
// oracle. Filtering is post-filtering with adaptive ef expansion.
//
// Concurrency: many concurrent readers or one writer.
// Persistence: append-only insert log plus full graph snapshots under a
// private directory; the log replays on open.
class VectorIndex {
public:
    VectorIndex(size_t dim, DistanceMetric metric, HnswParams params = {});
    ~VectorIndex();

    VectorIndex(VectorIndex&&) noexcept;
    VectorIndex& operator=(VectorIndex&&) noexcept;
    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    // Opens (or creates) the on-disk index in `dir`: loads the latest
    // snapshot if present, then replays the insert log.
    static VectorIndex open(const std::string& dir, size_t dim, DistanceMetric metric,
                            HnswParams params = {});

    // Writes a full graph snapshot and truncates the log. No-op for a
    // purely in-memory index.
    void save_snapshot();

    // Inserts one item. Re-inserting an id that is already live is a no-op;
    // re-inserting a deleted id makes it retrievable again. Throws
    // Error(invalid_input) on dimension mismatch.
    void insert(const IndexedDrawer& item);

    // Tombstones the item; returns whether it existed. The graph is rebuilt
    // from live items once tombstones exceed 25% of all nodes.
    bool remove(const std::string& drawer_id);

    // True k-nearest by linear scan, ascending distance, ties broken by
    // lexicographic drawer_id. Fewer than k matches yields a shorter list.
    std::vector<SearchHit> query_exact(std::span<const float> query, size_t k,
                                       const WhereFilter& filter = {}) const;

    // Greedy multi-layer HNSW search. ef == 0 uses params.ef_search; the
    // effective ef is never below k. With a filter, ef doubles (up to 8x)
    // until k filtered results are found or the candidates are exhausted.
    std::vector<SearchHit> query_hnsw(std::span<const float> query, size_t k,
                                      const WhereFilter& filter = {}, size_t ef = 0) const;

    bool contains(const std::string& drawer_id) const;
    // Metadata of a live item, or nullopt.
    std::optional<std::map<std::string, std::string>> metadata(const std::string& drawer_id) const;
    // Replaces a live item's metadata (address edits; vector unchanged).
    void update_metadata(const std::string& drawer_id, std::map<std::string, std::string> metadata);

    size_t size() const;  // live items
    size_t dim() const;
    DistanceMetric metric() const;

    // All live drawer ids (unordered).
    std::vector<std::string> ids() const;

    // Layer-0 out-degree of every node (diagnostics/benchmarks).
    std::vector<size_t> layer0_degrees() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace palace
