#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "palace/bm25.hpp"
#include "palace/config.hpp"
#include "palace/diary.hpp"
#include "palace/embedder.hpp"
#include "palace/knowledge_graph.hpp"
#include "palace/searcher.hpp"
#include "palace/types.hpp"
#include "palace/vector_index.hpp"

namespace palace {

struct RememberResult {
    std::string drawer_id;
    bool deduplicated = false;
};

struct PalaceStatus {
    size_t wing_count = 0;
    size_t room_count = 0;  // distinct (wing, room) pairs
    size_t drawer_count = 0;
    std::string protocol_directive;
};

// Always-on directive shipped in status payloads. Instructs an agent to
// search memory before claiming ignorance.
const std::string& palace_protocol_directive();

// The palace: verbatim drawer store + flat vector index + BM25 inverted
// index + closets/tunnels + knowledge graph + diaries, all rooted in one
// directory. The wing/room/hall/closet hierarchy exists only as metadata;
// storage is flat.
class Palace {
public:
    // Creates <path>/palace.yaml and the palace directory layout. Fails if
    // the palace already exists.
    static void init(const std::string& path, const PalaceConfig& config = {});

    // Opens an existing palace: loads config, drawer store, vector index
    // (snapshot + log replay) and rebuilds the BM25 index.
    static Palace open(const std::string& path);

    static bool exists(const std::string& path);

    ~Palace();
    Palace(Palace&&) noexcept;
    Palace& operator=(Palace&&) noexcept;
    Palace(const Palace&) = delete;
    Palace& operator=(const Palace&) = delete;

    const PalaceConfig& config() const;

    // Stores verbatim content at the given address. Identical
    // (wing, room, content) dedupes to the same drawer. Extracted entities
    // land in the knowledge graph's entity table.
    RememberResult remember(const std::string& content, const PalaceAddress& address,
                            DrawerKind kind = DrawerKind::manual,
                            const std::optional<std::string>& source_file = {},
                            const std::optional<std::string>& timestamp = {},
                            const std::optional<std::string>& session_id = {},
                            std::optional<int> turn_index = {});

    // Tombstones the drawer everywhere; returns whether it existed.
    bool forget(const std::string& drawer_id);

    std::optional<Drawer> get_drawer(const std::string& drawer_id) const;
    size_t drawer_count() const;
    std::vector<std::string> wings() const;
    // Rooms, optionally limited to one wing.
    std::vector<std::string> rooms(const std::optional<std::string>& wing = {}) const;
    // Live drawers ordered by (timestamp desc, id asc) — "most recent first".
    std::vector<Drawer> drawers_by_recency() const;
    // Exact-content duplicate groups across addresses (same content hash,
    // two or more drawers). Read-only maintenance view.
    std::vector<std::vector<std::string>> dedup_groups() const;

    PalaceStatus status() const;

    // Listing-1 pipeline plus the hybrid extensions; see SearchRequest.
    std::vector<SearchResult> search_memories(const SearchRequest& request) const;

    // Builds a closet over existing drawers; the summary line is generated
    // from the members' key sentences (<= 200 chars). Members get their
    // closet metadata updated.
    ClosetEntry create_closet(const std::string& closet_id,
                              const std::vector<std::string>& member_drawer_ids);
    std::vector<ClosetEntry> closets() const;

    // Directed tunnel stored once, traversed both ways. Duplicate
    // (from, to) pairs collapse; returns whether a new tunnel was added.
    bool add_tunnel(const std::string& from_drawer_id, const std::string& to_drawer_id,
                    const std::string& label);
    // Drawers exactly one hop away, both directions, deduplicated.
    std::vector<Drawer> follow_tunnels(const std::string& drawer_id) const;
    std::vector<Tunnel> tunnels() const;

    KnowledgeGraph& kg();
    const KnowledgeGraph& kg() const;
    DiaryStore& diary();
    const DiaryStore& diary() const;
    VectorIndex& index();
    const VectorIndex& index() const;
    EmbeddingProvider& embedder() const;

    // Writes the index snapshot (also runs on destruction).
    void save();

private:
    Palace();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace palace
