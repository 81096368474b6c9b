#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "palace/types.hpp"

namespace palace {

enum class SearchMode { semantic, keyword, hybrid };

const char* to_string(SearchMode m);
SearchMode search_mode_from_string(const std::string& s);

struct SearchRequest {
    std::string query;
    std::optional<std::string> wing;
    std::optional<std::string> room;
    size_t n_results = 5;
    // 0.0 disables the cutoff (the sentinel default): a literal zero
    // threshold would filter everything.
    double max_distance = 0.0;
    SearchMode mode = SearchMode::hybrid;
};

enum class ResultProvenance { semantic, keyword, both };

const char* to_string(ResultProvenance p);

struct SearchResult {
    std::string drawer_id;
    std::string content;  // byte-identical to the stored drawer
    PalaceAddress address;
    double distance = 0.0;       // semantic distance; 0 when keyword-only
    double keyword_score = 0.0;  // BM25; 0 in semantic mode
    double fused_score = 0.0;    // ordering key, mode-dependent
    ResultProvenance provenance = ResultProvenance::semantic;
    std::optional<std::string> session_id;
};

// Directed link between drawers (usually across wings), stored once and
// traversed in both directions.
struct Tunnel {
    std::string from_drawer_id;
    std::string to_drawer_id;
    std::string label;
    std::string created_at;
};

// Compact searchable pointer over verbatim drawers. The summary only ever
// boosts ranking; drawer content stays authoritative and closet text is
// never returned as memory content.
struct ClosetEntry {
    std::string closet_id;
    std::string summary_line;  // single line, <= 200 chars
    std::vector<std::string> member_drawer_ids;
};

// Reciprocal-rank fusion: fused(d) = sum over lists of 1/(60 + rank(d)),
// ranks 1-based. Ids in `boosted` get the final score multiplied by 1.2.
// Ties break by lexicographic drawer_id.
std::vector<std::pair<std::string, double>> fuse_scores(
    const std::vector<std::string>& semantic_ranked,
    const std::vector<std::string>& keyword_ranked, const std::set<std::string>& boosted);

inline constexpr double kRrfConstant = 60.0;
inline constexpr double kClosetBoost = 1.2;

// Rule-based address assignment for ingest. Wing comes from the top-level
// directory of source_path (fallback "general"); room is the room whose
// configured keywords have the highest term frequency in the text
// (fallback "misc").
PalaceAddress classify_address(const std::string& text,
                               const std::optional<std::string>& source_path,
                               const std::map<std::string, std::vector<std::string>>& room_keywords);

}  // namespace palace
