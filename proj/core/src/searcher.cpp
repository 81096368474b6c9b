#include "palace/searcher.hpp"

#include <algorithm>

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace palace {

const char* to_string(SearchMode m) {
    switch (m) {
        case SearchMode::semantic: return "semantic";
        case SearchMode::keyword: return "keyword";
        case SearchMode::hybrid: return "hybrid";
    }
    return "hybrid";
}

SearchMode search_mode_from_string(const std::string& s) {
    if (s == "semantic") return SearchMode::semantic;
    if (s == "keyword") return SearchMode::keyword;
    if (s == "hybrid") return SearchMode::hybrid;
    raise(ErrorKind::invalid_input, "unknown search mode: " + s);
}

const char* to_string(ResultProvenance p) {
    switch (p) {
        case ResultProvenance::semantic: return "semantic";
        case ResultProvenance::keyword: return "keyword";
        case ResultProvenance::both: return "both";
    }
    return "semantic";
}

std::vector<std::pair<std::string, double>> fuse_scores(
    const std::vector<std::string>& semantic_ranked,
    const std::vector<std::string>& keyword_ranked, const std::set<std::string>& boosted) {
    std::map<std::string, double> fused;
    auto accumulate = [&](const std::vector<std::string>& ranked) {
        for (size_t i = 0; i < ranked.size(); i++) {
            fused[ranked[i]] += 1.0 / (kRrfConstant + static_cast<double>(i + 1));
        }
    };
    accumulate(semantic_ranked);
    accumulate(keyword_ranked);
    for (auto& [id, score] : fused) {
        if (boosted.count(id)) score *= kClosetBoost;
    }

    std::vector<std::pair<std::string, double>> out(fused.begin(), fused.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

PalaceAddress classify_address(
    const std::string& text, const std::optional<std::string>& source_path,
    const std::map<std::string, std::vector<std::string>>& room_keywords) {
    PalaceAddress addr;
    addr.wing = "general";
    if (source_path) {
        // Top-level directory of the (relative) path names the wing.
        std::string p = *source_path;
        size_t slash = p.find('/');
        if (slash != std::string::npos && slash > 0) {
            addr.wing = util::sanitize_identifier(p.substr(0, slash), "general");
        }
    }

    addr.room = "misc";
    if (!room_keywords.empty()) {
        std::map<std::string, size_t> tf;
        for (const auto& w : util::tokenize_words(text)) tf[w]++;
        size_t best = 0;
        for (const auto& [room, keywords] : room_keywords) {
            size_t total = 0;
            for (const auto& kw : keywords) {
                auto it = tf.find(util::to_lower(kw));
                if (it != tf.end()) total += it->second;
            }
            // strictly-greater keeps the lexicographically first room on ties
            if (total > best) {
                best = total;
                addr.room = room;
            }
        }
    }
    return addr;
}

}  // namespace palace
