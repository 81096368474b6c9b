#pragma once

#include <string>
#include <vector>

namespace palace {

// Append-only, immutable once written.
struct DiaryEntry {
    std::string agent_id;
    std::string session_id;
    std::string text;
    std::string created_at;  // ISO-8601
};

// One JSON-lines file per agent under <palace_path>/diaries/. File order is
// the total order: (created_at, insertion sequence).
class DiaryStore {
public:
    explicit DiaryStore(std::string dir) : dir_(std::move(dir)) {}

    DiaryEntry append(const std::string& agent_id, const std::string& session_id,
                      const std::string& text);

    // Most recent last_n entries in chronological order; unknown agents
    // yield an empty list.
    std::vector<DiaryEntry> read(const std::string& agent_id, size_t last_n) const;

private:
    std::string dir_;
};

}  // namespace palace
