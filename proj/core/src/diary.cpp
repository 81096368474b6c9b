#include "palace/diary.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace palace {

DiaryEntry DiaryStore::append(const std::string& agent_id, const std::string& session_id,
                              const std::string& text) {
    if (!util::is_identifier(agent_id)) {
        raise(ErrorKind::invalid_input, "agent_id must match [a-z0-9_]+: '" + agent_id + "'");
    }
    fs::create_directories(dir_);
    DiaryEntry entry{agent_id, session_id, text, util::iso8601_now()};

    json j;
    j["agent_id"] = entry.agent_id;
    j["session_id"] = entry.session_id;
    j["text"] = entry.text;
    j["created_at"] = entry.created_at;

    fs::path file = fs::path(dir_) / (agent_id + ".jsonl");
    std::ofstream out(file, std::ios::app);
    if (!out) raise(ErrorKind::io, "cannot append to diary " + file.string());
    out << j.dump() << "\n";
    return entry;
}

std::vector<DiaryEntry> DiaryStore::read(const std::string& agent_id, size_t last_n) const {
    if (!util::is_identifier(agent_id)) {
        raise(ErrorKind::invalid_input, "agent_id must match [a-z0-9_]+: '" + agent_id + "'");
    }
    fs::path file = fs::path(dir_) / (agent_id + ".jsonl");
    std::ifstream in(file);
    if (!in) return {};

    std::vector<DiaryEntry> all;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            raise(ErrorKind::parse, "diary " + file.string() + " line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
        all.push_back({j.value("agent_id", agent_id), j.value("session_id", ""),
                       j.value("text", ""), j.value("created_at", "")});
    }
    if (all.size() > last_n) all.erase(all.begin(), all.end() - static_cast<long>(last_n));
    return all;
}

}  // namespace palace
