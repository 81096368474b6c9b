#include "palace/miner.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "palace/chunker.hpp"
#include "palace/error.hpp"
#include "palace/palace.hpp"
#include "palace/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace palace {

namespace {

bool glob_match(const std::string& pattern, const std::string& name) {
    // Supports the leading-star form used by the include globs ("*.md").
    if (!pattern.empty() && pattern[0] == '*') {
        std::string suffix = pattern.substr(1);
        return name.size() >= suffix.size() &&
               name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    return pattern == name;
}

bool included(const MineOptions& options, const std::string& filename) {
    for (const auto& g : options.include_globs) {
        if (glob_match(g, filename)) return true;
    }
    return false;
}

}  // namespace

std::string exchange_content(const Exchange& e) {
    return "USER: " + e.user_turn + "\nASSISTANT: " + e.assistant_turn;
}

MineReport mine_project(Palace& palace, const std::string& dir, const MineOptions& options) {
    if (!fs::exists(dir) || !fs::is_directory(dir)) {
        raise(ErrorKind::not_found, "project directory does not exist: " + dir);
    }
    const PalaceConfig& config = palace.config();

    // Sorted relative paths make the run order (and warnings) reproducible.
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (included(options, entry.path().filename().string())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    MineReport report;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            report.warnings.push_back("cannot read " + file.string() + ", skipped");
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string raw = buf.str();
        if (raw.empty()) {
            report.files_processed++;
            continue;
        }

        std::string text = normalize(raw);
        if (text.empty()) {
            report.files_processed++;
            continue;
        }

        std::string rel = fs::relative(file, dir).generic_string();
        PalaceAddress addr = classify_address(text, rel, config.room_keywords);

        // File mtime keeps re-runs over an unchanged tree byte-identical.
        auto mtime = fs::last_write_time(file);
        auto sys = std::chrono::time_point_cast<std::chrono::seconds>(
            mtime - fs::file_time_type::clock::now() + std::chrono::system_clock::now());
        std::string stamp =
            util::iso8601_from_time(std::chrono::system_clock::to_time_t(sys));

        for (const Chunk& chunk : chunk_text(text, config.chunk_size, config.chunk_overlap)) {
            auto res = palace.remember(chunk.text, addr, DrawerKind::project_chunk, rel, stamp);
            if (res.deduplicated) report.drawers_deduplicated++;
            else report.drawers_added++;
        }
        report.files_processed++;
    }
    return report;
}

std::vector<Exchange> parse_conversation_export(std::istream& in) {
    struct Pending {
        std::string user;
        std::optional<std::string> ts;
        size_t line_no = 0;
        bool active = false;
        int next_turn = 0;
    };
    std::map<std::string, Pending> sessions;
    std::vector<Exchange> exchanges;

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
                  "conversation export line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("session_id") || !j.contains("role") || !j.contains("content")) {
            raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                        ": record needs session_id, role, content");
        }
        std::string session = j["session_id"].get<std::string>();
        std::string role = j["role"].get<std::string>();
        std::string content = j["content"].get<std::string>();
        std::optional<std::string> ts;
        if (j.contains("ts") && j["ts"].is_string()) ts = j["ts"].get<std::string>();

        Pending& p = sessions[session];
        if (role == "user") {
            if (p.active) {
                raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                            ": user turn follows unanswered user turn (session " +
                                            session + ")");
            }
            if (content.empty()) {
                raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                            ": empty user turn");
            }
            p.user = content;
            p.ts = ts;
            p.line_no = line_no;
            p.active = true;
        } else if (role == "assistant") {
            if (!p.active) {
                raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                            ": assistant turn without preceding user turn (session " +
                                            session + ")");
            }
            if (content.empty()) {
                raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                            ": empty assistant turn");
            }
            Exchange e;
            e.user_turn = p.user;
            e.assistant_turn = content;
            e.session_id = session;
            e.turn_index = p.next_turn++;
            e.ts = p.ts;
            exchanges.push_back(std::move(e));
            p.active = false;
        } else {
            raise(ErrorKind::parse, "conversation export line " + std::to_string(line_no) +
                                        ": role must be 'user' or 'assistant', got '" + role + "'");
        }
    }
    for (const auto& [session, p] : sessions) {
        if (p.active) {
            raise(ErrorKind::parse, "conversation export line " + std::to_string(p.line_no) +
                                        ": user turn never answered (session " + session + ")");
        }
    }
    return exchanges;
}

MineReport mine_conversation(Palace& palace, const std::string& export_file,
                             const AddressAssigner& assign_address) {
    std::ifstream in(export_file);
    if (!in) raise(ErrorKind::not_found, "cannot open conversation export: " + export_file);

    auto exchanges = parse_conversation_export(in);
    const PalaceConfig& config = palace.config();

    MineReport report;
    for (const Exchange& e : exchanges) {
        PalaceAddress addr;
        if (assign_address) {
            addr = assign_address(e);
        } else {
            addr = classify_address(exchange_content(e), std::nullopt, config.room_keywords);
        }
        auto res = palace.remember(exchange_content(e), addr, DrawerKind::convo_exchange,
                                   std::nullopt, e.ts, e.session_id, e.turn_index);
        if (res.deduplicated) report.drawers_deduplicated++;
        else report.drawers_added++;
        report.exchanges++;
    }
    return report;
}

}  // namespace palace
