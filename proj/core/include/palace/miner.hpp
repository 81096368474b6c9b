#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "palace/types.hpp"

namespace palace {

class Palace;

// One user turn plus the assistant's response, preserved verbatim as a
// single unit. Exchanges longer than chunk_size are never split.
struct Exchange {
    std::string user_turn;
    std::string assistant_turn;
    std::string session_id;
    int turn_index = 0;
    std::optional<std::string> ts;  // ISO-8601 of the user turn, when known
};

struct MineOptions {
    // Defaults cover the usual text-bearing project files.
    std::vector<std::string> include_globs = {"*.md", "*.txt", "*.py",   "*.rs", "*.go",
                                              "*.ts", "*.yaml", "*.json", "*.toml"};
};

struct MineReport {
    size_t drawers_added = 0;
    size_t drawers_deduplicated = 0;
    size_t files_processed = 0;
    size_t exchanges = 0;
    std::vector<std::string> warnings;  // unreadable files, skipped, run continues
};

// Deterministic zero-LLM write path: walks dir, normalizes each matching
// file, chunks it (config chunk_size/overlap), classifies wing from the
// top-level directory and room from the keyword table, and stores every
// chunk as a project_chunk drawer. Re-running over an unchanged directory
// adds nothing.
MineReport mine_project(Palace& palace, const std::string& dir, const MineOptions& options = {});

// Assigns the address for a mined exchange; the default classifies by
// content with no source path.
using AddressAssigner = std::function<PalaceAddress(const Exchange&)>;

// Parses a conversation export (JSON-lines, one turn per line with
// session_id/role/content/ts); exchanges are adjacent (user, assistant)
// pairs within a session. Malformed records and broken pairing throw
// Error(parse) naming the line.
std::vector<Exchange> parse_conversation_export(std::istream& in);

// Stores one convo_exchange drawer per exchange, content
// "USER: ...\nASSISTANT: ..." verbatim (no normalization). Oversized
// exchanges are stored whole: coherence beats chunk size.
MineReport mine_conversation(Palace& palace, const std::string& export_file,
                             const AddressAssigner& assign_address = {});

// content string for an exchange drawer
std::string exchange_content(const Exchange& e);

}  // namespace palace
