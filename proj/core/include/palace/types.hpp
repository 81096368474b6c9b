#pragma once

#include <optional>
#include <string>

namespace palace {

// Wing/room/hall/closet coordinates. Pure metadata: the address never
// determines physical storage partitioning — all drawers live in one flat
// index regardless of address.
struct PalaceAddress {
    std::string wing;
    std::string room;
    std::optional<std::string> hall;
    std::optional<std::string> closet;

    bool operator==(const PalaceAddress&) const = default;
};

// Accepts iff wing/room (and hall/closet when present) match [a-z0-9_]+.
// Throws Error(invalid_input) naming the offending field.
void validate_address(const PalaceAddress& addr);

enum class DrawerKind {
    project_chunk,
    convo_exchange,
    manual,
};

const char* to_string(DrawerKind k);
DrawerKind drawer_kind_from_string(const std::string& s);

// Atomic memory unit: a verbatim text chunk plus its palace address and
// provenance. Content is never summarized or rewritten at write time.
struct Drawer {
    std::string id;
    std::string content;
    PalaceAddress address;
    std::optional<std::string> source_file;
    std::string timestamp;  // ISO-8601 UTC
    DrawerKind kind = DrawerKind::manual;
    // Conversation provenance, set for kind == convo_exchange.
    std::optional<std::string> session_id;
    std::optional<int> turn_index;
};

// drawer_{wing}_{room}_{md5(content)[:12]}
//
// The hash runs over the raw UTF-8 bytes of content, no normalization.
// Identical (wing, room, content) always maps to the same id, which is the
// only deduplication mechanism in the store.
std::string derive_drawer_id(const std::string& wing, const std::string& room,
                             const std::string& content);

}  // namespace palace
