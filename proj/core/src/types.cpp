#include "palace/types.hpp"

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace palace {

namespace {
void check_field(const std::string& value, const char* field) {
    if (!util::is_identifier(value)) {
        raise(ErrorKind::invalid_input,
              std::string("address-invalid(") + field + "): '" + value +
                  "' does not match [a-z0-9_]+");
    }
}
}  // namespace

void validate_address(const PalaceAddress& addr) {
    check_field(addr.wing, "wing");
    check_field(addr.room, "room");
    if (addr.hall) check_field(*addr.hall, "hall");
    if (addr.closet) check_field(*addr.closet, "closet");
}

const char* to_string(DrawerKind k) {
    switch (k) {
        case DrawerKind::project_chunk: return "project_chunk";
        case DrawerKind::convo_exchange: return "convo_exchange";
        case DrawerKind::manual: return "manual";
    }
    return "manual";
}

DrawerKind drawer_kind_from_string(const std::string& s) {
    if (s == "project_chunk") return DrawerKind::project_chunk;
    if (s == "convo_exchange") return DrawerKind::convo_exchange;
    if (s == "manual") return DrawerKind::manual;
    raise(ErrorKind::parse, "unknown drawer kind: " + s);
}

std::string derive_drawer_id(const std::string& wing, const std::string& room,
                             const std::string& content) {
    if (!util::is_identifier(wing)) {
        raise(ErrorKind::invalid_input, "drawer id: wing is not a valid identifier: '" + wing + "'");
    }
    if (!util::is_identifier(room)) {
        raise(ErrorKind::invalid_input, "drawer id: room is not a valid identifier: '" + room + "'");
    }
    if (content.empty()) {
        raise(ErrorKind::invalid_input, "drawer id: content must be non-empty");
    }
    return "drawer_" + wing + "_" + room + "_" + util::md5_hex(content).substr(0, 12);
}

}  // namespace palace
