#include "palace/layers.hpp"

#include <algorithm>

#include "palace/dialect.hpp"
#include "palace/error.hpp"
#include "palace/palace.hpp"
#include "palace/util.hpp"

namespace palace {

size_t estimate_tokens(const std::string& text) {
    size_t chars = util::utf8_length(text);
    return (chars + 3) / 4;
}

namespace {

std::string first_key_sentence(const std::string& content) {
    AaakRecord rec = compress(content);
    if (!rec.key_sentences.empty()) return rec.key_sentences[0];
    return content;
}

std::string single_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string build_l1_capped(const Palace& palace, size_t l1_cap) {
    std::string out;
    for (const Drawer& d : palace.drawers_by_recency()) {
        std::string line = "- " + single_line(first_key_sentence(d.content)) + "\n";
        if (estimate_tokens(out + line) > l1_cap) break;
        out += line;
    }
    return out;
}

}  // namespace

std::string build_l1(const Palace& palace, const LayerBudget& budget) {
    return build_l1_capped(palace, budget.l1_max);
}

WakeupPayload wakeup(const Palace& palace, const std::string& identity_text,
                     const LayerBudget& budget) {
    size_t identity_tokens = estimate_tokens(identity_text);
    if (identity_tokens > budget.l0_max) {
        raise(ErrorKind::invalid_input,
              "identity text estimates " + std::to_string(identity_tokens) +
                  " tokens, over the L0 budget of " + std::to_string(budget.l0_max));
    }

    const std::string& directive = palace_protocol_directive();
    size_t directive_tokens = estimate_tokens(directive);

    // L1 may use whatever the ceiling leaves after L0 and the directive.
    size_t remaining = kWakeupCeiling > identity_tokens + directive_tokens
                           ? kWakeupCeiling - identity_tokens - directive_tokens
                           : 0;
    size_t l1_cap = std::min(budget.l1_max, remaining);

    WakeupPayload payload;
    payload.l0_text = identity_text;
    payload.l1_text = build_l1_capped(palace, l1_cap);
    payload.protocol_directive = directive;
    payload.token_estimate =
        identity_tokens + directive_tokens + estimate_tokens(payload.l1_text);
    return payload;
}

std::string load_topic_context(const Palace& palace, const std::string& topic,
                               const LayerBudget& budget) {
    auto rooms = palace.rooms();
    if (std::find(rooms.begin(), rooms.end(), topic) == rooms.end()) return "";

    SearchRequest req;
    req.query = topic;
    req.room = topic;
    req.n_results = 10;
    req.mode = SearchMode::semantic;
    auto results = palace.search_memories(req);

    std::string out;
    for (const SearchResult& r : results) {
        std::string line = "- " + single_line(first_key_sentence(r.content)) + "\n";
        if (estimate_tokens(out + line) > budget.l2_per_topic_max) break;
        out += line;
    }
    return out;
}

}  // namespace palace
