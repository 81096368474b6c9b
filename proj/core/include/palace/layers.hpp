#pragma once

#include <cstddef>
#include <string>

namespace palace {

class Palace;

// Token ceilings for the progressive-loading stack:
//   L0 identity (always), L1 essential (always), L2 per-topic (on demand),
//   L3 deep search (unbounded, delegated to search_memories).
struct LayerBudget {
    size_t l0_max = 150;
    size_t l1_min = 500;
    size_t l1_max = 800;
    size_t l2_per_topic_max = 500;
};

// Everything injected at session start. The estimate never exceeds 900
// tokens, whatever the palace holds; L0 is present even when L1 is empty.
struct WakeupPayload {
    std::string l0_text;
    std::string l1_text;
    size_t token_estimate = 0;
    std::string protocol_directive;
};

inline constexpr size_t kWakeupCeiling = 900;

// ceil(scalar count / 4). A heuristic stand-in for model tokenizers; fine
// for budgeting, not for billing.
size_t estimate_tokens(const std::string& text);

// L1: one key-sentence line per drawer, most recent drawers first, stopping
// before the next line would push the estimate past l1_max. Deterministic
// for a fixed palace state.
std::string build_l1(const Palace& palace, const LayerBudget& budget = {});

// L0 + L1 + PALACE_PROTOCOL directive. The L1 budget shrinks as needed so
// the combined estimate stays under the 900-token ceiling. An identity over
// l0_max throws Error(invalid_input) carrying the measured estimate.
WakeupPayload wakeup(const Palace& palace, const std::string& identity_text,
                     const LayerBudget& budget = {});

// L2: key sentences of the top drawers in the named room (semantic search,
// query = topic), capped at l2_per_topic_max. Unknown rooms yield "" —
// rooms are emergent, not declared.
std::string load_topic_context(const Palace& palace, const std::string& topic,
                               const LayerBudget& budget = {});

}  // namespace palace
