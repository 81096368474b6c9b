#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "palace/config.hpp"
#include "palace/miner.hpp"
#include "palace/searcher.hpp"

namespace palace {

class Palace;

struct EvalQuestion {
    std::string question_id;
    std::string query_text;
    std::vector<std::string> answer_session_ids;  // non-empty
    std::optional<std::string> wing_hint;
};

struct EvalSession {
    std::string session_id;
    std::string wing;
    std::string room;
    std::vector<Exchange> exchanges;
};

// Haystack sessions plus questions with ground-truth answer sessions, the
// unit of recall_any@k scoring.
struct EvalFixture {
    std::vector<EvalQuestion> questions;
    std::vector<EvalSession> sessions;
};

// recall_any@k per k, where a question scores 1 iff at least one of the
// top-k results maps to a ground-truth answer session. This is the most
// generous recall variant, reported as such.
struct EvalReport {
    std::map<size_t, double> recall_any_at_k;          // k in {1, 5, 10}
    std::map<std::string, double> condition_breakdown;  // filled by ablation runs
    int64_t runtime_ms = 0;
};

enum class EvalCondition { verbatim, aaak, scoped, unscoped, cosine, l2 };

const char* to_string(EvalCondition c);
EvalCondition eval_condition_from_string(const std::string& s);

// Palace configuration for a condition (the distance metric must be fixed
// at init time; everything else is default).
PalaceConfig condition_config(EvalCondition c);

// Deterministic synthetic fixture: every question's answer session carries
// a unique seeded keyphrase the query echoes; distractors share the common
// vocabulary but never a keyphrase. Wings are assigned round-robin so
// wing-scoped runs are meaningful.
EvalFixture generate_fixture(size_t n_questions, size_t n_distractor_sessions, uint64_t seed);

void save_fixture(const EvalFixture& fixture, std::ostream& out);
EvalFixture load_fixture(std::istream& in);

// Validates fixture invariants (unique session ids, answer ids resolve) and
// mines every session into the palace via mine_conversation with the
// session's declared address. The aaak condition indexes the serialized
// compression of each exchange instead of the verbatim text.
void ingest_fixture(const EvalFixture& fixture, Palace& palace, EvalCondition condition);

// Scores recall_any for all k in {1, 5, 10} up to max_k. scoped applies the
// question's wing_hint as a wing filter.
EvalReport score_recall_any(const Palace& palace, const EvalFixture& fixture, size_t max_k,
                            bool scoped, SearchMode mode = SearchMode::hybrid);

struct AblationRow {
    std::string condition;  // e.g. "verbatim_cosine_scoped"
    EvalReport report;
};

struct AblationResult {
    std::vector<AblationRow> rows;
    // Directional/equivalence checks that did not hold; empty on a clean run.
    std::vector<std::string> violations;
};

// Runs {verbatim, aaak} x {scoped, unscoped} x {cosine, l2} on fresh palace
// directories under work_dir and checks: cosine == l2 recall exactly,
// aaak <= verbatim, scoped >= unscoped (all at k=5).
AblationResult run_ablations(const EvalFixture& fixture, const std::string& work_dir);

// Aligned-column text table (includes runtime); one row per condition.
std::string format_ablation_table(const AblationResult& result);

// Canonical JSON document for reports; deterministic for a fixed seed
// (runtime is deliberately excluded).
std::string ablation_report_json(const AblationResult& result);

}  // namespace palace
