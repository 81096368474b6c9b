#include "palace/dialect.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "palace/error.hpp"
#include "palace/knowledge_graph.hpp"
#include "palace/util.hpp"

namespace palace {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a",    "an",   "and",  "are",  "as",    "at",   "be",    "but",  "by",   "for",
        "from", "had",  "has",  "have", "he",    "her",  "his",   "i",    "if",   "in",
        "is",   "it",   "its",  "me",   "my",    "no",   "not",   "of",   "on",   "or",
        "our",  "she",  "so",   "that", "the",   "their", "then", "there", "they", "this",
        "to",   "was",  "we",   "were", "what",  "when", "which", "who",  "will", "with",
        "you",  "your",
    };
    return words;
}

bool guarded_abbreviation(const std::string& text, size_t dot_pos) {
    static const std::set<std::string> abbrevs = {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "inc", "fig", "al", "approx",
    };
    // Word immediately before the dot.
    size_t end = dot_pos;
    size_t start = end;
    while (start > 0) {
        char c = text[start - 1];
        bool wordish = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        if (!wordish) break;
        start--;
    }
    if (end == start) return false;
    std::string word = util::to_lower(text.substr(start, end - start));
    if (word.size() <= 1) return true;  // initials and "e.g."/"i.e." tails
    return abbrevs.count(word) > 0;
}

std::vector<std::pair<std::string, double>> rank_sentences(
    const std::vector<std::string>& sentences, const std::map<std::string, size_t>& tf) {
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(sentences.size());
    for (size_t i = 0; i < sentences.size(); i++) {
        double sum = 0.0;
        for (const auto& w : util::tokenize_words(sentences[i])) {
            if (stopwords().count(w)) continue;
            auto it = tf.find(w);
            if (it != tf.end()) sum += static_cast<double>(it->second);
        }
        double weight = (i == 0) ? 1.5 : 1.0;
        scored.emplace_back(sentences[i], sum * weight);
    }
    return scored;
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& emotion_keywords() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
        {"positive", {"great", "good", "excellent", "happy", "love", "loves", "wonderful",
                      "thanks", "glad", "works"}},
        {"negative", {"bad", "terrible", "hate", "hates", "awful", "problem", "broken",
                      "fail", "failed", "wrong", "bug"}},
        {"urgent", {"urgent", "asap", "immediately", "critical", "deadline", "emergency"}},
    };
    return table;
}

const std::vector<std::pair<std::string, std::vector<std::string>>>& flag_keywords() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
        {"todo", {"todo", "fixme", "pending", "remaining"}},
        {"decision", {"decided", "decision", "agreed", "chose", "chosen"}},
        {"fact", {"fact", "confirmed", "verified", "measured"}},
    };
    return table;
}

std::string escape_sentence(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\\' || c == '"' || c == '|') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string join_csv(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); i++) {
        if (i) out.push_back(',');
        out += items[i];
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); i++) {
        if (i == s.size() || s[i] == ',') {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    size_t start = 0;
    auto emit = [&](size_t end) {
        // Trim surrounding whitespace; the kept slice is verbatim.
        size_t a = start, b = end;
        while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) a++;
        while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) b--;
        if (b > a) sentences.push_back(text.substr(a, b - a));
        start = end;
    };
    for (size_t i = 0; i < text.size(); i++) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        bool at_end = i + 1 >= text.size();
        bool before_space = !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (!at_end && !before_space) continue;
        if (c == '.' && guarded_abbreviation(text, i)) continue;
        emit(i + 1);
    }
    emit(text.size());
    return sentences;
}

AaakRecord compress(const std::string& content) {
    if (content.empty()) raise(ErrorKind::invalid_input, "compress: content must be non-empty");

    AaakRecord rec;
    rec.entities = extract_entities(content);
    if (rec.entities.size() > 10) rec.entities.resize(10);

    std::map<std::string, size_t> tf;
    for (const auto& w : util::tokenize_words(content)) {
        if (!stopwords().count(w)) tf[w]++;
    }

    std::vector<std::pair<std::string, size_t>> by_freq(tf.begin(), tf.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (size_t i = 0; i < by_freq.size() && rec.topics.size() < 5; i++) {
        rec.topics.push_back(by_freq[i].first);
    }

    auto sentences = split_sentences(content);
    auto scored = rank_sentences(sentences, tf);
    std::vector<size_t> order(scored.size());
    for (size_t i = 0; i < order.size(); i++) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scored[a].second > scored[b].second; });
    std::vector<size_t> picked(order.begin(),
                               order.begin() + std::min<size_t>(3, order.size()));
    std::sort(picked.begin(), picked.end());  // keep document order
    for (size_t idx : picked) rec.key_sentences.push_back(scored[idx].first);

    std::set<std::string> token_set;
    for (const auto& w : util::tokenize_words(content)) token_set.insert(w);
    for (const auto& [emotion, keywords] : emotion_keywords()) {
        for (const auto& kw : keywords) {
            if (token_set.count(kw)) {
                rec.emotions.push_back(emotion);
                break;
            }
        }
    }
    if (rec.emotions.empty()) rec.emotions.push_back("neutral");

    for (const auto& [flag, keywords] : flag_keywords()) {
        if (flag == "fact") continue;  // ordered insert below
        for (const auto& kw : keywords) {
            if (token_set.count(kw)) {
                rec.flags.push_back(flag);
                break;
            }
        }
    }
    if (content.find('?') != std::string::npos) rec.flags.push_back("question");
    for (const auto& kw : flag_keywords().back().second) {
        if (token_set.count(kw)) {
            rec.flags.push_back("fact");
            break;
        }
    }

    // Size contract: over 400 chars the record must be strictly smaller
    // than its source. Shed the least valuable parts until it is.
    if (util::utf8_length(content) > 400) {
        auto too_big = [&] { return serialize_aaak(rec).size() >= content.size(); };
        while (too_big() && !rec.key_sentences.empty()) rec.key_sentences.pop_back();
        while (too_big() && !rec.topics.empty()) rec.topics.pop_back();
        while (too_big() && !rec.entities.empty()) rec.entities.pop_back();
    }
    return rec;
}

std::string serialize_aaak(const AaakRecord& record) {
    std::string out = "AAAK|E:";
    out += join_csv(record.entities);
    out += "|T:";
    out += join_csv(record.topics);
    out += "|K:";
    for (size_t i = 0; i < record.key_sentences.size(); i++) {
        if (i) out.push_back('|');
        out.push_back('"');
        out += escape_sentence(record.key_sentences[i]);
        out.push_back('"');
    }
    out += "|M:";
    out += join_csv(record.emotions);
    out += "|F:";
    out += join_csv(record.flags);
    if (!record.source_drawer_id.empty()) {
        out += "|S:";
        out += record.source_drawer_id;
    }
    return out;
}

AaakRecord parse_aaak(const std::string& line) {
    if (line.rfind("AAAK|", 0) != 0) raise(ErrorKind::parse, "AAAK record must start with 'AAAK|'");

    // Split into sections on unescaped pipes.
    std::vector<std::string> parts;
    std::string cur;
    for (size_t i = 5; i < line.size(); i++) {
        char c = line[i];
        if (c == '\\' && i + 1 < line.size()) {
            cur.push_back(c);
            cur.push_back(line[++i]);
        } else if (c == '|') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);

    AaakRecord rec;
    bool in_k = false;
    auto unquote = [](const std::string& s) {
        if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
            raise(ErrorKind::parse, "AAAK key sentence must be quoted: " + s);
        }
        std::string out;
        for (size_t i = 1; i + 1 < s.size(); i++) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                out.push_back(s[i + 1]);
                i++;
            } else {
                out.push_back(s[i]);
            }
        }
        return out;
    };

    for (const auto& part : parts) {
        if (part.rfind("E:", 0) == 0) {
            rec.entities = split_csv(part.substr(2));
            in_k = false;
        } else if (part.rfind("T:", 0) == 0) {
            rec.topics = split_csv(part.substr(2));
            in_k = false;
        } else if (part.rfind("K:", 0) == 0) {
            in_k = true;
            std::string payload = part.substr(2);
            if (!payload.empty()) rec.key_sentences.push_back(unquote(payload));
        } else if (part.rfind("M:", 0) == 0) {
            rec.emotions = split_csv(part.substr(2));
            in_k = false;
        } else if (part.rfind("F:", 0) == 0) {
            rec.flags = split_csv(part.substr(2));
            in_k = false;
        } else if (part.rfind("S:", 0) == 0) {
            rec.source_drawer_id = part.substr(2);
            in_k = false;
        } else if (in_k) {
            rec.key_sentences.push_back(unquote(part));
        } else {
            raise(ErrorKind::parse, "unknown AAAK section: " + part);
        }
    }
    return rec;
}

double compression_ratio(const std::string& content, const AaakRecord& record) {
    std::string serialized = serialize_aaak(record);
    if (serialized.empty()) raise(ErrorKind::invalid_input, "empty serialized record");
    return static_cast<double>(content.size()) / static_cast<double>(serialized.size());
}

}  // namespace palace
