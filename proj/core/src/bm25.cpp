#include "palace/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "palace/util.hpp"

namespace palace {

void Bm25Index::add(const std::string& doc_id, const std::string& text) {
    remove(doc_id);
    Doc doc;
    for (const auto& term : util::tokenize_words(text)) {
        doc.tf[term]++;
        doc.length++;
    }
    for (const auto& [term, tf] : doc.tf) postings_[term][doc_id] = tf;
    total_length_ += doc.length;
    docs_[doc_id] = std::move(doc);
}

bool Bm25Index::remove(const std::string& doc_id) {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) return false;
    for (const auto& [term, tf] : it->second.tf) {
        auto pit = postings_.find(term);
        if (pit != postings_.end()) {
            pit->second.erase(doc_id);
            if (pit->second.empty()) postings_.erase(pit);
        }
    }
    total_length_ -= it->second.length;
    docs_.erase(it);
    return true;
}

// Non-negative IDF: ln(1 + (N - df + 0.5)/(df + 0.5)). The raw Robertson
// ratio goes negative once a term hits most documents, which would zero out
// single-document corpora entirely; this standard variant floors the score
// at zero while keeping present terms positive.
double Bm25Index::idf(const std::string& term) const {
    auto it = postings_.find(term);
    size_t df = it == postings_.end() ? 0 : it->second.size();
    if (df == 0) return 0.0;
    double n = static_cast<double>(docs_.size());
    return std::log(1.0 + (n - static_cast<double>(df) + 0.5) / (static_cast<double>(df) + 0.5));
}

double Bm25Index::score_doc(const std::vector<std::string>& query_terms, const Doc& doc) const {
    if (docs_.empty() || doc.length == 0) return 0.0;
    double avgdl = static_cast<double>(total_length_) / static_cast<double>(docs_.size());
    double s = 0.0;
    for (const auto& term : query_terms) {
        auto it = doc.tf.find(term);
        if (it == doc.tf.end()) continue;
        double tf = static_cast<double>(it->second);
        double norm = k1 * (1.0 - b + b * static_cast<double>(doc.length) / avgdl);
        s += idf(term) * (tf * (k1 + 1.0)) / (tf + norm);
    }
    return s;
}

double Bm25Index::score(const std::vector<std::string>& query_terms,
                        const std::string& doc_id) const {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) return 0.0;
    return score_doc(query_terms, it->second);
}

std::vector<std::pair<std::string, double>> Bm25Index::query(
    const std::vector<std::string>& query_terms, size_t k,
    const std::function<bool(const std::string&)>& accept) const {
    // Gather candidate docs from the postings of the query terms only.
    std::map<std::string, char> candidates;
    for (const auto& term : query_terms) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) continue;
        for (const auto& [doc_id, tf] : pit->second) candidates[doc_id] = 1;
    }

    std::vector<std::pair<std::string, double>> scored;
    for (const auto& [doc_id, unused] : candidates) {
        if (accept && !accept(doc_id)) continue;
        double s = score_doc(query_terms, docs_.at(doc_id));
        if (s > 0.0) scored.emplace_back(doc_id, s);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace palace
