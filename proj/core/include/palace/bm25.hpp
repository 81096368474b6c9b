#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace palace {

// Okapi BM25 over an in-memory inverted index. Documents are drawer
// contents tokenized as lowercase unigrams. IDF uses the non-negative
// ln(1 + (N-df+0.5)/(df+0.5)) variant, so scores are always >= 0 and a
// present term scores > 0 even in a single-document corpus.
class Bm25Index {
public:
    static constexpr double k1 = 1.2;
    static constexpr double b = 0.75;

    void add(const std::string& doc_id, const std::string& text);
    bool remove(const std::string& doc_id);
    bool contains(const std::string& doc_id) const { return docs_.count(doc_id) > 0; }
    size_t size() const { return docs_.size(); }

    // BM25 score of one document for the given query terms. Unknown
    // documents and term-free documents score 0.
    double score(const std::vector<std::string>& query_terms, const std::string& doc_id) const;

    // Top documents by descending score (ties by ascending doc_id), scores
    // strictly positive. `accept` restricts the candidate set when given.
    std::vector<std::pair<std::string, double>> query(
        const std::vector<std::string>& query_terms, size_t k,
        const std::function<bool(const std::string&)>& accept = {}) const;

private:
    struct Doc {
        size_t length = 0;  // token count
        std::map<std::string, size_t> tf;
    };

    double idf(const std::string& term) const;
    double score_doc(const std::vector<std::string>& query_terms, const Doc& doc) const;

    std::map<std::string, Doc> docs_;
    std::map<std::string, std::map<std::string, size_t>> postings_;  // term -> doc -> tf
    size_t total_length_ = 0;
};

}  // namespace palace
