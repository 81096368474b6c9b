#include "palace/chunker.hpp"

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace palace {

size_t chunk_count(size_t len, size_t chunk_size, size_t overlap) {
    if (len <= chunk_size) return 1;
    size_t stride = chunk_size - overlap;
    return 1 + (len - chunk_size + stride - 1) / stride;
}

std::vector<Chunk> chunk_text(const std::string& text, size_t chunk_size, size_t overlap) {
    if (text.empty()) raise(ErrorKind::invalid_input, "chunk_text: text must be non-empty");
    if (overlap >= chunk_size) {
        raise(ErrorKind::invalid_input, "chunk_text: overlap must be smaller than chunk_size");
    }

    auto bounds = util::utf8_boundaries(text);
    size_t len = bounds.size() - 1;
    size_t stride = chunk_size - overlap;

    std::vector<Chunk> chunks;
    chunks.reserve(chunk_count(len, chunk_size, overlap));
    for (size_t start = 0;; start += stride) {
        size_t end = std::min(start + chunk_size, len);
        Chunk c;
        c.start_offset = start;
        c.end_offset = end;
        c.text = text.substr(bounds[start], bounds[end] - bounds[start]);
        chunks.push_back(std::move(c));
        if (end >= len) break;
    }
    return chunks;
}

std::string normalize(const std::string& text) {
    // Pass 1: line endings and per-line trailing whitespace.
    std::string out;
    out.reserve(text.size());
    std::string line;
    auto flush_line = [&](bool with_newline) {
        size_t end = line.size();
        while (end > 0 && (line[end - 1] == ' ' || line[end - 1] == '\t')) end--;
        out.append(line, 0, end);
        if (with_newline) out.push_back('\n');
        line.clear();
    };
    for (size_t i = 0; i < text.size(); i++) {
        char c = text[i];
        if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') i++;
            flush_line(true);
        } else if (c == '\n') {
            flush_line(true);
        } else {
            line.push_back(c);
        }
    }
    if (!line.empty()) flush_line(false);

    // Pass 2: collapse runs of 3+ newlines to exactly 2.
    std::string collapsed;
    collapsed.reserve(out.size());
    size_t i = 0;
    while (i < out.size()) {
        if (out[i] == '\n') {
            size_t j = i;
            while (j < out.size() && out[j] == '\n') j++;
            size_t run = j - i;
            collapsed.append(run >= 3 ? 2 : run, '\n');
            i = j;
        } else {
            collapsed.push_back(out[i]);
            i++;
        }
    }
    return collapsed;
}

}  // namespace palace
