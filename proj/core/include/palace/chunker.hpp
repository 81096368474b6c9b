#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace palace {

// One slice of a source text. Offsets are Unicode scalar indexes into the
// text passed to chunk_text, end exclusive.
struct Chunk {
    std::string text;
    size_t start_offset = 0;
    size_t end_offset = 0;
};

// Sliding-window chunking: chunk i spans
//   [i*(chunk_size-overlap), min(i*(chunk_size-overlap)+chunk_size, len)).
// Consecutive chunks overlap by exactly `overlap` scalars; the final chunk
// may be shorter. Throws Error(invalid_input) on empty text or
// overlap >= chunk_size.
std::vector<Chunk> chunk_text(const std::string& text, size_t chunk_size, size_t overlap);

// Number of chunks chunk_text produces for a text of `len` scalars:
// 1 if len <= chunk_size, else 1 + ceil((len-chunk_size)/(chunk_size-overlap)).
size_t chunk_count(size_t len, size_t chunk_size, size_t overlap);

// Pre-chunking cleanup: CRLF/CR -> LF, trailing whitespace stripped per
// line, runs of 3+ newlines collapsed to 2. Never applied to stored
// conversation exchanges.
std::string normalize(const std::string& text);

}  // namespace palace
