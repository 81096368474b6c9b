#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace palace {

enum class DistanceMetric { cosine, l2 };

const char* to_string(DistanceMetric m);
DistanceMetric distance_metric_from_string(const std::string& s);

// On-disk palace configuration (palace.yaml at the palace root). Missing
// keys take defaults; embedding_dim is fixed for the palace's lifetime.
struct PalaceConfig {
    std::string palace_path;
    size_t embedding_dim = 384;
    DistanceMetric distance_metric = DistanceMetric::cosine;
    size_t chunk_size = 800;   // chars (Unicode scalar values)
    size_t chunk_overlap = 100;
    // room name -> keywords, used by the ingest-time room classifier.
    std::map<std::string, std::vector<std::string>> room_keywords;
    // extra names the entity extractor always recognizes
    std::vector<std::string> entity_keywords;
    // optional external embedding service; empty = built-in hash embedder
    std::string embedding_provider_url;
};

// Reads <palace_path>/palace.yaml. An absent or empty file yields all
// defaults. Unparsable YAML or invariant violations (chunk_overlap >=
// chunk_size, bad metric, non-identifier room names) throw
// Error(config).
PalaceConfig load_config(const std::string& palace_path);

// Writes a palace.yaml with the given values (used by `palace init`).
void write_config(const PalaceConfig& config);

}  // namespace palace
