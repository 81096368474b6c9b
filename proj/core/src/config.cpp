#include "palace/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace fs = std::filesystem;

namespace palace {

const char* to_string(DistanceMetric m) {
    return m == DistanceMetric::cosine ? "cosine" : "l2";
}

DistanceMetric distance_metric_from_string(const std::string& s) {
    if (s == "cosine") return DistanceMetric::cosine;
    if (s == "l2") return DistanceMetric::l2;
    raise(ErrorKind::config, "distance_metric must be 'cosine' or 'l2', got '" + s + "'");
}

namespace {

void validate(const PalaceConfig& c) {
    if (c.embedding_dim == 0) raise(ErrorKind::config, "embedding_dim must be positive");
    if (c.chunk_size == 0) raise(ErrorKind::config, "chunk_size must be positive");
    if (c.chunk_overlap >= c.chunk_size) {
        raise(ErrorKind::config, "chunk_overlap (" + std::to_string(c.chunk_overlap) +
                                     ") must be smaller than chunk_size (" +
                                     std::to_string(c.chunk_size) + ")");
    }
    for (const auto& [room, keywords] : c.room_keywords) {
        if (!util::is_identifier(room)) {
            raise(ErrorKind::config, "room_keywords key '" + room + "' is not a valid room identifier");
        }
        (void)keywords;
    }
}

}  // namespace

PalaceConfig load_config(const std::string& palace_path) {
    if (!fs::exists(palace_path)) {
        raise(ErrorKind::not_found, "palace path does not exist: " + palace_path);
    }
    PalaceConfig config;
    config.palace_path = palace_path;

    fs::path file = fs::path(palace_path) / "palace.yaml";
    if (fs::exists(file)) {
        YAML::Node root;
        try {
            root = YAML::LoadFile(file.string());
        } catch (const YAML::Exception& e) {
            raise(ErrorKind::config, "cannot parse " + file.string() + ": " + e.what());
        }
        try {
            if (root["embedding_dim"]) config.embedding_dim = root["embedding_dim"].as<size_t>();
            if (root["distance_metric"]) {
                config.distance_metric =
                    distance_metric_from_string(root["distance_metric"].as<std::string>());
            }
            if (root["chunk_size"]) config.chunk_size = root["chunk_size"].as<size_t>();
            if (root["chunk_overlap"]) config.chunk_overlap = root["chunk_overlap"].as<size_t>();
            if (root["room_keywords"]) {
                for (const auto& it : root["room_keywords"]) {
                    auto room = it.first.as<std::string>();
                    std::vector<std::string> words;
                    for (const auto& w : it.second) words.push_back(util::to_lower(w.as<std::string>()));
                    config.room_keywords[room] = std::move(words);
                }
            }
            if (root["entity_keywords"]) {
                for (const auto& w : root["entity_keywords"]) {
                    config.entity_keywords.push_back(w.as<std::string>());
                }
            }
            if (root["embedding_provider_url"]) {
                config.embedding_provider_url = root["embedding_provider_url"].as<std::string>();
            }
        } catch (const YAML::Exception& e) {
            raise(ErrorKind::config, "bad value in " + file.string() + ": " + e.what());
        }
    }

    validate(config);
    return config;
}

void write_config(const PalaceConfig& config) {
    validate(config);
    fs::path file = fs::path(config.palace_path) / "palace.yaml";
    std::ofstream out(file);
    if (!out) raise(ErrorKind::io, "cannot write " + file.string());
    out << "embedding_dim: " << config.embedding_dim << "\n";
    out << "distance_metric: " << to_string(config.distance_metric) << "\n";
    out << "chunk_size: " << config.chunk_size << "\n";
    out << "chunk_overlap: " << config.chunk_overlap << "\n";
    if (!config.room_keywords.empty()) {
        out << "room_keywords:\n";
        for (const auto& [room, keywords] : config.room_keywords) {
            out << "  " << room << ": [";
            for (size_t i = 0; i < keywords.size(); i++) {
                if (i) out << ", ";
                out << keywords[i];
            }
            out << "]\n";
        }
    }
    if (!config.entity_keywords.empty()) {
        out << "entity_keywords: [";
        for (size_t i = 0; i < config.entity_keywords.size(); i++) {
            if (i) out << ", ";
            out << config.entity_keywords[i];
        }
        out << "]\n";
    }
    if (!config.embedding_provider_url.empty()) {
        out << "embedding_provider_url: " << config.embedding_provider_url << "\n";
    }
}

}  // namespace palace
