#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "models.hpp"

namespace senti {

// Benchmark configuration: flat `key = value` lines with `#` comments.
//
// Keys:
//   datasets = name, name, ...            (required)
//   dataset.<name>.path = dir             (required per dataset)
//   dataset.<name>.labels = N             (optional; 0 = infer from the files)
//   dataset.<name>.binarize = true        (optional; 5-label source mapped to
//                                          binary: {0,1}->0, {3,4}->1, 2 dropped)
//   dims = 50, 100                        (default: 50)
//   embeddings.<dim> = vectors.txt        (optional; absent = train skip-gram)
//   models = BOW, AVE, LSTM, ...          (required)
//   model.<KIND>.hidden|epochs|lambda|dropout|filters|iters = value
//   model.<KIND>.lexicon|corpus = path
//   model.<KIND>.alpha|window|joint_hidden|joint_epochs|joint_lr = value
//   seeds = 1, 2, 3, 4, 5                 (default: 1..5)
//   out = dir                             (required)
//   significance_iterations = 10000
//   significance_threshold = 0.01
struct BenchConfig {
    struct Dataset {
        std::string name;
        std::string path;
        int labels = 0;  // 0 = infer
        bool binarize = false;
    };

    std::vector<Dataset> datasets;
    std::vector<int> dims = {50};
    std::vector<ModelKind> models;
    std::map<int, std::string> embeddings;           // dim -> vectors file
    std::map<ModelKind, ModelSpec> model_overrides;  // prototype spec per kind
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir;
    int significance_iterations = 10000;
    double significance_threshold = 0.01;

    // The prototype spec for a kind (overrides applied over defaults).
    ModelSpec spec_for(ModelKind kind) const;
};

// Parses a config file. Errors name the offending key and line number:
// unknown keys, malformed lines, duplicate keys, missing required keys,
// and references to undeclared datasets or dims are all rejected.
BenchConfig parse_config(const std::string& path);

// Same grammar, from an in-memory string; `origin` names the source in errors.
BenchConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical text form; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const BenchConfig& config);

// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const BenchConfig& config);

// Filesystem-level validation: referenced paths exist, seed list covers the
// run protocol (>= 5 seeds when a neural model is listed), RETROFIT has a
// lexicon. Errors name what is missing.
void validate_config(const BenchConfig& config);

// Dataset-root fallback: returns `path` if it exists (or is absolute), else
// $SENTIBENCH_DATA/<path> when that exists, else `path` unchanged.
std::string resolve_data_path(const std::string& path);

}  // namespace senti
