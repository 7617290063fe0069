#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace senti {

// Single-file container of named tensors: a versioned header followed by
// blocks of (name, shape, little-endian 64-bit floats). Text payloads (word
// lists and the like) ride along as one-byte-per-element tensors so the
// container stays uniform.
struct Checkpoint {
    std::vector<std::pair<std::string, Tensor>> blocks;

    void add(const std::string& name, Tensor t);
    void add_text(const std::string& name, const std::string& text);
    bool has(const std::string& name) const;
    const Tensor& get(const std::string& name) const;  // error when missing
    std::string get_text(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace senti
