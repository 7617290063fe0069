#include "checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "error.hpp"

namespace senti {

namespace {

constexpr char kMagic[8] = {'S', 'N', 'T', 'B', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    require(in.good(), "checkpoint truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    require(in.good(), "checkpoint truncated");
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

}  // namespace

void Checkpoint::add(const std::string& name, Tensor t) {
    require(!has(name), "duplicate checkpoint block '" + name + "'");
    blocks.emplace_back(name, std::move(t));
}

void Checkpoint::add_text(const std::string& name, const std::string& text) {
    Tensor t({static_cast<int>(text.size())});
    for (size_t i = 0; i < text.size(); ++i) {
        t.data[i] = static_cast<double>(static_cast<unsigned char>(text[i]));
    }
    add(name, std::move(t));
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& [n, _] : blocks) {
        if (n == name) return true;
    }
    return false;
}

const Tensor& Checkpoint::get(const std::string& name) const {
    for (const auto& [n, t] : blocks) {
        if (n == name) return t;
    }
    fail("checkpoint block '" + name + "' not found");
}

std::string Checkpoint::get_text(const std::string& name) const {
    const Tensor& t = get(name);
    std::string s;
    s.reserve(t.data.size());
    for (double d : t.data) s.push_back(static_cast<char>(static_cast<unsigned char>(d)));
    return s;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write checkpoint " + path);
    out.write(kMagic, sizeof kMagic);
    write_u32(out, kVersion);
    write_u32(out, static_cast<uint32_t>(ckpt.blocks.size()));
    for (const auto& [name, tensor] : ckpt.blocks) {
        write_u32(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<uint32_t>(tensor.shape.size()));
        for (int d : tensor.shape) {
            require(d >= 0, "negative tensor dimension");
            write_u32(out, static_cast<uint32_t>(d));
        }
        for (double v : tensor.data) write_f64(out, v);
    }
    require(out.good(), "write failed on checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    require(in.good() && std::memcmp(magic, kMagic, sizeof kMagic) == 0,
            path + " is not a checkpoint file");
    const uint32_t version = read_u32(in);
    require(version == kVersion,
            path + ": unsupported checkpoint version " + std::to_string(version));
    const uint32_t count = read_u32(in);
    Checkpoint ckpt;
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = read_u32(in);
        require(name_len <= 4096, path + ": implausible block name length");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        require(in.good(), "checkpoint truncated");
        const uint32_t ndim = read_u32(in);
        require(ndim <= 8, path + ": implausible tensor rank");
        std::vector<int> shape(ndim);
        for (auto& d : shape) d = static_cast<int>(read_u32(in));
        Tensor t(shape);
        for (auto& v : t.data) v = read_f64(in);
        ckpt.add(name, std::move(t));
    }
    return ckpt;
}

}  // namespace senti
