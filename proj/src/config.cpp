#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace senti {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    while (!out.empty() && out.back().empty()) out.pop_back();
    for (const auto& item : out) require(!item.empty(), "empty item in list");
    return out;
}

struct Entry {
    int line = 0;
    std::string key;
    std::string value;
};

[[noreturn]] void key_fail(const std::string& origin, const Entry& e, const std::string& what) {
    fail(origin + ":" + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

int64_t parse_int(const std::string& origin, const Entry& e, int64_t lo, int64_t hi) {
    int64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) key_fail(origin, e, "expected an integer, got '" + e.value + "'");
    if (v < lo || v > hi) {
        key_fail(origin, e, "value " + e.value + " out of range [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    }
    return v;
}

uint64_t parse_u64(const std::string& origin, const Entry& e) {
    uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) {
        key_fail(origin, e, "expected an unsigned integer, got '" + e.value + "'");
    }
    return v;
}

double parse_double(const std::string& origin, const Entry& e) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end != e.value.c_str() + e.value.size() || e.value.empty() || errno == ERANGE) {
        key_fail(origin, e, "expected a number, got '" + e.value + "'");
    }
    return v;
}

// Shortest decimal text that round-trips the exact double.
std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc(), "double formatting failed");
    return std::string(buf, p);
}

void apply_model_override(const std::string& origin, const Entry& e, const std::string& field,
                          ModelSpec& spec) {
    if (field == "hidden") {
        spec.hidden = static_cast<int>(parse_int(origin, e, 0, 1 << 20));
    } else if (field == "epochs") {
        spec.epochs = static_cast<int>(parse_int(origin, e, -1, 1 << 20));
    } else if (field == "lambda") {
        spec.lambda = parse_double(origin, e);
    } else if (field == "dropout") {
        spec.dropout = parse_double(origin, e);
        if (spec.dropout < 0.0 || spec.dropout >= 1.0) key_fail(origin, e, "dropout must be in [0, 1)");
    } else if (field == "filters") {
        spec.filters = static_cast<int>(parse_int(origin, e, 1, 1 << 20));
    } else if (field == "iters") {
        spec.retrofit_iterations = static_cast<int>(parse_int(origin, e, 0, 1 << 20));
    } else if (field == "lexicon") {
        spec.lexicon_path = e.value;
    } else if (field == "corpus") {
        spec.distant_corpus_path = e.value;
    } else if (field == "alpha") {
        spec.joint_alpha = parse_double(origin, e);
        if (spec.joint_alpha < 0.0 || spec.joint_alpha > 1.0) key_fail(origin, e, "alpha must be in [0, 1]");
    } else if (field == "window") {
        spec.joint_window = static_cast<int>(parse_int(origin, e, 1, 1 << 20));
        if (spec.joint_window % 2 == 0) key_fail(origin, e, "window must be odd");
    } else if (field == "joint_hidden") {
        spec.joint_hidden = static_cast<int>(parse_int(origin, e, 1, 1 << 20));
    } else if (field == "joint_epochs") {
        spec.joint_epochs = static_cast<int>(parse_int(origin, e, 0, 1 << 20));
    } else if (field == "joint_lr") {
        spec.joint_learning_rate = parse_double(origin, e);
        if (spec.joint_learning_rate <= 0.0) key_fail(origin, e, "learning rate must be positive");
    } else {
        key_fail(origin, e, "unknown model field '" + field + "'");
    }
}

}  // namespace

ModelSpec BenchConfig::spec_for(ModelKind kind) const {
    auto it = model_overrides.find(kind);
    ModelSpec spec = it != model_overrides.end() ? it->second : ModelSpec{};
    spec.kind = kind;
    return spec;
}

BenchConfig parse_config_text(const std::string& text, const std::string& origin) {
    // Pass 1: raw entries (comments stripped, blanks skipped), duplicates rejected.
    std::vector<Entry> entries;
    std::set<std::string> seen;
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string stripped = trim(line);
            if (stripped.empty()) continue;
            const size_t eq = stripped.find('=');
            if (eq == std::string::npos) {
                fail(origin + ":" + std::to_string(lineno) + ": malformed line (expected key = value): '" +
                     stripped + "'");
            }
            Entry e;
            e.line = lineno;
            e.key = trim(stripped.substr(0, eq));
            e.value = trim(stripped.substr(eq + 1));
            if (e.key.empty()) {
                fail(origin + ":" + std::to_string(lineno) + ": malformed line (empty key)");
            }
            if (!seen.insert(e.key).second) {
                fail(origin + ":" + std::to_string(lineno) + ": duplicate key '" + e.key + "'");
            }
            entries.push_back(std::move(e));
        }
    }

    // Pass 2: the list-valued keys that pattern keys refer back to.
    BenchConfig cfg;
    bool have_datasets = false, have_models = false, have_out = false;
    for (const Entry& e : entries) {
        if (e.key == "datasets") {
            for (const auto& name : split_list(e.value)) {
                BenchConfig::Dataset d;
                d.name = name;
                cfg.datasets.push_back(std::move(d));
            }
            if (cfg.datasets.empty()) key_fail(origin, e, "dataset list is empty");
            have_datasets = true;
        } else if (e.key == "models") {
            for (const auto& name : split_list(e.value)) {
                try {
                    cfg.models.push_back(model_kind_from_name(name));
                } catch (const Error&) {
                    key_fail(origin, e, "unknown model kind '" + name + "'");
                }
            }
            if (cfg.models.empty()) key_fail(origin, e, "model list is empty");
            have_models = true;
        } else if (e.key == "dims") {
            cfg.dims.clear();
            for (const auto& item : split_list(e.value)) {
                Entry tmp{e.line, e.key, item};
                cfg.dims.push_back(static_cast<int>(parse_int(origin, tmp, 1, 1 << 20)));
            }
            if (cfg.dims.empty()) key_fail(origin, e, "dim list is empty");
        } else if (e.key == "seeds") {
            cfg.seeds.clear();
            for (const auto& item : split_list(e.value)) {
                Entry tmp{e.line, e.key, item};
                cfg.seeds.push_back(parse_u64(origin, tmp));
            }
            if (cfg.seeds.empty()) key_fail(origin, e, "seed list is empty");
        }
    }

    auto find_dataset = [&](const std::string& name) -> BenchConfig::Dataset* {
        for (auto& d : cfg.datasets) {
            if (d.name == name) return &d;
        }
        return nullptr;
    };

    // Pass 3: everything else, validated against the declared lists.
    for (const Entry& e : entries) {
        if (e.key == "datasets" || e.key == "models" || e.key == "dims" || e.key == "seeds") continue;
        if (e.key == "out") {
            if (e.value.empty()) key_fail(origin, e, "output directory is empty");
            cfg.out_dir = e.value;
            have_out = true;
        } else if (e.key == "significance_iterations") {
            cfg.significance_iterations = static_cast<int>(parse_int(origin, e, 1, 100000000));
        } else if (e.key == "significance_threshold") {
            cfg.significance_threshold = parse_double(origin, e);
            if (cfg.significance_threshold <= 0.0 || cfg.significance_threshold >= 1.0) {
                key_fail(origin, e, "threshold must be in (0, 1)");
            }
        } else if (e.key.rfind("dataset.", 0) == 0) {
            const std::string rest = e.key.substr(8);
            const size_t dot = rest.rfind('.');
            if (dot == std::string::npos) key_fail(origin, e, "expected dataset.<name>.path or .labels");
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            BenchConfig::Dataset* d = find_dataset(name);
            if (d == nullptr) key_fail(origin, e, "references undeclared dataset '" + name + "'");
            if (field == "path") {
                if (e.value.empty()) key_fail(origin, e, "dataset path is empty");
                d->path = e.value;
            } else if (field == "labels") {
                d->labels = static_cast<int>(parse_int(origin, e, 0, 1000));
            } else if (field == "binarize") {
                if (e.value == "true" || e.value == "1") d->binarize = true;
                else if (e.value == "false" || e.value == "0") d->binarize = false;
                else key_fail(origin, e, "expected true or false, got '" + e.value + "'");
            } else {
                key_fail(origin, e, "unknown dataset field '" + field + "'");
            }
        } else if (e.key.rfind("embeddings.", 0) == 0) {
            const std::string dim_text = e.key.substr(11);
            Entry tmp{e.line, e.key, dim_text};
            const int dim = static_cast<int>(parse_int(origin, tmp, 1, 1 << 20));
            if (std::find(cfg.dims.begin(), cfg.dims.end(), dim) == cfg.dims.end()) {
                key_fail(origin, e, "references undeclared dim " + dim_text);
            }
            if (e.value.empty()) key_fail(origin, e, "embeddings path is empty");
            cfg.embeddings[dim] = e.value;
        } else if (e.key.rfind("model.", 0) == 0) {
            const std::string rest = e.key.substr(6);
            const size_t dot = rest.find('.');
            if (dot == std::string::npos) key_fail(origin, e, "expected model.<KIND>.<field>");
            const std::string kind_name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            ModelKind kind;
            try {
                kind = model_kind_from_name(kind_name);
            } catch (const Error&) {
                key_fail(origin, e, "unknown model kind '" + kind_name + "'");
            }
            auto [it, inserted] = cfg.model_overrides.try_emplace(kind);
            if (inserted) it->second.kind = kind;
            apply_model_override(origin, e, field, it->second);
        } else {
            fail(origin + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
    }

    if (!have_datasets) fail(origin + ": missing required key 'datasets'");
    if (!have_models) fail(origin + ": missing required key 'models'");
    if (!have_out) fail(origin + ": missing required key 'out'");
    for (const auto& d : cfg.datasets) {
        if (d.path.empty()) {
            fail(origin + ": missing required key 'dataset." + d.name + ".path'");
        }
    }
    return cfg;
}

BenchConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string serialize_config(const BenchConfig& cfg) {
    std::ostringstream os;
    os << "# sentibench benchmark configuration\n";

    os << "datasets = ";
    for (size_t i = 0; i < cfg.datasets.size(); ++i) {
        if (i) os << ", ";
        os << cfg.datasets[i].name;
    }
    os << '\n';
    for (const auto& d : cfg.datasets) {
        os << "dataset." << d.name << ".path = " << d.path << '\n';
        if (d.labels != 0) os << "dataset." << d.name << ".labels = " << d.labels << '\n';
        if (d.binarize) os << "dataset." << d.name << ".binarize = true\n";
    }

    os << "dims = ";
    for (size_t i = 0; i < cfg.dims.size(); ++i) {
        if (i) os << ", ";
        os << cfg.dims[i];
    }
    os << '\n';
    for (const auto& [dim, path] : cfg.embeddings) {
        os << "embeddings." << dim << " = " << path << '\n';
    }

    os << "models = ";
    for (size_t i = 0; i < cfg.models.size(); ++i) {
        if (i) os << ", ";
        os << model_kind_name(cfg.models[i]);
    }
    os << '\n';

    const ModelSpec def;
    for (const auto& [kind, spec] : cfg.model_overrides) {
        const std::string prefix = std::string("model.") + model_kind_name(kind) + ".";
        if (spec.hidden != def.hidden) os << prefix << "hidden = " << spec.hidden << '\n';
        if (spec.epochs != def.epochs) os << prefix << "epochs = " << spec.epochs << '\n';
        if (spec.lambda != def.lambda) os << prefix << "lambda = " << format_double(spec.lambda) << '\n';
        if (spec.dropout != def.dropout) os << prefix << "dropout = " << format_double(spec.dropout) << '\n';
        if (spec.filters != def.filters) os << prefix << "filters = " << spec.filters << '\n';
        if (spec.retrofit_iterations != def.retrofit_iterations) {
            os << prefix << "iters = " << spec.retrofit_iterations << '\n';
        }
        if (!spec.lexicon_path.empty()) os << prefix << "lexicon = " << spec.lexicon_path << '\n';
        if (!spec.distant_corpus_path.empty()) os << prefix << "corpus = " << spec.distant_corpus_path << '\n';
        if (spec.joint_alpha != def.joint_alpha) os << prefix << "alpha = " << format_double(spec.joint_alpha) << '\n';
        if (spec.joint_window != def.joint_window) os << prefix << "window = " << spec.joint_window << '\n';
        if (spec.joint_hidden != def.joint_hidden) os << prefix << "joint_hidden = " << spec.joint_hidden << '\n';
        if (spec.joint_epochs != def.joint_epochs) os << prefix << "joint_epochs = " << spec.joint_epochs << '\n';
        if (spec.joint_learning_rate != def.joint_learning_rate) {
            os << prefix << "joint_lr = " << format_double(spec.joint_learning_rate) << '\n';
        }
    }

    os << "seeds = ";
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (i) os << ", ";
        os << cfg.seeds[i];
    }
    os << '\n';
    os << "out = " << cfg.out_dir << '\n';
    os << "significance_iterations = " << cfg.significance_iterations << '\n';
    os << "significance_threshold = " << format_double(cfg.significance_threshold) << '\n';
    return os.str();
}

std::string config_hash(const BenchConfig& cfg) {
    const uint64_t h = fnv1a64(serialize_config(cfg));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (path.empty() || fs::path(path).is_absolute() || fs::exists(path)) return path;
    const char* root = std::getenv("SENTIBENCH_DATA");
    if (root != nullptr && *root != '\0') {
        const fs::path candidate = fs::path(root) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

void validate_config(const BenchConfig& cfg) {
    namespace fs = std::filesystem;
    require(!cfg.datasets.empty(), "config lists no datasets");
    require(!cfg.models.empty(), "config lists no models");
    require(!cfg.out_dir.empty(), "config has no output directory");

    for (const auto& d : cfg.datasets) {
        const std::string resolved = resolve_data_path(d.path);
        require(fs::exists(resolved), "dataset '" + d.name + "' path does not exist: " + d.path);
    }
    for (const auto& [dim, path] : cfg.embeddings) {
        const std::string resolved = resolve_data_path(path);
        require(fs::exists(resolved), "embeddings." + std::to_string(dim) +
                                          " path does not exist: " + path);
    }
    bool any_neural = false;
    for (ModelKind kind : cfg.models) {
        any_neural = any_neural || model_kind_is_neural(kind);
        const ModelSpec spec = cfg.spec_for(kind);
        spec.validate();
        if (!spec.lexicon_path.empty()) {
            const std::string resolved = resolve_data_path(spec.lexicon_path);
            require(fs::exists(resolved), std::string("model.") + model_kind_name(kind) +
                                              ".lexicon path does not exist: " + spec.lexicon_path);
        }
        if (!spec.distant_corpus_path.empty()) {
            const std::string resolved = resolve_data_path(spec.distant_corpus_path);
            require(fs::exists(resolved), std::string("model.") + model_kind_name(kind) +
                                              ".corpus path does not exist: " + spec.distant_corpus_path);
        }
    }
    if (any_neural) {
        require(cfg.seeds.size() >= 5, "seed list must have >= 5 entries when neural models are listed");
    }
}

}  // namespace senti
