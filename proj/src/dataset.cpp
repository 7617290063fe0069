#include "dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "text.hpp"

namespace senti {

namespace fs = std::filesystem;

LabelScheme LabelScheme::for_num_labels(int n) {
    LabelScheme s;
    s.num_labels = n;
    switch (n) {
        case 2: s.names = {"negative", "positive"}; break;
        case 3: s.names = {"negative", "neutral", "positive"}; break;
        case 4: s.names = {"strong_negative", "negative", "positive", "strong_positive"}; break;
        case 5:
            s.names = {"strong_negative", "negative", "neutral", "positive", "strong_positive"};
            break;
        default: fail("label scheme must have 2..5 labels, got " + std::to_string(n));
    }
    return s;
}

void LabelScheme::validate() const {
    require(num_labels >= 2 && num_labels <= 5,
            "label scheme must have 2..5 labels, got " + std::to_string(num_labels));
    require(names.size() == static_cast<size_t>(num_labels),
            "label scheme has " + std::to_string(names.size()) + " names for " +
                std::to_string(num_labels) + " labels");
}

const std::vector<LabeledExample>& DatasetSplit::partition(const std::string& which) const {
    if (which == "train") return train;
    if (which == "dev") return dev;
    if (which == "test") return test;
    fail("unknown partition '" + which + "' (expected train, dev, or test)");
}

namespace {

std::vector<LabeledExample> load_tsv(const fs::path& file, const LabelScheme& scheme) {
    std::ifstream in(file, std::ios::binary);
    require(in.good(), "cannot open dataset file " + file.string());
    std::vector<LabeledExample> examples;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            fail(file.string() + ":" + std::to_string(lineno) + ": empty line");
        }
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            fail(file.string() + ":" + std::to_string(lineno) + ": missing tab separator");
        }
        const std::string label_str = line.substr(0, tab);
        int label = 0;
        try {
            size_t used = 0;
            label = std::stoi(label_str, &used);
            if (used != label_str.size()) throw std::invalid_argument(label_str);
        } catch (const std::exception&) {
            fail(file.string() + ":" + std::to_string(lineno) + ": label '" + label_str +
                 "' is not an integer");
        }
        if (label < 0 || label >= scheme.num_labels) {
            fail(file.string() + ":" + std::to_string(lineno) + ": label " +
                 std::to_string(label) + " out of range for a " +
                 std::to_string(scheme.num_labels) + "-label scheme");
        }
        LabeledExample ex;
        ex.text = line.substr(tab + 1);
        ex.tokens = tokenize(ex.text);
        if (ex.tokens.empty()) {
            fail(file.string() + ":" + std::to_string(lineno) +
                 ": example tokenizes to nothing");
        }
        ex.label = label;
        examples.push_back(std::move(ex));
    }
    require(!examples.empty(), "dataset file " + file.string() + " is empty");
    return examples;
}

}  // namespace

DatasetSplit load_dataset(const std::string& dir, const LabelScheme& scheme,
                          const std::string& name) {
    scheme.validate();
    const fs::path root(dir);
    require(fs::is_directory(root), "dataset directory not found: " + dir);
    DatasetSplit split;
    split.name = name.empty() ? root.filename().string() : name;
    split.scheme = scheme;
    split.train = load_tsv(root / "train.tsv", scheme);
    split.dev = load_tsv(root / "dev.tsv", scheme);
    split.test = load_tsv(root / "test.tsv", scheme);
    return split;
}

void save_dataset(const DatasetSplit& split, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root);
    const std::pair<const char*, const std::vector<LabeledExample>*> parts[] = {
        {"train.tsv", &split.train}, {"dev.tsv", &split.dev}, {"test.tsv", &split.test}};
    for (const auto& [fname, examples] : parts) {
        std::ofstream out(root / fname, std::ios::binary);
        require(out.good(), "cannot write " + (root / fname).string());
        for (const auto& ex : *examples) {
            out << ex.label << '\t' << ex.text << '\n';
        }
    }
}

int infer_num_labels(const std::string& dir) {
    const fs::path root(dir);
    require(fs::is_directory(root), "dataset directory not found: " + dir);
    int max_label = 0;
    for (const char* fname : {"train.tsv", "dev.tsv", "test.tsv"}) {
        std::ifstream in(root / fname, std::ios::binary);
        require(in.good(), "cannot open dataset file " + (root / fname).string());
        std::string line;
        while (std::getline(in, line)) {
            const size_t tab = line.find('\t');
            if (tab == std::string::npos) continue;
            try {
                max_label = std::max(max_label, std::stoi(line.substr(0, tab)));
            } catch (const std::exception&) {
            }
        }
    }
    return std::max(2, max_label + 1);
}

DatasetSplit sst_to_binary(const DatasetSplit& fine) {
    require(fine.scheme.num_labels == 5,
            "sst_to_binary expects a 5-label split, got " +
                std::to_string(fine.scheme.num_labels));
    DatasetSplit out;
    out.name = fine.name.empty() ? "binary" : fine.name + "-binary";
    out.scheme = LabelScheme::for_num_labels(2);
    const std::pair<const std::vector<LabeledExample>*, std::vector<LabeledExample>*> parts[] = {
        {&fine.train, &out.train}, {&fine.dev, &out.dev}, {&fine.test, &out.test}};
    for (const auto& [src, dst] : parts) {
        for (const auto& ex : *src) {
            if (ex.label == 2) continue;  // neutral examples are dropped
            LabeledExample mapped = ex;
            mapped.label = ex.label < 2 ? 0 : 1;
            dst->push_back(std::move(mapped));
        }
    }
    require(!out.train.empty() && !out.dev.empty() && !out.test.empty(),
            "sst_to_binary left an empty partition (all-neutral input)");
    return out;
}

DatasetStats dataset_stats(const DatasetSplit& split) {
    DatasetStats st;
    st.train_count = split.train.size();
    st.dev_count = split.dev.size();
    st.test_count = split.test.size();
    size_t total_tokens = 0;
    std::set<std::string> vocab;
    for (const auto& ex : split.train) {
        total_tokens += ex.tokens.size();
        vocab.insert(ex.tokens.begin(), ex.tokens.end());
    }
    st.avg_train_tokens =
        split.train.empty() ? 0.0 : static_cast<double>(total_tokens) / split.train.size();
    st.train_vocab_size = vocab.size();
    return st;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int64_t min_count) {
    require(min_count >= 1, "min_count must be >= 1");
    std::unordered_map<std::string, int64_t> counts;
    for (const auto& sentence : corpus) {
        for (const auto& token : sentence) ++counts[token];
    }
    std::vector<std::pair<std::string, int64_t>> kept;
    for (auto& [word, count] : counts) {
        if (count >= min_count) kept.emplace_back(word, count);
    }
    require(!kept.empty(), "vocabulary is empty after min_count filtering");
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary vocab;
    vocab.words.reserve(kept.size());
    vocab.counts.reserve(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
        vocab.words.push_back(kept[i].first);
        vocab.counts.push_back(kept[i].second);
        vocab.index.emplace(kept[i].first, static_cast<int>(i));
    }
    return vocab;
}

}  // namespace senti
