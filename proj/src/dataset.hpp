#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace senti {

// Label indices run most-negative to most-positive. The canonical name lists
// follow the annotation schemes of the shipped benchmarks.
struct LabelScheme {
    int num_labels = 2;
    std::vector<std::string> names;

    static LabelScheme for_num_labels(int n);
    void validate() const;
};

struct LabeledExample {
    std::string text;
    std::vector<std::string> tokens;  // tokenize(text), never empty once loaded
    int label = 0;
};

// One benchmark dataset: three non-empty partitions under a single scheme.
struct DatasetSplit {
    std::string name;
    LabelScheme scheme;
    std::vector<LabeledExample> train, dev, test;

    const std::vector<LabeledExample>& partition(const std::string& which) const;
};

struct DatasetStats {
    size_t train_count = 0, dev_count = 0, test_count = 0;
    double avg_train_tokens = 0.0;  // mean token count over training examples
    size_t train_vocab_size = 0;    // distinct tokens in the training partition
};

// Word <-> contiguous index bijection with per-word counts. Index order is
// descending count, ties broken lexicographically.
struct Vocabulary {
    std::vector<std::string> words;
    std::vector<int64_t> counts;
    std::unordered_map<std::string, int> index;

    size_t size() const { return words.size(); }
    bool contains(const std::string& w) const { return index.count(w) != 0; }
    // -1 when absent.
    int id(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }
};

// Reads train.tsv/dev.tsv/test.tsv from `dir`. Each line is
// `label<TAB>text`, UTF-8, LF line ends, no header. Labels are validated
// against the scheme; malformed lines and examples that tokenize to nothing
// are load errors naming the file and line.
DatasetSplit load_dataset(const std::string& dir, const LabelScheme& scheme,
                          const std::string& name = "");

// Writes the three partitions back in the same TSV container format.
void save_dataset(const DatasetSplit& split, const std::string& dir);

// Largest label found in the directory's files plus one (minimum 2); used
// when the caller does not know the annotation scheme.
int infer_num_labels(const std::string& dir);

// Maps a 5-label split to binary: {0,1} -> 0, {3,4} -> 1, label-2 examples
// dropped. Errors if the input is not 5-label or a partition becomes empty.
DatasetSplit sst_to_binary(const DatasetSplit& fine);

DatasetStats dataset_stats(const DatasetSplit& split);

// Words with count >= min_count over the corpus, ordered by descending count
// then lexicographically. Errors if the result would be empty.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                            int64_t min_count);

}  // namespace senti
