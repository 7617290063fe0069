#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "eval.hpp"
#include "models.hpp"

namespace senti {

inline constexpr const char* kVersion = "0.1.0";

struct RunResult {
    uint64_t seed = 0;
    std::vector<int> predictions;  // over the test partition
    double accuracy = 0.0;
};

// One benchmark cell: a (model kind, dim, dataset) triple. Neural kinds get
// one run per seed; deterministic kinds run once with the first seed. A
// failed cell carries its diagnostic instead of aborting the benchmark.
struct BenchCell {
    ModelKind kind = ModelKind::BOW;
    int dim = 0;
    std::string dataset;

    std::vector<RunResult> runs;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<std::vector<int64_t>> confusion;  // summed over runs
    ModelSpec concrete;  // tuned hyperparameters from the first run

    bool failed = false;
    std::string error;
};

struct PairSignificance {
    ModelKind a = ModelKind::BOW;
    ModelKind b = ModelKind::BOW;
    std::vector<double> p_values;
    bool significant = false;
};

// Model-pair significance for one (dataset, dim) column. Single-run kinds
// are broadcast across the run pairing so a 5-run neural model can be
// compared against a deterministic one.
struct SignificanceBlock {
    std::string dataset;
    int dim = 0;
    std::vector<PairSignificance> pairs;
};

struct Chi2Entry {
    std::string a, b;
    bool ok = false;
    double chi2 = 0.0;
    double p = 1.0;
    int df = 0;
    std::string error;  // degenerate-table diagnostic when !ok
};

struct BenchmarkReport {
    std::string config_hash;
    std::vector<uint64_t> seeds;
    std::vector<std::string> datasets;
    std::vector<BenchCell> cells;  // models x dims x datasets, config order
    std::vector<SignificanceBlock> significance;
    std::vector<Chi2Entry> chi_squared;
    std::vector<std::vector<int64_t>> emoticons;  // per dataset, six counts
};

// Loads every configured dataset (path fallback via SENTIBENCH_DATA).
std::vector<DatasetSplit> load_bench_datasets(const BenchConfig& config);

// The concrete spec for one cell: overrides applied, dim and embedding
// source filled in, paths resolved.
ModelSpec cell_spec(const BenchConfig& config, ModelKind kind, int dim);

// Trains and evaluates one cell. Never throws: failures are recorded.
BenchCell run_cell(const BenchConfig& config, ModelKind kind, int dim, const DatasetSplit& data);

// Stable artifact key, e.g. "LSTM_50_opener".
std::string cell_key(ModelKind kind, int dim, const std::string& dataset);

// Cell artifact round-trip for --resume; load returns false when the file
// is missing, unreadable, or was produced under a different config hash.
void save_cell(const BenchCell& cell, const std::string& path, const std::string& config_hash);
bool load_cell(const std::string& path, const std::string& config_hash, BenchCell& cell);

// The full protocol: cells (optionally resumed from out_dir/cells, scheduled
// over `jobs` workers, merged in config order), then significance matrices
// and the emoticon chi-squared table.
BenchmarkReport run_benchmark(const BenchConfig& config, int jobs = 1, bool resume = false);

// Rebuilds the report purely from cached cell artifacts under out_dir/cells;
// errors (naming the cell) when one is missing or from a different config.
BenchmarkReport assemble_report(const BenchConfig& config);

// One line per tested pair: dataset, dim, models, per-run p-values, verdict.
std::string significance_tsv(const BenchmarkReport& report);

// Report renderers. All output is deterministic for a fixed config + seeds.
std::string report_json(const BenchmarkReport& report);
std::string report_csv(const BenchmarkReport& report);
std::string report_markdown(const BenchmarkReport& report);

// Writes report.json / report.csv / report.md / manifest.json / config.cfg /
// cells/*.json / confusion/*.csv under out_dir. Only manifest.json carries a
// timestamp. `dataset_order` preserves config order in the markdown columns.
void write_report_files(const BenchmarkReport& report, const BenchConfig& config);

}  // namespace senti
