#include "benchmark.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace senti {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot open " + path + " for writing");
    out << content;
    out.flush();
    require(out.good(), "failed writing " + path);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string percent(double accuracy_fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * accuracy_fraction);
    return buf;
}

}  // namespace

std::vector<DatasetSplit> load_bench_datasets(const BenchConfig& config) {
    std::vector<DatasetSplit> out;
    out.reserve(config.datasets.size());
    for (const auto& d : config.datasets) {
        const std::string dir = resolve_data_path(d.path);
        const int labels = d.labels > 0 ? d.labels : infer_num_labels(dir);
        DatasetSplit split = load_dataset(dir, LabelScheme::for_num_labels(labels), d.name);
        if (d.binarize) split = sst_to_binary(split);
        out.push_back(std::move(split));
    }
    return out;
}

ModelSpec cell_spec(const BenchConfig& config, ModelKind kind, int dim) {
    ModelSpec spec = config.spec_for(kind);
    spec.dim = dim;
    auto it = config.embeddings.find(dim);
    spec.embeddings_path = it != config.embeddings.end() ? resolve_data_path(it->second) : "";
    if (!spec.lexicon_path.empty()) spec.lexicon_path = resolve_data_path(spec.lexicon_path);
    if (!spec.distant_corpus_path.empty()) {
        spec.distant_corpus_path = resolve_data_path(spec.distant_corpus_path);
    }
    return spec;
}

std::string cell_key(ModelKind kind, int dim, const std::string& dataset) {
    return std::string(model_kind_name(kind)) + "_" + std::to_string(dim) + "_" + dataset;
}

BenchCell run_cell(const BenchConfig& config, ModelKind kind, int dim, const DatasetSplit& data) {
    BenchCell cell;
    cell.kind = kind;
    cell.dim = dim;
    cell.dataset = data.name;
    try {
        require(!config.seeds.empty(), "benchmark needs at least one seed");
        ModelSpec spec = cell_spec(config, kind, dim);
        const std::vector<uint64_t> seeds = model_kind_is_neural(kind)
                                                ? config.seeds
                                                : std::vector<uint64_t>{config.seeds.front()};
        std::vector<int> gold;
        gold.reserve(data.test.size());
        for (const auto& ex : data.test) gold.push_back(ex.label);

        std::vector<double> accuracies;
        for (size_t s = 0; s < seeds.size(); ++s) {
            spec.seed = seeds[s];
            const TrainedModel model = train_sentiment_model(spec, data);
            RunResult run;
            run.seed = seeds[s];
            run.predictions = predict_labels(model, data.test);
            run.accuracy = accuracy(gold, run.predictions);
            if (s == 0) cell.concrete = model.spec;
            accuracies.push_back(run.accuracy);

            const auto cm = confusion_matrix(gold, run.predictions, data.scheme.num_labels);
            if (cell.confusion.empty()) {
                cell.confusion = cm;
            } else {
                for (size_t i = 0; i < cm.size(); ++i) {
                    for (size_t j = 0; j < cm[i].size(); ++j) cell.confusion[i][j] += cm[i][j];
                }
            }
            cell.runs.push_back(std::move(run));
        }
        const RunStats stats = run_stats(accuracies);
        cell.mean = stats.mean;
        cell.stddev = stats.stddev;
    } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
        cell.runs.clear();
        cell.confusion.clear();
        cell.mean = 0.0;
        cell.stddev = 0.0;
    }
    return cell;
}

// ---------------------------------------------------------------------------
// Cell artifacts
// ---------------------------------------------------------------------------

namespace {

json cell_to_json(const BenchCell& cell, const std::string& config_hash) {
    json j;
    j["model"] = model_kind_name(cell.kind);
    j["dim"] = cell.dim;
    j["dataset"] = cell.dataset;
    j["config_hash"] = config_hash;
    j["failed"] = cell.failed;
    j["error"] = cell.error;
    j["mean"] = cell.mean;
    j["stddev"] = cell.stddev;
    j["hidden"] = cell.concrete.hidden;
    j["epochs"] = cell.concrete.epochs;
    j["lambda"] = cell.concrete.lambda;
    json runs = json::array();
    for (const auto& r : cell.runs) {
        json jr;
        jr["seed"] = r.seed;
        jr["accuracy"] = r.accuracy;
        jr["predictions"] = r.predictions;
        runs.push_back(std::move(jr));
    }
    j["runs"] = std::move(runs);
    j["confusion"] = cell.confusion;
    return j;
}

BenchCell cell_from_json(const json& j) {
    BenchCell cell;
    cell.kind = model_kind_from_name(j.at("model").get<std::string>());
    cell.dim = j.at("dim").get<int>();
    cell.dataset = j.at("dataset").get<std::string>();
    cell.failed = j.at("failed").get<bool>();
    cell.error = j.at("error").get<std::string>();
    cell.mean = j.at("mean").get<double>();
    cell.stddev = j.at("stddev").get<double>();
    cell.concrete.kind = cell.kind;
    cell.concrete.dim = cell.dim;
    cell.concrete.hidden = j.at("hidden").get<int>();
    cell.concrete.epochs = j.at("epochs").get<int>();
    cell.concrete.lambda = j.at("lambda").get<double>();
    for (const auto& jr : j.at("runs")) {
        RunResult r;
        r.seed = jr.at("seed").get<uint64_t>();
        r.accuracy = jr.at("accuracy").get<double>();
        r.predictions = jr.at("predictions").get<std::vector<int>>();
        cell.runs.push_back(std::move(r));
    }
    cell.confusion = j.at("confusion").get<std::vector<std::vector<int64_t>>>();
    return cell;
}

}  // namespace

void save_cell(const BenchCell& cell, const std::string& path, const std::string& config_hash) {
    write_text_file(path, cell_to_json(cell, config_hash).dump(2) + "\n");
}

bool load_cell(const std::string& path, const std::string& config_hash, BenchCell& cell) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) return false;
    try {
        const json j = json::parse(in);
        if (j.at("config_hash").get<std::string>() != config_hash) return false;
        cell = cell_from_json(j);
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// The benchmark protocol
// ---------------------------------------------------------------------------

namespace {

struct Task {
    ModelKind kind;
    int dim;
    size_t dataset;
};

std::vector<Task> task_list(const BenchConfig& config, size_t num_datasets) {
    std::vector<Task> tasks;
    for (ModelKind kind : config.models) {
        for (int dim : config.dims) {
            for (size_t d = 0; d < num_datasets; ++d) tasks.push_back({kind, dim, d});
        }
    }
    return tasks;
}

// Significance matrices, emoticon counts, and the pairwise chi-squared table,
// computed from finished cells. The randomization seed is derived from the
// pair key so the result is independent of scheduling order.
void finish_report(const BenchConfig& config, const std::vector<DatasetSplit>& datasets,
                   const std::vector<Task>& tasks, BenchmarkReport& report) {
    auto find_cell = [&](ModelKind kind, int dim, size_t d) -> const BenchCell* {
        for (size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].kind == kind && tasks[i].dim == dim && tasks[i].dataset == d) {
                return &report.cells[i];
            }
        }
        return nullptr;
    };
    for (size_t d = 0; d < datasets.size(); ++d) {
        std::vector<int> gold;
        for (const auto& ex : datasets[d].test) gold.push_back(ex.label);
        for (int dim : config.dims) {
            SignificanceBlock block;
            block.dataset = datasets[d].name;
            block.dim = dim;
            for (size_t a = 0; a < config.models.size(); ++a) {
                for (size_t b = a + 1; b < config.models.size(); ++b) {
                    const BenchCell* ca = find_cell(config.models[a], dim, d);
                    const BenchCell* cb = find_cell(config.models[b], dim, d);
                    if (ca == nullptr || cb == nullptr || ca->failed || cb->failed) continue;
                    if (ca->runs.empty() || cb->runs.empty()) continue;
                    const size_t n = std::max(ca->runs.size(), cb->runs.size());
                    std::vector<std::vector<int>> pa, pb;
                    for (size_t i = 0; i < n; ++i) {
                        pa.push_back(ca->runs[i % ca->runs.size()].predictions);
                        pb.push_back(cb->runs[i % cb->runs.size()].predictions);
                    }
                    const std::string pair_key = cell_key(ca->kind, dim, block.dataset) + "|" +
                                                 cell_key(cb->kind, dim, block.dataset);
                    const SignificanceResult res =
                        runs_significance(pa, pb, gold, config.significance_iterations,
                                          fnv1a64(pair_key), config.significance_threshold);
                    PairSignificance pair;
                    pair.a = ca->kind;
                    pair.b = cb->kind;
                    pair.p_values = res.p_values;
                    pair.significant = res.significant;
                    block.pairs.push_back(std::move(pair));
                }
            }
            report.significance.push_back(std::move(block));
        }
    }

    // Emoticon distribution analysis over dataset pairs.
    for (const auto& ds : datasets) report.emoticons.push_back(emoticon_counts(ds));
    for (size_t i = 0; i < datasets.size(); ++i) {
        for (size_t j = i + 1; j < datasets.size(); ++j) {
            Chi2Entry entry;
            entry.a = datasets[i].name;
            entry.b = datasets[j].name;
            try {
                const ChiSquaredResult res = chi_squared_emoticons(datasets[i], datasets[j]);
                entry.ok = true;
                entry.chi2 = res.chi2;
                entry.p = res.p;
                entry.df = res.df;
            } catch (const std::exception& e) {
                entry.ok = false;
                entry.error = e.what();
            }
            report.chi_squared.push_back(std::move(entry));
        }
    }
}

}  // namespace

BenchmarkReport run_benchmark(const BenchConfig& config, int jobs, bool resume) {
    require(!config.seeds.empty(), "benchmark needs at least one seed");
    const std::vector<DatasetSplit> datasets = load_bench_datasets(config);

    BenchmarkReport report;
    report.config_hash = config_hash(config);
    report.seeds = config.seeds;
    for (const auto& d : datasets) report.datasets.push_back(d.name);

    const std::vector<Task> tasks = task_list(config, datasets.size());
    report.cells.resize(tasks.size());

    const fs::path cells_dir = fs::path(config.out_dir) / "cells";
    if (!config.out_dir.empty()) fs::create_directories(cells_dir);
    auto cell_path = [&](const Task& t) {
        return (cells_dir / (cell_key(t.kind, t.dim, datasets[t.dataset].name) + ".json")).string();
    };

    std::vector<size_t> pending;
    for (size_t i = 0; i < tasks.size(); ++i) {
        BenchCell cached;
        if (resume && load_cell(cell_path(tasks[i]), report.config_hash, cached) && !cached.failed) {
            report.cells[i] = std::move(cached);
        } else {
            pending.push_back(i);
        }
    }

    auto compute = [&](size_t i) {
        const Task& t = tasks[i];
        report.cells[i] = run_cell(config, t.kind, t.dim, datasets[t.dataset]);
        if (!config.out_dir.empty()) {
            save_cell(report.cells[i], cell_path(t), report.config_hash);
        }
    };

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(pending.size())));
    if (workers <= 1) {
        for (size_t i : pending) compute(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t k = next.fetch_add(1); k < pending.size(); k = next.fetch_add(1)) {
                    compute(pending[k]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    finish_report(config, datasets, tasks, report);
    return report;
}

BenchmarkReport assemble_report(const BenchConfig& config) {
    require(!config.out_dir.empty(), "config has no output directory");
    const std::vector<DatasetSplit> datasets = load_bench_datasets(config);

    BenchmarkReport report;
    report.config_hash = config_hash(config);
    report.seeds = config.seeds;
    for (const auto& d : datasets) report.datasets.push_back(d.name);

    const std::vector<Task> tasks = task_list(config, datasets.size());
    report.cells.resize(tasks.size());

    const fs::path cells_dir = fs::path(config.out_dir) / "cells";
    for (size_t i = 0; i < tasks.size(); ++i) {
        const std::string key =
            cell_key(tasks[i].kind, tasks[i].dim, datasets[tasks[i].dataset].name);
        const std::string path = (cells_dir / (key + ".json")).string();
        require(load_cell(path, report.config_hash, report.cells[i]),
                "no usable cached cell '" + key + "' under " + cells_dir.string() +
                    " (missing, unreadable, or from a different config)");
    }
    finish_report(config, datasets, tasks, report);
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

// Rows of the accuracy table: one per (model, dim), cells per dataset.
struct Row {
    ModelKind kind;
    int dim;
    std::vector<const BenchCell*> cells;  // dataset order; may contain failed
    bool complete = true;
    double macro = 0.0;
};

std::vector<Row> table_rows(const BenchmarkReport& report) {
    std::vector<Row> rows;
    for (const auto& cell : report.cells) {
        Row* row = nullptr;
        for (auto& r : rows) {
            if (r.kind == cell.kind && r.dim == cell.dim) {
                row = &r;
                break;
            }
        }
        if (row == nullptr) {
            rows.push_back(Row{cell.kind, cell.dim, {}, true, 0.0});
            row = &rows.back();
        }
        row->cells.push_back(&cell);
    }
    for (auto& row : rows) {
        double sum = 0.0;
        for (const BenchCell* c : row.cells) {
            if (c->failed) row.complete = false;
            else sum += c->mean;
        }
        if (row.complete && !row.cells.empty()) row.macro = sum / row.cells.size();
    }
    return rows;
}

}  // namespace

std::string report_json(const BenchmarkReport& report) {
    json j;
    j["version"] = kVersion;
    j["config_hash"] = report.config_hash;
    j["seeds"] = report.seeds;
    j["datasets"] = report.datasets;

    json cells = json::array();
    for (const auto& cell : report.cells) {
        cells.push_back(cell_to_json(cell, report.config_hash));
    }
    j["cells"] = std::move(cells);

    json rows = json::array();
    for (const auto& row : table_rows(report)) {
        json jr;
        jr["model"] = model_kind_name(row.kind);
        jr["dim"] = row.dim;
        if (row.complete) jr["macro_avg"] = row.macro;
        else jr["macro_avg"] = nullptr;
        rows.push_back(std::move(jr));
    }
    j["macro_averages"] = std::move(rows);

    json sig = json::array();
    for (const auto& block : report.significance) {
        json jb;
        jb["dataset"] = block.dataset;
        jb["dim"] = block.dim;
        json pairs = json::array();
        for (const auto& p : block.pairs) {
            json jp;
            jp["a"] = model_kind_name(p.a);
            jp["b"] = model_kind_name(p.b);
            jp["p_values"] = p.p_values;
            jp["significant"] = p.significant;
            pairs.push_back(std::move(jp));
        }
        jb["pairs"] = std::move(pairs);
        sig.push_back(std::move(jb));
    }
    j["significance"] = std::move(sig);

    json chi = json::array();
    for (const auto& e : report.chi_squared) {
        json je;
        je["a"] = e.a;
        je["b"] = e.b;
        if (e.ok) {
            je["chi2"] = e.chi2;
            je["df"] = e.df;
            je["p"] = e.p;
        } else {
            je["error"] = e.error;
        }
        chi.push_back(std::move(je));
    }
    j["chi_squared"] = std::move(chi);

    json emo = json::object();
    for (size_t d = 0; d < report.datasets.size(); ++d) {
        emo[report.datasets[d]] = report.emoticons[d];
    }
    j["emoticon_counts"] = std::move(emo);
    return j.dump(2) + "\n";
}

std::string report_csv(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "model,dim,dataset,mean_accuracy,std_accuracy,runs,failed,error\n";
    for (const auto& cell : report.cells) {
        char mean_buf[32], std_buf[32];
        std::snprintf(mean_buf, sizeof(mean_buf), "%.6f", cell.mean);
        std::snprintf(std_buf, sizeof(std_buf), "%.6f", cell.stddev);
        os << model_kind_name(cell.kind) << ',' << cell.dim << ',' << csv_escape(cell.dataset)
           << ',' << (cell.failed ? "" : mean_buf) << ',' << (cell.failed ? "" : std_buf) << ','
           << cell.runs.size() << ',' << (cell.failed ? "true" : "false") << ','
           << csv_escape(cell.error) << '\n';
    }
    return os.str();
}

std::string report_markdown(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "# Benchmark results\n\n";
    os << "Accuracy (%) on the test sets; neural rows are mean +/-std over " << report.seeds.size()
       << " seeded runs.\n\n";
    os << "| Model | Dim |";
    for (const auto& d : report.datasets) os << ' ' << d << " |";
    os << " Macro-Avg. |\n";
    os << "|---|---|";
    for (size_t i = 0; i < report.datasets.size(); ++i) os << "---|";
    os << "---|\n";
    for (const auto& row : table_rows(report)) {
        os << "| " << model_kind_name(row.kind) << " | " << row.dim << " |";
        for (const BenchCell* c : row.cells) {
            if (c->failed) {
                os << " failed |";
            } else if (c->runs.size() > 1) {
                os << ' ' << percent(c->mean) << " +/-" << percent(c->stddev) << " |";
            } else {
                os << ' ' << percent(c->mean) << " |";
            }
        }
        if (row.complete) os << ' ' << percent(row.macro) << " |";
        else os << " - |";
        os << '\n';
    }

    os << "\n## Emoticon distribution (chi-squared)\n\n";
    os << "| Dataset A | Dataset B | chi2 | df | p |\n|---|---|---|---|---|\n";
    for (const auto& e : report.chi_squared) {
        os << "| " << e.a << " | " << e.b << " | ";
        if (e.ok) {
            char chi_buf[32], p_buf[32];
            std::snprintf(chi_buf, sizeof(chi_buf), "%.3f", e.chi2);
            std::snprintf(p_buf, sizeof(p_buf), "%.3f", e.p);
            os << chi_buf << " | " << e.df << " | " << p_buf << " |\n";
        } else {
            os << "degenerate | - | - |\n";
        }
    }
    return os.str();
}

std::string significance_tsv(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "dataset\tdim\tmodel_a\tmodel_b\tp_values\tsignificant\n";
    for (const auto& block : report.significance) {
        for (const auto& pair : block.pairs) {
            os << block.dataset << '\t' << block.dim << '\t' << model_kind_name(pair.a) << '\t'
               << model_kind_name(pair.b) << '\t';
            for (size_t i = 0; i < pair.p_values.size(); ++i) {
                if (i) os << ',';
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.6g", pair.p_values[i]);
                os << buf;
            }
            os << '\t' << (pair.significant ? "true" : "false") << '\n';
        }
    }
    return os.str();
}

void write_report_files(const BenchmarkReport& report, const BenchConfig& config) {
    require(!config.out_dir.empty(), "config has no output directory");
    const fs::path out(config.out_dir);
    fs::create_directories(out / "cells");
    fs::create_directories(out / "confusion");

    write_text_file((out / "report.json").string(), report_json(report));
    write_text_file((out / "report.csv").string(), report_csv(report));
    write_text_file((out / "report.md").string(), report_markdown(report));
    write_text_file((out / "config.cfg").string(), serialize_config(config));

    json manifest;
    manifest["version"] = kVersion;
    manifest["config_hash"] = report.config_hash;
    manifest["seeds"] = report.seeds;
    char stamp[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    manifest["generated_at"] = stamp;
    write_text_file((out / "manifest.json").string(), manifest.dump(2) + "\n");

    for (const auto& cell : report.cells) {
        const std::string key = cell_key(cell.kind, cell.dim, cell.dataset);
        save_cell(cell, (out / "cells" / (key + ".json")).string(), report.config_hash);
        if (!cell.failed && !cell.confusion.empty()) {
            std::ostringstream cm;
            for (const auto& row : cell.confusion) {
                for (size_t j = 0; j < row.size(); ++j) {
                    if (j) cm << ',';
                    cm << row[j];
                }
                cm << '\n';
            }
            write_text_file((out / "confusion" / (key + ".csv")).string(), cm.str());
        }
    }
}

}  // namespace senti
