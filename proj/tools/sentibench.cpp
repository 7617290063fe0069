// sentibench command-line front end. Drives the shared library exclusively
// through the public C API; exits nonzero with a diagnostic on stderr when
// any library call fails.
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "sentibench.h"

namespace {

// Prints the library diagnostic for a failed call; returns false for chaining.
bool check(int rc, const std::string& what) {
    if (rc == SB_OK) return true;
    std::cerr << "sentibench: " << what << ": " << sb_error_message() << "\n";
    return false;
}

struct ConfigDeleter {
    void operator()(sb_config* c) const { sb_config_free(c); }
};
struct EmbeddingsDeleter {
    void operator()(sb_embeddings* e) const { sb_embeddings_free(e); }
};
struct DatasetDeleter {
    void operator()(sb_dataset* d) const { sb_dataset_free(d); }
};
struct ReportDeleter {
    void operator()(sb_report* r) const { sb_report_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { sb_string_free(s); }
};

using ConfigPtr = std::unique_ptr<sb_config, ConfigDeleter>;
using EmbeddingsPtr = std::unique_ptr<sb_embeddings, EmbeddingsDeleter>;
using DatasetPtr = std::unique_ptr<sb_dataset, DatasetDeleter>;
using ReportPtr = std::unique_ptr<sb_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Loads + applies the shared --out/--seed overrides; returns null on failure.
ConfigPtr load_config(const std::string& path, const std::string& out_override,
                      unsigned long long seed_override, bool has_seed) {
    sb_config* raw = nullptr;
    if (!check(sb_config_parse(path.c_str(), &raw), "parsing " + path)) return nullptr;
    ConfigPtr cfg(raw);
    if (!out_override.empty() &&
        !check(sb_config_set_out_dir(cfg.get(), out_override.c_str()), "setting output directory")) {
        return nullptr;
    }
    if (has_seed && !check(sb_config_set_base_seed(cfg.get(), seed_override), "setting seeds")) {
        return nullptr;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentibench: sentiment-classification benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sb_version()));

    // ---------------- train-embeddings ----------------
    auto* cmd_emb = app.add_subcommand("train-embeddings",
                                       "Train skip-gram word vectors on a text corpus");
    std::string emb_corpus, emb_out;
    sb_skipgram_options sg{};
    sb_skipgram_options_init(&sg);
    cmd_emb->add_option("--corpus", emb_corpus, "Corpus file, one text per line")->required();
    cmd_emb->add_option("--out", emb_out, "Output vectors file")->required();
    cmd_emb->add_option("--dim", sg.dim, "Vector dimensionality")->capture_default_str();
    cmd_emb->add_option("--window", sg.window, "Max context window")->capture_default_str();
    cmd_emb->add_option("--negatives", sg.negatives, "Negative samples per pair")
        ->capture_default_str();
    cmd_emb->add_option("--iters", sg.iterations, "Passes over the corpus")->capture_default_str();
    cmd_emb->add_option("--min-count", sg.min_count, "Minimum word count")->capture_default_str();
    cmd_emb->add_option("--subsample", sg.subsample, "Frequent-word subsampling threshold")
        ->capture_default_str();
    cmd_emb->add_option("--lr", sg.learning_rate, "Initial learning rate")->capture_default_str();
    cmd_emb->add_option("--seed", sg.seed, "RNG seed")->capture_default_str();
    cmd_emb->callback([&] {
        sb_embeddings* raw = nullptr;
        if (!check(sb_train_skipgram_file(emb_corpus.c_str(), &sg, &raw),
                   "training embeddings on " + emb_corpus)) {
            throw CLI::RuntimeError(1);
        }
        EmbeddingsPtr e(raw);
        if (!check(sb_embeddings_save(e.get(), emb_out.c_str()), "writing " + emb_out)) {
            throw CLI::RuntimeError(1);
        }
    });

    // ---------------- retrofit ----------------
    auto* cmd_retro = app.add_subcommand("retrofit",
                                         "Retrofit word vectors to a lexicon graph");
    std::string retro_emb, retro_lex, retro_out;
    sb_retrofit_options ro{};
    sb_retrofit_options_init(&ro);
    double beta_constant = 1.0;
    cmd_retro->add_option("--embeddings", retro_emb, "Input vectors file")->required();
    cmd_retro->add_option("--lexicon", retro_lex, "Lexicon file, one word pair per line")
        ->required();
    cmd_retro->add_option("--out", retro_out, "Output vectors file")->required();
    cmd_retro->add_option("--iters", ro.iterations, "Coordinate sweeps")->capture_default_str();
    cmd_retro->add_option("--alpha", ro.alpha, "Attachment weight to the original vectors")
        ->capture_default_str();
    auto* beta_opt = cmd_retro->add_option(
        "--beta", beta_constant, "Constant edge weight (default: inverse-degree weights)");
    cmd_retro->callback([&] {
        sb_embeddings* base_raw = nullptr;
        if (!check(sb_embeddings_load(retro_emb.c_str(), &base_raw), "loading " + retro_emb)) {
            throw CLI::RuntimeError(1);
        }
        EmbeddingsPtr base(base_raw);
        if (beta_opt->count() > 0) {
            ro.use_constant_beta = 1;
            ro.beta_constant = beta_constant;
        }
        sb_embeddings* raw = nullptr;
        if (!check(sb_retrofit_file(base.get(), retro_lex.c_str(), &ro, &raw),
                   "retrofitting with " + retro_lex)) {
            throw CLI::RuntimeError(1);
        }
        EmbeddingsPtr result(raw);
        if (!check(sb_embeddings_save(result.get(), retro_out.c_str()), "writing " + retro_out)) {
            throw CLI::RuntimeError(1);
        }
    });

    // ---------------- train-joint ----------------
    auto* cmd_joint = app.add_subcommand(
        "train-joint", "Train sentiment-aware vectors on a distantly labeled corpus");
    std::string joint_corpus, joint_out;
    sb_joint_options jo{};
    sb_joint_options_init(&jo);
    cmd_joint->add_option("--corpus", joint_corpus,
                          "Corpus file, one text per line; polarity from emoticons")
        ->required();
    cmd_joint->add_option("--out", joint_out, "Output vectors file")->required();
    cmd_joint->add_option("--dim", jo.dim, "Vector dimensionality")->capture_default_str();
    cmd_joint->add_option("--window", jo.window, "Context window (odd)")->capture_default_str();
    cmd_joint->add_option("--hidden", jo.hidden, "Hidden layer width")->capture_default_str();
    cmd_joint->add_option("--alpha", jo.alpha, "Syntactic-vs-sentiment mix in [0,1]")
        ->capture_default_str();
    cmd_joint->add_option("--epochs", jo.epochs, "Training epochs")->capture_default_str();
    cmd_joint->add_option("--lr", jo.learning_rate, "Learning rate")->capture_default_str();
    cmd_joint->add_option("--min-count", jo.min_count, "Minimum word count")
        ->capture_default_str();
    cmd_joint->add_option("--seed", jo.seed, "RNG seed")->capture_default_str();
    cmd_joint->callback([&] {
        sb_embeddings* raw = nullptr;
        if (!check(sb_train_joint_file(joint_corpus.c_str(), &jo, &raw),
                   "joint training on " + joint_corpus)) {
            throw CLI::RuntimeError(1);
        }
        EmbeddingsPtr e(raw);
        if (!check(sb_embeddings_save(e.get(), joint_out.c_str()), "writing " + joint_out)) {
            throw CLI::RuntimeError(1);
        }
    });

    // ---------------- benchmark ----------------
    auto* cmd_bench = app.add_subcommand(
        "benchmark", "Run the full benchmark described by a config file");
    std::string bench_config, bench_out;
    int bench_jobs = 1;
    unsigned long long bench_seed = 0;
    bool bench_dry = false, bench_resume = false;
    cmd_bench->add_option("--config", bench_config, "Benchmark config file")->required();
    cmd_bench->add_option("--out", bench_out, "Override the config's output directory");
    cmd_bench->add_option("--jobs", bench_jobs, "Worker pool size")->capture_default_str();
    auto* bench_seed_opt =
        cmd_bench->add_option("--seed", bench_seed, "Base seed: replaces the seed list with "
                                                    "base, base+1, ... of the same length");
    cmd_bench->add_flag("--dry-run", bench_dry, "Validate the config and exit");
    cmd_bench->add_flag("--resume", bench_resume,
                        "Reuse cached cells from an earlier run with the same config");
    cmd_bench->callback([&] {
        ConfigPtr cfg =
            load_config(bench_config, bench_out, bench_seed, bench_seed_opt->count() > 0);
        if (!cfg) throw CLI::RuntimeError(1);
        if (!check(sb_config_validate(cfg.get()), "validating " + bench_config)) {
            throw CLI::RuntimeError(1);
        }
        if (bench_dry) {
            std::cout << "config ok: " << bench_config << "\n";
            return;
        }
        sb_report* raw = nullptr;
        if (!check(sb_run_benchmark(cfg.get(), bench_jobs, bench_resume ? 1 : 0, &raw),
                   "running benchmark")) {
            throw CLI::RuntimeError(1);
        }
        ReportPtr report(raw);
        if (!check(sb_report_write(report.get(), cfg.get()), "writing report files")) {
            throw CLI::RuntimeError(1);
        }
        std::cout << "report written to " << sb_config_out_dir(cfg.get()) << "\n";
    });

    // ---------------- significance ----------------
    auto* cmd_sig = app.add_subcommand(
        "significance", "Print the model-pair significance table from cached benchmark cells");
    std::string sig_config, sig_out;
    cmd_sig->add_option("--config", sig_config, "Benchmark config file")->required();
    cmd_sig->add_option("--out", sig_out, "Override the config's output directory");
    cmd_sig->callback([&] {
        ConfigPtr cfg = load_config(sig_config, sig_out, 0, false);
        if (!cfg) throw CLI::RuntimeError(1);
        sb_report* raw = nullptr;
        if (!check(sb_assemble_report(cfg.get(), &raw), "assembling cached cells")) {
            throw CLI::RuntimeError(1);
        }
        ReportPtr report(raw);
        char* tsv = nullptr;
        if (!check(sb_report_significance_tsv(report.get(), &tsv), "rendering significance")) {
            throw CLI::RuntimeError(1);
        }
        StringPtr owned(tsv);
        std::cout << owned.get();
    });

    // ---------------- chi2 ----------------
    auto* cmd_chi = app.add_subcommand(
        "chi2", "Chi-squared emoticon-distribution test between two datasets");
    std::string chi_a, chi_b;
    int chi_labels_a = 0, chi_labels_b = 0;
    cmd_chi->add_option("--a", chi_a, "First dataset directory")->required();
    cmd_chi->add_option("--b", chi_b, "Second dataset directory")->required();
    cmd_chi->add_option("--labels-a", chi_labels_a, "Label count of A (0 = infer)")
        ->capture_default_str();
    cmd_chi->add_option("--labels-b", chi_labels_b, "Label count of B (0 = infer)")
        ->capture_default_str();
    cmd_chi->callback([&] {
        sb_dataset *raw_a = nullptr, *raw_b = nullptr;
        if (!check(sb_dataset_load(chi_a.c_str(), chi_labels_a, "a", 0, &raw_a),
                   "loading " + chi_a)) {
            throw CLI::RuntimeError(1);
        }
        DatasetPtr a(raw_a);
        if (!check(sb_dataset_load(chi_b.c_str(), chi_labels_b, "b", 0, &raw_b),
                   "loading " + chi_b)) {
            throw CLI::RuntimeError(1);
        }
        DatasetPtr b(raw_b);
        double chi2 = 0.0, p = 1.0;
        int df = 0;
        if (!check(sb_chi_squared_emoticons(a.get(), b.get(), &chi2, &df, &p),
                   "chi-squared test")) {
            throw CLI::RuntimeError(1);
        }
        std::printf("%.6g\t%d\t%.6g\n", chi2, df, p);
    });

    // ---------------- report ----------------
    auto* cmd_report = app.add_subcommand(
        "report", "Rebuild the report files from cached benchmark cells (no training)");
    std::string rep_config, rep_out;
    cmd_report->add_option("--config", rep_config, "Benchmark config file")->required();
    cmd_report->add_option("--out", rep_out, "Override the config's output directory");
    cmd_report->callback([&] {
        ConfigPtr cfg = load_config(rep_config, rep_out, 0, false);
        if (!cfg) throw CLI::RuntimeError(1);
        sb_report* raw = nullptr;
        if (!check(sb_assemble_report(cfg.get(), &raw), "assembling cached cells")) {
            throw CLI::RuntimeError(1);
        }
        ReportPtr report(raw);
        if (!check(sb_report_write(report.get(), cfg.get()), "writing report files")) {
            throw CLI::RuntimeError(1);
        }
        std::cout << "report written to " << sb_config_out_dir(cfg.get()) << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
