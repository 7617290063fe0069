#include "sentibench.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "benchmark.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "embeddings.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "joint.hpp"
#include "models.hpp"
#include "retrofit.hpp"
#include "text.hpp"

using namespace senti;

struct sb_embeddings {
    EmbeddingMatrix m;
};
struct sb_dataset {
    DatasetSplit d;
};
struct sb_model {
    TrainedModel m;
};
struct sb_config {
    BenchConfig c;
};
struct sb_report {
    BenchmarkReport r;
};

namespace {

thread_local std::string g_error = "no error";

int set_error(int code, const std::string& message) {
    g_error = message;
    return code;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        return set_error(SB_ERR_FAILURE, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(SB_ERR_NO_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return set_error(SB_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(SB_ERR_INTERNAL, "unknown internal error");
    }
}

int require_arg(bool ok, const char* what) {
    if (ok) return SB_OK;
    return set_error(SB_ERR_INVALID_ARGUMENT, std::string("invalid argument: ") + what);
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const std::vector<LabeledExample>* partition_of(const DatasetSplit& d, const char* partition) {
    const std::string p = partition;
    if (p == "train") return &d.train;
    if (p == "dev") return &d.dev;
    if (p == "test") return &d.test;
    return nullptr;
}

}  // namespace

extern "C" {

const char* sb_error_message(void) { return g_error.c_str(); }

const char* sb_version(void) { return kVersion; }

void sb_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ */
/* Embeddings                                                          */
/* ------------------------------------------------------------------ */

void sb_skipgram_options_init(sb_skipgram_options* options) {
    if (options == nullptr) return;
    const SkipgramConfig def;
    options->dim = def.dim;
    options->window = def.window;
    options->negatives = def.negatives;
    options->iterations = def.iterations;
    options->min_count = def.min_count;
    options->subsample = def.subsample;
    options->learning_rate = def.learning_rate;
    options->seed = def.seed;
}

int sb_train_skipgram_file(const char* corpus_path, const sb_skipgram_options* options,
                           sb_embeddings** out) {
    if (int rc = require_arg(corpus_path && options && out, "sb_train_skipgram_file")) return rc;
    return guarded([&] {
        SkipgramConfig cfg;
        cfg.dim = options->dim;
        cfg.window = options->window;
        cfg.negatives = options->negatives;
        cfg.iterations = options->iterations;
        cfg.min_count = options->min_count;
        cfg.subsample = options->subsample;
        cfg.learning_rate = options->learning_rate;
        cfg.seed = options->seed;
        auto corpus = load_corpus(corpus_path);
        *out = new sb_embeddings{train_skipgram(corpus, cfg)};
        return SB_OK;
    });
}

int sb_embeddings_load(const char* path, sb_embeddings** out) {
    if (int rc = require_arg(path && out, "sb_embeddings_load")) return rc;
    return guarded([&] {
        *out = new sb_embeddings{load_embeddings(path)};
        return SB_OK;
    });
}

int sb_embeddings_save(const sb_embeddings* embeddings, const char* path) {
    if (int rc = require_arg(embeddings && path, "sb_embeddings_save")) return rc;
    return guarded([&] {
        save_embeddings(embeddings->m, path);
        return SB_OK;
    });
}

void sb_embeddings_free(sb_embeddings* embeddings) { delete embeddings; }

int sb_embeddings_dim(const sb_embeddings* embeddings) {
    return embeddings == nullptr ? 0 : embeddings->m.dim;
}

long long sb_embeddings_vocab_size(const sb_embeddings* embeddings) {
    return embeddings == nullptr ? 0 : static_cast<long long>(embeddings->m.vocab.size());
}

int sb_embeddings_lookup(const sb_embeddings* embeddings, const char* word, double* out, int dim) {
    if (int rc = require_arg(embeddings && word && out, "sb_embeddings_lookup")) return rc;
    if (dim != (embeddings ? embeddings->m.dim : 0)) {
        return set_error(SB_ERR_INVALID_ARGUMENT,
                         "sb_embeddings_lookup: dim does not match the matrix");
    }
    return guarded([&] {
        const auto v = embeddings->m.lookup(word);
        for (int k = 0; k < dim; ++k) out[k] = v[k];
        return SB_OK;
    });
}

int sb_embeddings_cosine(const sb_embeddings* embeddings, const char* word_a, const char* word_b,
                         double* out) {
    if (int rc = require_arg(embeddings && word_a && word_b && out, "sb_embeddings_cosine")) {
        return rc;
    }
    return guarded([&] {
        const auto a = embeddings->m.lookup(word_a);
        const auto b = embeddings->m.lookup(word_b);
        *out = cosine(a, b);
        return SB_OK;
    });
}

/* ------------------------------------------------------------------ */
/* Retrofitting                                                        */
/* ------------------------------------------------------------------ */

void sb_retrofit_options_init(sb_retrofit_options* options) {
    if (options == nullptr) return;
    const RetrofitConfig def;
    options->iterations = def.iterations;
    options->alpha = def.alpha;
    options->use_constant_beta = 0;
    options->beta_constant = def.beta_constant;
}

int sb_retrofit_file(const sb_embeddings* base, const char* lexicon_path,
                     const sb_retrofit_options* options, sb_embeddings** out) {
    if (int rc = require_arg(base && lexicon_path && options && out, "sb_retrofit_file")) return rc;
    return guarded([&] {
        RetrofitConfig cfg;
        cfg.iterations = options->iterations;
        cfg.alpha = options->alpha;
        cfg.beta_rule = options->use_constant_beta ? RetrofitConfig::BetaRule::constant
                                                   : RetrofitConfig::BetaRule::inverse_degree;
        cfg.beta_constant = options->beta_constant;
        const LexiconGraph graph = load_lexicon(lexicon_path, base->m.vocab);
        *out = new sb_embeddings{retrofit_embeddings(base->m, graph, cfg)};
        return SB_OK;
    });
}

/* ------------------------------------------------------------------ */
/* Joint embeddings                                                    */
/* ------------------------------------------------------------------ */

void sb_joint_options_init(sb_joint_options* options) {
    if (options == nullptr) return;
    const JointConfig def;
    options->dim = def.dim;
    options->window = def.window;
    options->hidden = def.hidden;
    options->epochs = def.epochs;
    options->min_count = def.min_count;
    options->alpha = def.alpha;
    options->learning_rate = def.learning_rate;
    options->seed = def.seed;
}

int sb_train_joint_file(const char* corpus_path, const sb_joint_options* options,
                        sb_embeddings** out) {
    if (int rc = require_arg(corpus_path && options && out, "sb_train_joint_file")) return rc;
    return guarded([&] {
        JointConfig cfg;
        cfg.dim = options->dim;
        cfg.window = options->window;
        cfg.hidden = options->hidden;
        cfg.epochs = options->epochs;
        cfg.min_count = options->min_count;
        cfg.alpha = options->alpha;
        cfg.learning_rate = options->learning_rate;
        cfg.seed = options->seed;
        const auto corpus = load_distant_corpus(corpus_path);
        *out = new sb_embeddings{train_joint(corpus, cfg)};
        return SB_OK;
    });
}

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

int sb_dataset_load(const char* dir, int num_labels, const char* name, int binarize,
                    sb_dataset** out) {
    if (int rc = require_arg(dir && out, "sb_dataset_load")) return rc;
    return guarded([&] {
        const int labels = num_labels > 0 ? num_labels : infer_num_labels(dir);
        DatasetSplit split =
            load_dataset(dir, LabelScheme::for_num_labels(labels), name ? name : "");
        if (binarize) split = sst_to_binary(split);
        *out = new sb_dataset{std::move(split)};
        return SB_OK;
    });
}

void sb_dataset_free(sb_dataset* dataset) { delete dataset; }

int sb_dataset_num_labels(const sb_dataset* dataset) {
    return dataset == nullptr ? 0 : dataset->d.scheme.num_labels;
}

int sb_dataset_count(const sb_dataset* dataset, const char* partition, long long* out) {
    if (int rc = require_arg(dataset && partition && out, "sb_dataset_count")) return rc;
    const auto* part = partition_of(dataset->d, partition);
    if (part == nullptr) {
        return set_error(SB_ERR_INVALID_ARGUMENT,
                         std::string("unknown partition '") + partition + "'");
    }
    *out = static_cast<long long>(part->size());
    return SB_OK;
}

int sb_chi_squared_emoticons(const sb_dataset* a, const sb_dataset* b, double* chi2, int* df,
                             double* p) {
    if (int rc = require_arg(a && b && chi2 && df && p, "sb_chi_squared_emoticons")) return rc;
    return guarded([&] {
        const ChiSquaredResult res = chi_squared_emoticons(a->d, b->d);
        *chi2 = res.chi2;
        *df = res.df;
        *p = res.p;
        return SB_OK;
    });
}

/* ------------------------------------------------------------------ */
/* Models                                                              */
/* ------------------------------------------------------------------ */

void sb_model_options_init(sb_model_options* options) {
    if (options == nullptr) return;
    const ModelSpec def;
    options->kind = "BOW";
    options->dim = def.dim;
    options->hidden = def.hidden;
    options->epochs = def.epochs;
    options->lambda = def.lambda;
    options->dropout = def.dropout;
    options->filters = def.filters;
    options->seed = def.seed;
    options->embeddings_path = nullptr;
    options->lexicon_path = nullptr;
    options->corpus_path = nullptr;
    options->retrofit_iterations = def.retrofit_iterations;
    options->joint_alpha = def.joint_alpha;
    options->joint_window = def.joint_window;
    options->joint_hidden = def.joint_hidden;
    options->joint_epochs = def.joint_epochs;
    options->joint_learning_rate = def.joint_learning_rate;
}

int sb_model_train(const sb_dataset* dataset, const sb_model_options* options, sb_model** out) {
    if (int rc = require_arg(dataset && options && options->kind && out, "sb_model_train")) {
        return rc;
    }
    return guarded([&] {
        ModelSpec spec;
        spec.kind = model_kind_from_name(options->kind);
        spec.dim = options->dim;
        spec.hidden = options->hidden;
        spec.epochs = options->epochs;
        spec.lambda = options->lambda;
        spec.dropout = options->dropout;
        spec.filters = options->filters;
        spec.seed = options->seed;
        if (options->embeddings_path) spec.embeddings_path = options->embeddings_path;
        if (options->lexicon_path) spec.lexicon_path = options->lexicon_path;
        if (options->corpus_path) spec.distant_corpus_path = options->corpus_path;
        spec.retrofit_iterations = options->retrofit_iterations;
        spec.joint_alpha = options->joint_alpha;
        spec.joint_window = options->joint_window;
        spec.joint_hidden = options->joint_hidden;
        spec.joint_epochs = options->joint_epochs;
        spec.joint_learning_rate = options->joint_learning_rate;
        *out = new sb_model{train_sentiment_model(spec, dataset->d)};
        return SB_OK;
    });
}

int sb_model_save(const sb_model* model, const char* path) {
    if (int rc = require_arg(model && path, "sb_model_save")) return rc;
    return guarded([&] {
        save_model(model->m, path);
        return SB_OK;
    });
}

int sb_model_load(const char* path, sb_model** out) {
    if (int rc = require_arg(path && out, "sb_model_load")) return rc;
    return guarded([&] {
        *out = new sb_model{load_model(path)};
        return SB_OK;
    });
}

void sb_model_free(sb_model* model) { delete model; }

int sb_model_predict_text(const sb_model* model, const char* text, int* label) {
    if (int rc = require_arg(model && text && label, "sb_model_predict_text")) return rc;
    return guarded([&] {
        LabeledExample ex;
        ex.text = text;
        ex.tokens = tokenize(ex.text);
        ex.label = 0;
        const auto preds = predict_labels(model->m, {ex});
        *label = preds.at(0);
        return SB_OK;
    });
}

int sb_model_accuracy(const sb_model* model, const sb_dataset* dataset, const char* partition,
                      double* out) {
    if (int rc = require_arg(model && dataset && partition && out, "sb_model_accuracy")) return rc;
    const auto* part = partition_of(dataset->d, partition);
    if (part == nullptr) {
        return set_error(SB_ERR_INVALID_ARGUMENT,
                         std::string("unknown partition '") + partition + "'");
    }
    return guarded([&] {
        std::vector<int> gold;
        gold.reserve(part->size());
        for (const auto& ex : *part) gold.push_back(ex.label);
        const auto preds = predict_labels(model->m, *part);
        *out = accuracy(gold, preds);
        return SB_OK;
    });
}

/* ------------------------------------------------------------------ */
/* Config + benchmark                                                  */
/* ------------------------------------------------------------------ */

int sb_config_parse(const char* path, sb_config** out) {
    if (int rc = require_arg(path && out, "sb_config_parse")) return rc;
    return guarded([&] {
        *out = new sb_config{parse_config(path)};
        return SB_OK;
    });
}

void sb_config_free(sb_config* config) { delete config; }

int sb_config_validate(const sb_config* config) {
    if (int rc = require_arg(config != nullptr, "sb_config_validate")) return rc;
    return guarded([&] {
        validate_config(config->c);
        return SB_OK;
    });
}

int sb_config_serialize(const sb_config* config, char** out) {
    if (int rc = require_arg(config && out, "sb_config_serialize")) return rc;
    return guarded([&] {
        *out = copy_string(serialize_config(config->c));
        return SB_OK;
    });
}

int sb_config_hash(const sb_config* config, char** out) {
    if (int rc = require_arg(config && out, "sb_config_hash")) return rc;
    return guarded([&] {
        *out = copy_string(config_hash(config->c));
        return SB_OK;
    });
}

const char* sb_config_out_dir(const sb_config* config) {
    return config == nullptr ? "" : config->c.out_dir.c_str();
}

int sb_config_set_out_dir(sb_config* config, const char* dir) {
    if (int rc = require_arg(config && dir, "sb_config_set_out_dir")) return rc;
    config->c.out_dir = dir;
    return SB_OK;
}

int sb_config_set_base_seed(sb_config* config, unsigned long long base) {
    if (int rc = require_arg(config != nullptr, "sb_config_set_base_seed")) return rc;
    for (size_t i = 0; i < config->c.seeds.size(); ++i) {
        config->c.seeds[i] = base + i;
    }
    return SB_OK;
}

int sb_run_benchmark(const sb_config* config, int jobs, int resume, sb_report** out) {
    if (int rc = require_arg(config && out, "sb_run_benchmark")) return rc;
    return guarded([&] {
        *out = new sb_report{run_benchmark(config->c, jobs, resume != 0)};
        return SB_OK;
    });
}

int sb_assemble_report(const sb_config* config, sb_report** out) {
    if (int rc = require_arg(config && out, "sb_assemble_report")) return rc;
    return guarded([&] {
        *out = new sb_report{assemble_report(config->c)};
        return SB_OK;
    });
}

void sb_report_free(sb_report* report) { delete report; }

int sb_report_json(const sb_report* report, char** out) {
    if (int rc = require_arg(report && out, "sb_report_json")) return rc;
    return guarded([&] {
        *out = copy_string(report_json(report->r));
        return SB_OK;
    });
}

int sb_report_csv(const sb_report* report, char** out) {
    if (int rc = require_arg(report && out, "sb_report_csv")) return rc;
    return guarded([&] {
        *out = copy_string(report_csv(report->r));
        return SB_OK;
    });
}

int sb_report_markdown(const sb_report* report, char** out) {
    if (int rc = require_arg(report && out, "sb_report_markdown")) return rc;
    return guarded([&] {
        *out = copy_string(report_markdown(report->r));
        return SB_OK;
    });
}

int sb_report_significance_tsv(const sb_report* report, char** out) {
    if (int rc = require_arg(report && out, "sb_report_significance_tsv")) return rc;
    return guarded([&] {
        *out = copy_string(significance_tsv(report->r));
        return SB_OK;
    });
}

int sb_report_write(const sb_report* report, const sb_config* config) {
    if (int rc = require_arg(report && config, "sb_report_write")) return rc;
    return guarded([&] {
        write_report_files(report->r, config->c);
        return SB_OK;
    });
}

} /* extern "C" */
