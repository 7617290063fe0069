/* sentibench — sentiment-classification benchmark harness.
 *
 * C API over the shared library. Every function returns SB_OK (0) on success
 * or a negative status code; sb_error_message() describes the most recent
 * failure on the calling thread. Objects returned through out-parameters are
 * owned by the caller and released with the matching *_free function.
 * Strings returned through char** out-parameters are released with
 * sb_string_free.
 */
#ifndef SENTIBENCH_H
#define SENTIBENCH_H

#ifdef __cplusplus
extern "C" {
#endif

/* ------------------------------------------------------------------ */
/* Status codes                                                        */
/* ------------------------------------------------------------------ */

#define SB_OK 0

/* A null handle, null out-parameter, or argument invalid at the boundary. */
#define SB_ERR_INVALID_ARGUMENT (-1)
/* A domain failure: bad file, malformed input, contract violation. */
#define SB_ERR_FAILURE (-2)
/* Out of memory. */
#define SB_ERR_NO_MEMORY (-3)
/* Any other internal error. */
#define SB_ERR_INTERNAL (-4)

/* Message for the most recent error on this thread; never NULL. */
const char* sb_error_message(void);

/* Library version string, e.g. "0.1.0". */
const char* sb_version(void);

/* Releases a string returned through a char** out-parameter. */
void sb_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Opaque handles                                                      */
/* ------------------------------------------------------------------ */

typedef struct sb_embeddings sb_embeddings;
typedef struct sb_dataset sb_dataset;
typedef struct sb_model sb_model;
typedef struct sb_config sb_config;
typedef struct sb_report sb_report;

/* ------------------------------------------------------------------ */
/* Word embeddings                                                     */
/* ------------------------------------------------------------------ */

typedef struct {
    int dim;            /* vector dimensionality (default 50) */
    int window;         /* max context window (default 10) */
    int negatives;      /* negative samples per pair (default 5) */
    int iterations;     /* passes over the corpus (default 5) */
    int min_count;      /* drop words rarer than this (default 1) */
    double subsample;   /* frequent-word subsampling threshold (default 1e-4) */
    double learning_rate; /* initial step size (default 0.025) */
    unsigned long long seed; /* RNG seed (default 1) */
} sb_skipgram_options;

void sb_skipgram_options_init(sb_skipgram_options* options);

/* Trains skip-gram vectors on a corpus file (one text per line). */
int sb_train_skipgram_file(const char* corpus_path, const sb_skipgram_options* options,
                           sb_embeddings** out);

/* Text vector file round-trip ("word v1 ... vd" lines, optional header). */
int sb_embeddings_load(const char* path, sb_embeddings** out);
int sb_embeddings_save(const sb_embeddings* embeddings, const char* path);
void sb_embeddings_free(sb_embeddings* embeddings);

int sb_embeddings_dim(const sb_embeddings* embeddings);
long long sb_embeddings_vocab_size(const sb_embeddings* embeddings);

/* Copies the vector for `word` (out-of-vocabulary words get the library's
 * deterministic fallback vector) into out[0..dim-1]; `dim` must match. */
int sb_embeddings_lookup(const sb_embeddings* embeddings, const char* word, double* out, int dim);

/* Cosine similarity of the two words' vectors. */
int sb_embeddings_cosine(const sb_embeddings* embeddings, const char* word_a, const char* word_b,
                         double* out);

/* ------------------------------------------------------------------ */
/* Lexicon retrofitting                                                */
/* ------------------------------------------------------------------ */

typedef struct {
    int iterations;       /* coordinate sweeps (default 10) */
    double alpha;         /* attachment weight to the original vector (default 1) */
    int use_constant_beta; /* 0: inverse-degree edge weights (default); 1: constant */
    double beta_constant; /* edge weight when use_constant_beta (default 1) */
} sb_retrofit_options;

void sb_retrofit_options_init(sb_retrofit_options* options);

/* Retrofits `base` toward a lexicon file of "word word" pair lines; edges
 * whose endpoints are not both in the vocabulary are ignored. */
int sb_retrofit_file(const sb_embeddings* base, const char* lexicon_path,
                     const sb_retrofit_options* options, sb_embeddings** out);

/* ------------------------------------------------------------------ */
/* Joint sentiment embeddings (distant supervision)                    */
/* ------------------------------------------------------------------ */

typedef struct {
    int dim;        /* default 50 */
    int window;     /* odd context window (default 3) */
    int hidden;     /* hidden layer width (default 20) */
    int epochs;     /* default 5 */
    int min_count;  /* default 1 */
    double alpha;   /* syntactic-vs-sentiment mix in [0,1] (default 0.5) */
    double learning_rate; /* default 0.025 */
    unsigned long long seed; /* default 1 */
} sb_joint_options;

void sb_joint_options_init(sb_joint_options* options);

/* Trains sentiment-aware vectors on a corpus file (one text per line);
 * polarity comes from emoticon markers, unlabeled lines are dropped. */
int sb_train_joint_file(const char* corpus_path, const sb_joint_options* options,
                        sb_embeddings** out);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

/* Loads train.tsv / dev.tsv / test.tsv from a directory. num_labels 0 infers
 * the label count from the files; binarize maps a 5-label scheme to binary
 * ({0,1} -> 0, {3,4} -> 1, label 2 dropped). `name` may be NULL. */
int sb_dataset_load(const char* dir, int num_labels, const char* name, int binarize,
                    sb_dataset** out);
void sb_dataset_free(sb_dataset* dataset);

int sb_dataset_num_labels(const sb_dataset* dataset);
/* partition is "train", "dev", or "test". */
int sb_dataset_count(const sb_dataset* dataset, const char* partition, long long* out);

/* Pearson chi-squared over the six emoticon counts of the two datasets;
 * fails (SB_ERR_FAILURE) on a degenerate table. */
int sb_chi_squared_emoticons(const sb_dataset* a, const sb_dataset* b, double* chi2, int* df,
                             double* p);

/* ------------------------------------------------------------------ */
/* Sentiment models                                                    */
/* ------------------------------------------------------------------ */

typedef struct {
    const char* kind; /* "BOW", "AVE", "RETROFIT", "JOINT", "LSTM", "BILSTM", "CNN" */
    int dim;          /* embedding dimensionality (default 50) */
    int hidden;       /* 0 tunes over {50,100,200} (default 0) */
    int epochs;       /* -1 = early stopping; 0 = keep the random init (default -1) */
    double lambda;    /* negative tunes over {1e-4..1} (default -1) */
    double dropout;   /* [0,1) (default 0.5) */
    int filters;      /* CNN feature maps per width (default 32) */
    unsigned long long seed; /* default 1 */
    const char* embeddings_path; /* NULL/empty = train skip-gram on the training split */
    const char* lexicon_path;    /* RETROFIT only */
    const char* corpus_path;     /* JOINT distant corpus; NULL = derive from gold labels */
    int retrofit_iterations;     /* default 10 */
    double joint_alpha;          /* default 0.5 */
    int joint_window;            /* default 3 */
    int joint_hidden;            /* default 20 */
    int joint_epochs;            /* default 5 */
    double joint_learning_rate;  /* default 0.025 */
} sb_model_options;

void sb_model_options_init(sb_model_options* options);

int sb_model_train(const sb_dataset* dataset, const sb_model_options* options, sb_model** out);
int sb_model_save(const sb_model* model, const char* path);
int sb_model_load(const char* path, sb_model** out);
void sb_model_free(sb_model* model);

/* Predicted label index for one raw text. */
int sb_model_predict_text(const sb_model* model, const char* text, int* label);
/* Accuracy over one partition of a dataset. */
int sb_model_accuracy(const sb_model* model, const sb_dataset* dataset, const char* partition,
                      double* out);

/* ------------------------------------------------------------------ */
/* Benchmark configuration and reports                                 */
/* ------------------------------------------------------------------ */

int sb_config_parse(const char* path, sb_config** out);
void sb_config_free(sb_config* config);

/* Filesystem-level validation (paths exist, seed protocol satisfied). */
int sb_config_validate(const sb_config* config);
/* Canonical text form; parsing it reproduces the config exactly. */
int sb_config_serialize(const sb_config* config, char** out);
/* Hash of the canonical form, as fixed-width hex. */
int sb_config_hash(const sb_config* config, char** out);
/* Output directory recorded in the config (pointer valid while config lives). */
const char* sb_config_out_dir(const sb_config* config);
int sb_config_set_out_dir(sb_config* config, const char* dir);
/* Replaces the seed list with base, base+1, ... keeping its length. */
int sb_config_set_base_seed(sb_config* config, unsigned long long base);

/* Runs the full benchmark: every model x dim x dataset cell (neural kinds
 * once per seed), significance matrices, emoticon chi-squared table. Failed
 * cells are recorded in the report, not raised. `jobs` sizes the worker
 * pool; `resume` reuses cached cells under <out>/cells from an earlier run
 * with the same config. */
int sb_run_benchmark(const sb_config* config, int jobs, int resume, sb_report** out);

/* Rebuilds the report from cached cells only; fails if any cell is missing. */
int sb_assemble_report(const sb_config* config, sb_report** out);

void sb_report_free(sb_report* report);

/* Renderers. JSON is the full structure; CSV has one row per cell; the
 * markdown table mirrors the accuracy table layout; the significance TSV has
 * one line per tested model pair. */
int sb_report_json(const sb_report* report, char** out);
int sb_report_csv(const sb_report* report, char** out);
int sb_report_markdown(const sb_report* report, char** out);
int sb_report_significance_tsv(const sb_report* report, char** out);

/* Writes report.json, report.csv, report.md, manifest.json, config.cfg, the
 * per-cell JSON artifacts, and the per-cell confusion CSVs under the
 * config's output directory. */
int sb_report_write(const sb_report* report, const sb_config* config);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SENTIBENCH_H */
