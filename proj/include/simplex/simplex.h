/* C interface to the simplex-coding multiclass toolkit.
 *
 * All objects are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Every fallible call returns an
 * smx_status and, on failure, leaves a message retrievable with
 * smx_last_error() on the calling thread. Labels are 1-based. */
#ifndef SIMPLEX_SIMPLEX_H
#define SIMPLEX_SIMPLEX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SMX_API __declspec(dllexport)
#else
#define SMX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct smx_dataset smx_dataset;
typedef struct smx_model smx_model;
typedef struct smx_report smx_report;

typedef enum smx_status {
  SMX_OK = 0,
  SMX_ERR_INVALID_ARGUMENT = 1,
  SMX_ERR_INVALID_DATA = 2,
  SMX_ERR_DIMENSION = 3,
  SMX_ERR_DEGENERATE = 4,
  SMX_ERR_NUMERICAL = 5,
  SMX_ERR_IO = 6,
  SMX_ERR_PARSE = 7,
  SMX_ERR_CONFIG = 8,
  SMX_ERR_INTERNAL = 9
} smx_status;

/* Message of the last failed call on this thread ("" if none). */
SMX_API const char* smx_last_error(void);
SMX_API const char* smx_status_name(smx_status status);

/* ---- datasets ---- */

typedef enum smx_format { SMX_FORMAT_CSV = 0, SMX_FORMAT_SPARSE = 1 } smx_format;

typedef struct smx_load_options {
  smx_format format;
  int labeled;      /* csv only: 0 reads a feature-only table */
  int label_column; /* csv only: negative counts from the end, -1 = last */
  int has_header;   /* csv only */
} smx_load_options;

SMX_API void smx_load_options_init(smx_load_options* options);

SMX_API smx_status smx_dataset_load(const char* path, const smx_load_options* options, smx_dataset** out);

/* Loads data for prediction with `model`: a csv file with one column more
 * than the model's feature count is read as labeled, otherwise as features
 * only. Sparse files are always labeled. */
SMX_API smx_status smx_dataset_load_for_model(const char* path, const smx_load_options* options,
                                              const smx_model* model, smx_dataset** out);

/* Row-major rows x cols features; labels (1..T) may be NULL. Label tokens
 * become the decimal label numbers. */
SMX_API smx_status smx_dataset_from_arrays(const double* features, size_t rows, size_t cols, const int* labels,
                                           smx_dataset** out);

SMX_API size_t smx_dataset_rows(const smx_dataset* data);
SMX_API size_t smx_dataset_cols(const smx_dataset* data);
/* 0 for unlabeled data. */
SMX_API int smx_dataset_classes(const smx_dataset* data);
SMX_API smx_status smx_dataset_label(const smx_dataset* data, size_t row, int* out);
SMX_API const char* smx_dataset_label_name(const smx_dataset* data, int label);
SMX_API void smx_dataset_free(smx_dataset* data);

/* ---- training ---- */

typedef enum smx_loss { SMX_LOSS_S_LS = 0, SMX_LOSS_SC_SVM = 1, SMX_LOSS_SH_SVM = 2 } smx_loss;
typedef enum smx_kernel { SMX_KERNEL_LINEAR = 0, SMX_KERNEL_RBF = 1 } smx_kernel;
typedef enum smx_select { SMX_SELECT_HOLDOUT = 0, SMX_SELECT_LOO = 1 } smx_select;

typedef struct smx_train_config {
  smx_loss loss;
  int online;
  smx_kernel kernel;
  double sigma;  /* <= 0: bandwidth heuristic */
  double lambda; /* <= 0: select from the eigenvalue grid */
  smx_select select;
  double split_fraction;
  int epochs;
  uint64_t seed;
  int standardize;
  double tol;
  long max_sweeps; /* < 0: 10 n T */
} smx_train_config;

SMX_API void smx_train_config_init(smx_train_config* config);

/* `report` may be NULL. */
SMX_API smx_status smx_train(const smx_train_config* config, const smx_dataset* data, smx_model** model,
                             smx_report** report);

/* ---- models ---- */

SMX_API smx_status smx_model_save(const smx_model* model, const char* path);
SMX_API smx_status smx_model_load(const char* path, smx_model** out);
SMX_API size_t smx_model_dimension(const smx_model* model);
SMX_API int smx_model_classes(const smx_model* model);
SMX_API const char* smx_model_solver(const smx_model* model);
SMX_API const char* smx_model_label_name(const smx_model* model, int label);
/* Writes smx_dataset_rows(data) labels. */
SMX_API smx_status smx_model_predict(const smx_model* model, const smx_dataset* data, int* labels);
/* Writes rows x (T-1) decision values, row-major. */
SMX_API smx_status smx_model_decision(const smx_model* model, const smx_dataset* data, double* values);
SMX_API void smx_model_free(smx_model* model);

/* ---- reports ---- */

SMX_API smx_status smx_evaluate(const smx_model* model, const smx_dataset* data, smx_report** out);
/* Batch S-LS only: per-lambda LOO or hold-out rates over the 100-value grid. */
SMX_API smx_status smx_path(const smx_train_config* config, const smx_dataset* data, smx_report** out);
SMX_API smx_status smx_verify_theory(int classes, uint64_t seed, size_t trials, smx_report** out);
/* Returns SMX_OK even when some cells failed; check smx_report_passed. */
SMX_API smx_status smx_benchmark(const char* manifest_path, smx_report** out);

SMX_API const char* smx_report_text(const smx_report* report);
/* Main CSV payload: confusion matrix, path table or benchmark table ("" if none). */
SMX_API const char* smx_report_csv(const smx_report* report);
/* Secondary CSV payload: benchmark per-cell details ("" if none). */
SMX_API const char* smx_report_details_csv(const smx_report* report);
/* 1 when every check (theory) or cell (benchmark) succeeded, 0 otherwise. */
SMX_API int smx_report_passed(const smx_report* report);
/* Named scalar such as "lambda", "accuracy", "objective"; SMX_ERR_INVALID_ARGUMENT if absent. */
SMX_API smx_status smx_report_value(const smx_report* report, const char* key, double* out);
SMX_API void smx_report_free(smx_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SIMPLEX_SIMPLEX_H */
