/*
 * cfv — Completed Fisher Vector image-encoding library.
 *
 * C API over the C++ core: opaque handles, status codes, and thread-local
 * error messages. Every function returning cfv_status leaves its outputs
 * untouched on failure; call cfv_last_error() for the message of the last
 * failing call on the current thread.
 *
 * Matrices cross this boundary as dense row-major double arrays.
 */
#ifndef CFV_H
#define CFV_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define CFV_API __attribute__((visibility("default")))
#else
#define CFV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfv_status {
    CFV_OK = 0,
    CFV_ERROR_INTERNAL = 1,   /* unexpected failure inside the library */
    CFV_ERROR_VALIDATION = 2, /* bad arguments or out-of-range configuration */
    CFV_ERROR_DATA = 3,       /* unreadable or inconsistent files/inputs */
    CFV_ERROR_NUMERIC = 4     /* non-finite values, failed decompositions */
} cfv_status;

typedef enum cfv_cov_kind { CFV_COV_DIAGONAL = 0, CFV_COV_FULL = 1 } cfv_cov_kind;

typedef enum cfv_encoder_kind {
    CFV_ENCODER_BOW = 0,
    CFV_ENCODER_FV = 1,
    CFV_ENCODER_CFV = 2
} cfv_encoder_kind;

typedef enum cfv_descriptor_kind {
    CFV_DESC_LBP = 0,     /* dense 59-bin uniform LBP per RGB channel, D = 177 */
    CFV_DESC_GRADHIST = 1 /* dense gradient-orientation histogram, D = 128 */
} cfv_descriptor_kind;

CFV_API const char* cfv_version(void);
/* Message of the last failing call on this thread ("" when none). */
CFV_API const char* cfv_last_error(void);

/* ---- opaque handles ----------------------------------------------------- */

typedef struct cfv_image cfv_image;
typedef struct cfv_descriptor_set cfv_descriptor_set;
typedef struct cfv_pca cfv_pca;
typedef struct cfv_gmm cfv_gmm;
typedef struct cfv_svm cfv_svm;
typedef struct cfv_encoded cfv_encoded;
typedef struct cfv_container cfv_container;

CFV_API void cfv_image_free(cfv_image* h);
CFV_API void cfv_descriptor_set_free(cfv_descriptor_set* h);
CFV_API void cfv_pca_free(cfv_pca* h);
CFV_API void cfv_gmm_free(cfv_gmm* h);
CFV_API void cfv_svm_free(cfv_svm* h);
CFV_API void cfv_encoded_free(cfv_encoded* h);
CFV_API void cfv_container_free(cfv_container* h);

/* ---- images ------------------------------------------------------------- */

/* PNG or binary PGM/PPM (8-bit), dispatched on magic bytes. */
CFV_API cfv_status cfv_image_load(const char* path, cfv_image** out);
/* pixels: row-major, channel-interleaved, values in [0, 1]. */
CFV_API cfv_status cfv_image_create(int32_t width, int32_t height, int32_t channels,
                                    const double* pixels, cfv_image** out);
CFV_API int32_t cfv_image_width(const cfv_image* h);
CFV_API int32_t cfv_image_height(const cfv_image* h);
CFV_API int32_t cfv_image_channels(const cfv_image* h);

/* ---- descriptor extraction ---------------------------------------------- */

typedef struct cfv_lbp_params {
    int32_t patch; /* default 16 */
    int32_t step;  /* default 8 */
} cfv_lbp_params;
CFV_API void cfv_lbp_params_init(cfv_lbp_params* p);

typedef struct cfv_gradhist_params {
    int32_t bins;    /* default 8 */
    int32_t cells;   /* default 4 */
    int32_t cell_px; /* default 4 */
    int32_t step;    /* default 4 */
} cfv_gradhist_params;
CFV_API void cfv_gradhist_params_init(cfv_gradhist_params* p);

typedef struct cfv_multiscale_params {
    int32_t num_scales; /* default 7 */
    double ratio_max;   /* default 2.0 */
    double factor;      /* default sqrt(2) */
} cfv_multiscale_params;
CFV_API void cfv_multiscale_params_init(cfv_multiscale_params* p);

CFV_API cfv_status cfv_dense_lbp(const cfv_image* image, const cfv_lbp_params* params,
                                 cfv_descriptor_set** out);
CFV_API cfv_status cfv_dense_gradhist(const cfv_image* image,
                                      const cfv_gradhist_params* params,
                                      cfv_descriptor_set** out);
/* NULL param structs select the defaults. Scales smaller than the extractor
 * patch are skipped. */
CFV_API cfv_status cfv_extract_multiscale(const cfv_image* image, cfv_descriptor_kind kind,
                                          const cfv_lbp_params* lbp,
                                          const cfv_gradhist_params* gradhist,
                                          const cfv_multiscale_params* multiscale,
                                          cfv_descriptor_set** out);

/* ---- descriptor sets (CFVD files) ---------------------------------------- */

/* positions may be NULL, otherwise count x 3 (x, y, scale). */
CFV_API cfv_status cfv_descriptor_set_create(int64_t count, int32_t dim, const double* data,
                                             const double* positions,
                                             cfv_descriptor_set** out);
CFV_API int64_t cfv_descriptor_set_count(const cfv_descriptor_set* h);
CFV_API int32_t cfv_descriptor_set_dim(const cfv_descriptor_set* h);
/* Copies count*dim values into out. */
CFV_API cfv_status cfv_descriptor_set_data(const cfv_descriptor_set* h, double* out);
CFV_API cfv_status cfv_descriptor_set_save(const cfv_descriptor_set* h, const char* path);
CFV_API cfv_status cfv_descriptor_set_load(const char* path, cfv_descriptor_set** out);

/* ---- PCA ------------------------------------------------------------------ */

CFV_API cfv_status cfv_pca_fit(const double* points, int64_t n, int32_t dim,
                               int32_t output_dim, int32_t whiten, cfv_pca** out);
CFV_API cfv_status cfv_pca_apply(const cfv_pca* h, const double* points, int64_t n,
                                 double* out);
CFV_API int32_t cfv_pca_input_dim(const cfv_pca* h);
CFV_API int32_t cfv_pca_output_dim(const cfv_pca* h);

/* ---- GMM ------------------------------------------------------------------ */

typedef struct cfv_em_params {
    int32_t max_iters;       /* default 200 */
    double rel_tol;          /* default 1e-6 */
    double covariance_floor; /* <= 0 selects 1e-4 of the mean feature variance */
    uint64_t seed;
    int32_t restarts; /* default 1 */
    int32_t workers;  /* default 1 */
} cfv_em_params;
CFV_API void cfv_em_params_init(cfv_em_params* p);

CFV_API cfv_status cfv_gmm_fit(const double* points, int64_t n, int32_t dim, int32_t k,
                               cfv_cov_kind kind, const cfv_em_params* params,
                               cfv_gmm** out);
/* Hand-set model. covariances: k dense dim x dim row-major blocks; flooring
 * is applied with the given floor (> 0). */
CFV_API cfv_status cfv_gmm_create(int32_t k, int32_t dim, cfv_cov_kind kind,
                                  const double* priors, const double* means,
                                  const double* covariances, double floor, cfv_gmm** out);
CFV_API int32_t cfv_gmm_k(const cfv_gmm* h);
CFV_API int32_t cfv_gmm_dim(const cfv_gmm* h);
CFV_API cfv_cov_kind cfv_gmm_cov_kind(const cfv_gmm* h);
CFV_API cfv_status cfv_gmm_priors(const cfv_gmm* h, double* out);
CFV_API cfv_status cfv_gmm_means(const cfv_gmm* h, double* out);
/* Dense dim x dim covariance of one component. */
CFV_API cfv_status cfv_gmm_covariance(const cfv_gmm* h, int32_t component, double* out);
/* Posterior soft assignment of one descriptor; out has k entries summing 1. */
CFV_API cfv_status cfv_gmm_posterior(const cfv_gmm* h, const double* x, double* out);
CFV_API cfv_status cfv_gmm_log_likelihood(const cfv_gmm* h, const double* points, int64_t n,
                                          double* out);
/* out_points: n x dim; out_components (nullable): chosen component per row. */
CFV_API cfv_status cfv_gmm_sample(const cfv_gmm* h, int64_t n, uint64_t seed,
                                  double* out_points, int32_t* out_components);
/* Full covariances re-estimated from a diagonal model's responsibilities. */
CFV_API cfv_status cfv_gmm_refit_full(const cfv_gmm* diagonal_model, const double* points,
                                      int64_t n, cfv_gmm** out);

/* ---- encoding (CFVE files) ------------------------------------------------ */

typedef struct cfv_encoding_params {
    double alpha;               /* default 0.25 */
    double gamma;               /* default 0.5 */
    int32_t power_norm;         /* default 1 */
    int32_t l2_norm;            /* default 1 */
    int32_t first_order;        /* default 1 */
    int32_t second_order;       /* default 1 */
    int32_t fv_compat_scale;    /* default 0 */
    double posterior_threshold; /* default 1e-8; 0 disables skipping */
} cfv_encoding_params;
CFV_API void cfv_encoding_params_init(cfv_encoding_params* p);

/* params NULL selects the defaults. BoW ignores power normalization and
 * applies L2 only when l2_norm is set. */
CFV_API cfv_status cfv_encode(const cfv_gmm* model, const cfv_descriptor_set* descriptors,
                              cfv_encoder_kind kind, const cfv_encoding_params* params,
                              cfv_encoded** out);
CFV_API int64_t cfv_encoded_length(const cfv_encoded* h);
CFV_API cfv_status cfv_encoded_values(const cfv_encoded* h, double* out);
CFV_API cfv_encoder_kind cfv_encoded_kind(const cfv_encoded* h);
CFV_API cfv_status cfv_encoded_save(const cfv_encoded* h, const char* path);
CFV_API cfv_status cfv_encoded_load(const char* path, cfv_encoded** out);

/* ---- linear one-vs-all SVM -------------------------------------------------- */

typedef struct cfv_svm_params {
    double c;         /* default 1.0 */
    int32_t max_epochs; /* default 100 */
    double tolerance; /* default 1e-4 */
    uint64_t seed;
    int32_t workers; /* default 1 */
} cfv_svm_params;
CFV_API void cfv_svm_params_init(cfv_svm_params* p);

CFV_API cfv_status cfv_svm_train(const double* features, int64_t n, int64_t dim,
                                 const int32_t* labels, const cfv_svm_params* params,
                                 cfv_svm** out);
CFV_API int32_t cfv_svm_num_classes(const cfv_svm* h);
CFV_API cfv_status cfv_svm_predict(const cfv_svm* h, const double* features, int64_t n,
                                   int32_t* out);
/* out_confusion (nullable): num_classes^2 row-major counts, rows = true. */
CFV_API cfv_status cfv_svm_evaluate(const cfv_svm* h, const double* features, int64_t n,
                                    const int32_t* labels, double* out_accuracy,
                                    double* out_confusion);

/* ---- correlation diagnostics ------------------------------------------------ */

/* Pearson correlations of the set under component `component`'s soft
 * assignment; out: dense dim x dim. Fails (DATA) when the component mass is
 * below 1e-8. */
CFV_API cfv_status cfv_component_correlations(const cfv_gmm* model,
                                              const cfv_descriptor_set* descriptors,
                                              int32_t component, double* out);
/* Histogram of |rho| over all axis pairs and active (set, component) pairs.
 * out_frequencies: bins entries summing to 1. */
CFV_API cfv_status cfv_correlation_histogram(const cfv_gmm* model,
                                             const cfv_descriptor_set* const* sets,
                                             int64_t num_sets, int32_t bins,
                                             double* out_frequencies,
                                             double* out_mass_below_005,
                                             double* out_mass_005_to_05);

/* ---- synthetic datasets ------------------------------------------------------ */

/* Four-component 3D dataset; out gets 4*n_per_component descriptors,
 * out_labels (nullable) the true component per row. */
CFV_API cfv_status cfv_synth_figure1(uint64_t seed, int32_t n_per_component,
                                     cfv_descriptor_set** out, int32_t* out_labels);
/* Writes the two-class benchmark as CFVD files plus train/test manifest CSVs
 * into output_dir. */
CFV_API cfv_status cfv_synth_twoclass_write(const char* output_dir, uint64_t seed,
                                            int32_t images_per_class,
                                            int32_t descriptors_per_image);

/* ---- model container (CFVM files) ------------------------------------------- */

CFV_API cfv_status cfv_container_new(cfv_container** out);
CFV_API cfv_status cfv_container_load(const char* path, cfv_container** out);
CFV_API cfv_status cfv_container_save(const cfv_container* h, const char* path);
/* has: section in {"pca", "gmm", "svm", "encoding"}. */
CFV_API int32_t cfv_container_has(const cfv_container* h, const char* section);
CFV_API cfv_status cfv_container_set_pca(cfv_container* h, const cfv_pca* pca);
CFV_API cfv_status cfv_container_get_pca(const cfv_container* h, cfv_pca** out);
CFV_API cfv_status cfv_container_set_gmm(cfv_container* h, const cfv_gmm* gmm);
CFV_API cfv_status cfv_container_get_gmm(const cfv_container* h, cfv_gmm** out);
CFV_API cfv_status cfv_container_set_encoding(cfv_container* h,
                                              const cfv_encoding_params* params);
CFV_API cfv_status cfv_container_get_encoding(const cfv_container* h,
                                              cfv_encoding_params* out);

/* ---- pipeline commands (the CLI is a thin wrapper over these) --------------- */

typedef struct cfv_extract_opts {
    const char* input_dir;   /* scanned recursively for .png/.ppm/.pgm */
    const char* list_file;   /* alternative: CSV of image path,label */
    const char* labels_file; /* sidecar CSV for input_dir mode */
    const char* output_dir;
    cfv_descriptor_kind descriptor;
    cfv_lbp_params lbp;
    cfv_gradhist_params gradhist;
    cfv_multiscale_params multiscale;
    int32_t workers;
} cfv_extract_opts;
CFV_API void cfv_extract_opts_init(cfv_extract_opts* o);
CFV_API cfv_status cfv_run_extract(const cfv_extract_opts* o, int64_t* out_images);

typedef struct cfv_train_models_opts {
    const char* manifest;
    const char* output_container;
    int32_t pca_dim;
    int32_t pca_whiten;
    int32_t gmm_k;
    cfv_cov_kind cov_kind;
    const char* full_cov_path; /* "direct" (default) or "refit" */
    int64_t pca_subsample;     /* default 200000 */
    int64_t gmm_subsample;     /* default 500000 */
    uint64_t seed;
    cfv_em_params em;
    cfv_encoding_params encoding;
    int32_t workers;
} cfv_train_models_opts;
CFV_API void cfv_train_models_opts_init(cfv_train_models_opts* o);
CFV_API cfv_status cfv_run_train_models(const cfv_train_models_opts* o);

typedef struct cfv_encode_opts {
    const char* manifest;
    const char* container;
    const char* output_dir;
    cfv_encoder_kind kind;
    /* Overrides of the container's encoding section; negative doubles and
     * flags keep the stored value. */
    double alpha;
    double gamma;
    int32_t power_norm;
    int32_t l2_norm;
    int32_t fv_compat_scale;
    const char* text_output; /* optional combined text file */
    int32_t workers;
} cfv_encode_opts;
CFV_API void cfv_encode_opts_init(cfv_encode_opts* o);
CFV_API cfv_status cfv_run_encode(const cfv_encode_opts* o, int64_t* out_vector_length);

typedef struct cfv_classify_opts {
    const char* train_manifest; /* fixed split ... */
    const char* test_manifest;
    const char* pooled_manifest; /* ... or repeated random splits */
    double train_fraction;       /* default 0.5 */
    int32_t repeats;             /* default 10 */
    uint64_t seed;
    cfv_svm_params svm;
    const char* report_path; /* optional text report */
    int32_t workers;
} cfv_classify_opts;
CFV_API void cfv_classify_opts_init(cfv_classify_opts* o);
CFV_API cfv_status cfv_run_classify(const cfv_classify_opts* o, double* out_mean_accuracy,
                                    double* out_stddev_accuracy);

typedef struct cfv_analyze_opts {
    const char* container;
    const char* train_manifest; /* at least one manifest required */
    const char* test_manifest;
    int32_t bins; /* default 20 */
    const char* output_prefix;
    int32_t workers;
} cfv_analyze_opts;
CFV_API void cfv_analyze_opts_init(cfv_analyze_opts* o);
CFV_API cfv_status cfv_run_analyze(const cfv_analyze_opts* o);

typedef struct cfv_synth_bench_opts {
    const char* output_dir;
    uint64_t seed;
    int32_t images_per_class;      /* default 100 */
    int32_t descriptors_per_image; /* default 200 */
    const int32_t* pca_dims;       /* NULL selects {3} */
    int32_t num_pca_dims;
    const int32_t* ks; /* NULL selects {2, 4, 8, 16} */
    int32_t num_ks;
    int32_t workers;
} cfv_synth_bench_opts;
CFV_API void cfv_synth_bench_opts_init(cfv_synth_bench_opts* o);
CFV_API cfv_status cfv_run_synth_bench(const cfv_synth_bench_opts* o);

#ifdef __cplusplus
}
#endif

#endif /* CFV_H */
