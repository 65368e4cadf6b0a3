#include "cfv/cfv.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "core/analysis.hpp"
#include "core/container.hpp"
#include "core/descriptors.hpp"
#include "core/encoders.hpp"
#include "core/gmm.hpp"
#include "core/image.hpp"
#include "core/linalg.hpp"
#include "core/pipeline.hpp"
#include "core/svm.hpp"
#include "core/synthdata.hpp"

namespace {

thread_local std::string g_last_error;

cfv_status map_code(cfv::ErrorCode c) {
    switch (c) {
        case cfv::ErrorCode::validation: return CFV_ERROR_VALIDATION;
        case cfv::ErrorCode::data: return CFV_ERROR_DATA;
        case cfv::ErrorCode::numeric: return CFV_ERROR_NUMERIC;
    }
    return CFV_ERROR_INTERNAL;
}

cfv_status fail(const char* msg, cfv_status code = CFV_ERROR_VALIDATION) {
    g_last_error = msg;
    return code;
}

std::string opt_str(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

#define CFV_TRY                                                                        \
    try {
#define CFV_CATCH                                                                      \
    }                                                                                  \
    catch (const cfv::Error& e) {                                                      \
        g_last_error = e.what();                                                       \
        return map_code(e.code());                                                     \
    }                                                                                  \
    catch (const std::exception& e) {                                                  \
        g_last_error = e.what();                                                       \
        return CFV_ERROR_INTERNAL;                                                     \
    }

struct cfv_image {
    cfv::img::Image v;
};
struct cfv_descriptor_set {
    cfv::desc::DescriptorSet v;
};
struct cfv_pca {
    cfv::linalg::PcaModel v;
};
struct cfv_gmm {
    cfv::gmm::GmmModel v;
};
struct cfv_svm {
    cfv::svm::LinearSvmModel v;
};
struct cfv_encoded {
    cfv::enc::EncodedVector v;
};
struct cfv_container {
    cfv::io::ModelContainer v;
};

extern "C" {

const char* cfv_version(void) { return "0.1.0"; }
const char* cfv_last_error(void) { return g_last_error.c_str(); }

void cfv_image_free(cfv_image* h) { delete h; }
void cfv_descriptor_set_free(cfv_descriptor_set* h) { delete h; }
void cfv_pca_free(cfv_pca* h) { delete h; }
void cfv_gmm_free(cfv_gmm* h) { delete h; }
void cfv_svm_free(cfv_svm* h) { delete h; }
void cfv_encoded_free(cfv_encoded* h) { delete h; }
void cfv_container_free(cfv_container* h) { delete h; }

/* ---- images ---- */

cfv_status cfv_image_load(const char* path, cfv_image** out) {
    if (!path || !out) return fail("cfv_image_load: null argument");
    CFV_TRY
    *out = new cfv_image{cfv::img::load_image(path)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_image_create(int32_t width, int32_t height, int32_t channels,
                            const double* pixels, cfv_image** out) {
    if (!pixels || !out) return fail("cfv_image_create: null argument");
    CFV_TRY
    const std::size_t n =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
    *out = new cfv_image{
        cfv::img::make_image(width, height, channels, std::vector<double>(pixels, pixels + n))};
    return CFV_OK;
    CFV_CATCH
}

int32_t cfv_image_width(const cfv_image* h) { return h ? h->v.width : 0; }
int32_t cfv_image_height(const cfv_image* h) { return h ? h->v.height : 0; }
int32_t cfv_image_channels(const cfv_image* h) { return h ? h->v.channels : 0; }

/* ---- descriptor extraction ---- */

void cfv_lbp_params_init(cfv_lbp_params* p) {
    if (p) *p = {16, 8};
}
void cfv_gradhist_params_init(cfv_gradhist_params* p) {
    if (p) *p = {8, 4, 4, 4};
}
void cfv_multiscale_params_init(cfv_multiscale_params* p) {
    if (p) *p = {7, 2.0, 1.4142135623730951};
}

cfv_status cfv_dense_lbp(const cfv_image* image, const cfv_lbp_params* params,
                         cfv_descriptor_set** out) {
    if (!image || !out) return fail("cfv_dense_lbp: null argument");
    cfv_lbp_params p;
    cfv_lbp_params_init(&p);
    if (params) p = *params;
    CFV_TRY
    *out = new cfv_descriptor_set{cfv::desc::dense_lbp(image->v, p.patch, p.step)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_dense_gradhist(const cfv_image* image, const cfv_gradhist_params* params,
                              cfv_descriptor_set** out) {
    if (!image || !out) return fail("cfv_dense_gradhist: null argument");
    cfv_gradhist_params p;
    cfv_gradhist_params_init(&p);
    if (params) p = *params;
    CFV_TRY
    *out = new cfv_descriptor_set{
        cfv::desc::dense_gradhist(image->v, p.bins, p.cells, p.cell_px, p.step)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_extract_multiscale(const cfv_image* image, cfv_descriptor_kind kind,
                                  const cfv_lbp_params* lbp,
                                  const cfv_gradhist_params* gradhist,
                                  const cfv_multiscale_params* multiscale,
                                  cfv_descriptor_set** out) {
    if (!image || !out) return fail("cfv_extract_multiscale: null argument");
    cfv_lbp_params lp;
    cfv_lbp_params_init(&lp);
    if (lbp) lp = *lbp;
    cfv_gradhist_params gp;
    cfv_gradhist_params_init(&gp);
    if (gradhist) gp = *gradhist;
    cfv_multiscale_params mp;
    cfv_multiscale_params_init(&mp);
    if (multiscale) mp = *multiscale;
    CFV_TRY
    cfv::desc::Extractor extractor;
    if (kind == CFV_DESC_LBP)
        extractor = [lp](const cfv::img::Image& im) {
            return cfv::desc::dense_lbp(im, lp.patch, lp.step);
        };
    else
        extractor = [gp](const cfv::img::Image& im) {
            return cfv::desc::dense_gradhist(im, gp.bins, gp.cells, gp.cell_px, gp.step);
        };
    *out = new cfv_descriptor_set{cfv::desc::multiscale(image->v, extractor, mp.num_scales,
                                                        mp.ratio_max, mp.factor)};
    return CFV_OK;
    CFV_CATCH
}

/* ---- descriptor sets ---- */

cfv_status cfv_descriptor_set_create(int64_t count, int32_t dim, const double* data,
                                     const double* positions, cfv_descriptor_set** out) {
    if (!data || !out || count < 0 || dim <= 0)
        return fail("cfv_descriptor_set_create: bad arguments");
    CFV_TRY
    cfv::desc::DescriptorSet s;
    s.count = static_cast<std::size_t>(count);
    s.dim = static_cast<std::size_t>(dim);
    s.data = cfv::Matrix(s.count, s.dim);
    std::memcpy(s.data.data(), data, sizeof(double) * s.count * s.dim);
    if (positions) {
        s.positions = cfv::Matrix(s.count, 3);
        std::memcpy(s.positions.data(), positions, sizeof(double) * s.count * 3);
    }
    *out = new cfv_descriptor_set{std::move(s)};
    return CFV_OK;
    CFV_CATCH
}

int64_t cfv_descriptor_set_count(const cfv_descriptor_set* h) {
    return h ? static_cast<int64_t>(h->v.count) : 0;
}
int32_t cfv_descriptor_set_dim(const cfv_descriptor_set* h) {
    return h ? static_cast<int32_t>(h->v.dim) : 0;
}

cfv_status cfv_descriptor_set_data(const cfv_descriptor_set* h, double* out) {
    if (!h || !out) return fail("cfv_descriptor_set_data: null argument");
    std::memcpy(out, h->v.data.data(), sizeof(double) * h->v.count * h->v.dim);
    return CFV_OK;
}

cfv_status cfv_descriptor_set_save(const cfv_descriptor_set* h, const char* path) {
    if (!h || !path) return fail("cfv_descriptor_set_save: null argument");
    CFV_TRY
    cfv::desc::save_descriptors(h->v, path);
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_descriptor_set_load(const char* path, cfv_descriptor_set** out) {
    if (!path || !out) return fail("cfv_descriptor_set_load: null argument");
    CFV_TRY
    *out = new cfv_descriptor_set{cfv::desc::load_descriptors(path)};
    return CFV_OK;
    CFV_CATCH
}

/* ---- PCA ---- */

cfv_status cfv_pca_fit(const double* points, int64_t n, int32_t dim, int32_t output_dim,
                       int32_t whiten, cfv_pca** out) {
    if (!points || !out || n <= 0 || dim <= 0) return fail("cfv_pca_fit: bad arguments");
    CFV_TRY
    cfv::Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    std::memcpy(m.data(), points, sizeof(double) * m.rows() * m.cols());
    *out = new cfv_pca{
        cfv::linalg::pca_fit(m, static_cast<std::size_t>(output_dim), whiten != 0)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_pca_apply(const cfv_pca* h, const double* points, int64_t n, double* out) {
    if (!h || !points || !out || n <= 0) return fail("cfv_pca_apply: bad arguments");
    CFV_TRY
    cfv::Matrix m(static_cast<std::size_t>(n), h->v.input_dim);
    std::memcpy(m.data(), points, sizeof(double) * m.rows() * m.cols());
    cfv::Matrix y = cfv::linalg::pca_apply(h->v, m);
    std::memcpy(out, y.data(), sizeof(double) * y.rows() * y.cols());
    return CFV_OK;
    CFV_CATCH
}

int32_t cfv_pca_input_dim(const cfv_pca* h) {
    return h ? static_cast<int32_t>(h->v.input_dim) : 0;
}
int32_t cfv_pca_output_dim(const cfv_pca* h) {
    return h ? static_cast<int32_t>(h->v.output_dim) : 0;
}

/* ---- GMM ---- */

void cfv_em_params_init(cfv_em_params* p) {
    if (p) *p = {200, 1e-6, 0.0, 0, 1, 1};
}

namespace {

cfv::gmm::EmConfig to_em_config(const cfv_em_params* p) {
    cfv::gmm::EmConfig c;
    if (!p) return c;
    c.max_iters = p->max_iters;
    c.rel_tol = p->rel_tol;
    if (p->covariance_floor > 0.0) c.covariance_floor = p->covariance_floor;
    c.seed = p->seed;
    c.restarts = p->restarts;
    c.workers = p->workers;
    return c;
}

cfv::gmm::CovarianceKind to_kind(cfv_cov_kind k) {
    return k == CFV_COV_FULL ? cfv::gmm::CovarianceKind::full
                             : cfv::gmm::CovarianceKind::diagonal;
}

}  // namespace

cfv_status cfv_gmm_fit(const double* points, int64_t n, int32_t dim, int32_t k,
                       cfv_cov_kind kind, const cfv_em_params* params, cfv_gmm** out) {
    if (!points || !out || n <= 0 || dim <= 0 || k <= 0)
        return fail("cfv_gmm_fit: bad arguments");
    CFV_TRY
    cfv::Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    std::memcpy(m.data(), points, sizeof(double) * m.rows() * m.cols());
    cfv::gmm::FitResult fit =
        cfv::gmm::fit_em(m, static_cast<std::size_t>(k), to_kind(kind), to_em_config(params));
    *out = new cfv_gmm{std::move(fit.model)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_gmm_create(int32_t k, int32_t dim, cfv_cov_kind kind, const double* priors,
                          const double* means, const double* covariances, double floor,
                          cfv_gmm** out) {
    if (!priors || !means || !covariances || !out || k <= 0 || dim <= 0)
        return fail("cfv_gmm_create: bad arguments");
    CFV_TRY
    const std::size_t K = static_cast<std::size_t>(k), D = static_cast<std::size_t>(dim);
    cfv::Vector p(priors, priors + K);
    cfv::Matrix mu(K, D);
    std::memcpy(mu.data(), means, sizeof(double) * K * D);
    std::vector<cfv::SymMatrix> covs;
    for (std::size_t c = 0; c < K; ++c) {
        cfv::Matrix dense(D, D);
        std::memcpy(dense.data(), covariances + c * D * D, sizeof(double) * D * D);
        covs.push_back(cfv::SymMatrix::from_dense(dense));
    }
    *out = new cfv_gmm{cfv::gmm::GmmModel::create(to_kind(kind), std::move(p), std::move(mu),
                                                  std::move(covs), floor)};
    return CFV_OK;
    CFV_CATCH
}

int32_t cfv_gmm_k(const cfv_gmm* h) { return h ? static_cast<int32_t>(h->v.K) : 0; }
int32_t cfv_gmm_dim(const cfv_gmm* h) { return h ? static_cast<int32_t>(h->v.D) : 0; }
cfv_cov_kind cfv_gmm_cov_kind(const cfv_gmm* h) {
    return h && h->v.kind == cfv::gmm::CovarianceKind::full ? CFV_COV_FULL : CFV_COV_DIAGONAL;
}

cfv_status cfv_gmm_priors(const cfv_gmm* h, double* out) {
    if (!h || !out) return fail("cfv_gmm_priors: null argument");
    std::memcpy(out, h->v.priors.data(), sizeof(double) * h->v.K);
    return CFV_OK;
}

cfv_status cfv_gmm_means(const cfv_gmm* h, double* out) {
    if (!h || !out) return fail("cfv_gmm_means: null argument");
    std::memcpy(out, h->v.means.data(), sizeof(double) * h->v.K * h->v.D);
    return CFV_OK;
}

cfv_status cfv_gmm_covariance(const cfv_gmm* h, int32_t component, double* out) {
    if (!h || !out) return fail("cfv_gmm_covariance: null argument");
    if (component < 0 || static_cast<std::size_t>(component) >= h->v.K)
        return fail("cfv_gmm_covariance: component out of range");
    const cfv::Matrix dense = h->v.covariances[component].dense();
    std::memcpy(out, dense.data(), sizeof(double) * h->v.D * h->v.D);
    return CFV_OK;
}

cfv_status cfv_gmm_posterior(const cfv_gmm* h, const double* x, double* out) {
    if (!h || !x || !out) return fail("cfv_gmm_posterior: null argument");
    CFV_TRY
    cfv::Vector xv(x, x + h->v.D);
    cfv::Vector p = h->v.posterior(xv);
    std::memcpy(out, p.data(), sizeof(double) * p.size());
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_gmm_log_likelihood(const cfv_gmm* h, const double* points, int64_t n,
                                  double* out) {
    if (!h || !points || !out || n <= 0) return fail("cfv_gmm_log_likelihood: bad arguments");
    CFV_TRY
    cfv::Matrix m(static_cast<std::size_t>(n), h->v.D);
    std::memcpy(m.data(), points, sizeof(double) * m.rows() * m.cols());
    *out = h->v.log_likelihood(m);
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_gmm_sample(const cfv_gmm* h, int64_t n, uint64_t seed, double* out_points,
                          int32_t* out_components) {
    if (!h || !out_points || n <= 0) return fail("cfv_gmm_sample: bad arguments");
    CFV_TRY
    std::vector<int> comps;
    cfv::Matrix x =
        h->v.sample(static_cast<std::size_t>(n), seed, out_components ? &comps : nullptr);
    std::memcpy(out_points, x.data(), sizeof(double) * x.rows() * x.cols());
    if (out_components)
        for (std::size_t i = 0; i < comps.size(); ++i)
            out_components[i] = static_cast<int32_t>(comps[i]);
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_gmm_refit_full(const cfv_gmm* diagonal_model, const double* points, int64_t n,
                              cfv_gmm** out) {
    if (!diagonal_model || !points || !out || n <= 0)
        return fail("cfv_gmm_refit_full: bad arguments");
    CFV_TRY
    cfv::Matrix m(static_cast<std::size_t>(n), diagonal_model->v.D);
    std::memcpy(m.data(), points, sizeof(double) * m.rows() * m.cols());
    *out = new cfv_gmm{cfv::gmm::refit_full_from_posteriors(diagonal_model->v, m)};
    return CFV_OK;
    CFV_CATCH
}

/* ---- encoding ---- */

void cfv_encoding_params_init(cfv_encoding_params* p) {
    if (p) *p = {0.25, 0.5, 1, 1, 1, 1, 0, 1e-8};
}

namespace {

cfv::enc::EncodingConfig to_encoding_config(const cfv_encoding_params* p) {
    cfv::enc::EncodingConfig c;
    if (!p) return c;
    c.alpha = p->alpha;
    c.gamma = p->gamma;
    c.apply_power_norm = p->power_norm != 0;
    c.apply_l2_norm = p->l2_norm != 0;
    c.include_first_order = p->first_order != 0;
    c.include_second_order = p->second_order != 0;
    c.fv_compat_scale = p->fv_compat_scale != 0;
    c.posterior_threshold = p->posterior_threshold;
    return c;
}

cfv_encoding_params from_encoding_config(const cfv::enc::EncodingConfig& c) {
    cfv_encoding_params p;
    p.alpha = c.alpha;
    p.gamma = c.gamma;
    p.power_norm = c.apply_power_norm;
    p.l2_norm = c.apply_l2_norm;
    p.first_order = c.include_first_order;
    p.second_order = c.include_second_order;
    p.fv_compat_scale = c.fv_compat_scale;
    p.posterior_threshold = c.posterior_threshold;
    return p;
}

}  // namespace

cfv_status cfv_encode(const cfv_gmm* model, const cfv_descriptor_set* descriptors,
                      cfv_encoder_kind kind, const cfv_encoding_params* params,
                      cfv_encoded** out) {
    if (!model || !descriptors || !out) return fail("cfv_encode: null argument");
    CFV_TRY
    const cfv::enc::EncodingConfig config = to_encoding_config(params);
    cfv::enc::EncodedVector v;
    switch (kind) {
        case CFV_ENCODER_BOW:
            v = cfv::enc::encode_bow(model->v, descriptors->v.data, config);
            break;
        case CFV_ENCODER_FV:
            v = cfv::enc::encode_fv(model->v, descriptors->v.data, config);
            break;
        case CFV_ENCODER_CFV:
            v = cfv::enc::encode_cfv(model->v, descriptors->v.data, config);
            break;
        default:
            return fail("cfv_encode: unknown encoder kind");
    }
    *out = new cfv_encoded{std::move(v)};
    return CFV_OK;
    CFV_CATCH
}

int64_t cfv_encoded_length(const cfv_encoded* h) {
    return h ? static_cast<int64_t>(h->v.values.size()) : 0;
}

cfv_status cfv_encoded_values(const cfv_encoded* h, double* out) {
    if (!h || !out) return fail("cfv_encoded_values: null argument");
    std::memcpy(out, h->v.values.data(), sizeof(double) * h->v.values.size());
    return CFV_OK;
}

cfv_encoder_kind cfv_encoded_kind(const cfv_encoded* h) {
    if (!h) return CFV_ENCODER_BOW;
    switch (h->v.kind) {
        case cfv::enc::EncoderKind::bow: return CFV_ENCODER_BOW;
        case cfv::enc::EncoderKind::fv: return CFV_ENCODER_FV;
        case cfv::enc::EncoderKind::cfv: return CFV_ENCODER_CFV;
    }
    return CFV_ENCODER_BOW;
}

cfv_status cfv_encoded_save(const cfv_encoded* h, const char* path) {
    if (!h || !path) return fail("cfv_encoded_save: null argument");
    CFV_TRY
    cfv::enc::save_encoded(h->v, path);
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_encoded_load(const char* path, cfv_encoded** out) {
    if (!path || !out) return fail("cfv_encoded_load: null argument");
    CFV_TRY
    *out = new cfv_encoded{cfv::enc::load_encoded(path)};
    return CFV_OK;
    CFV_CATCH
}

/* ---- SVM ---- */

void cfv_svm_params_init(cfv_svm_params* p) {
    if (p) *p = {1.0, 100, 1e-4, 0, 1};
}

namespace {

cfv::svm::TrainConfig to_svm_config(const cfv_svm_params* p) {
    cfv::svm::TrainConfig c;
    if (!p) return c;
    c.C = p->c;
    c.max_epochs = p->max_epochs;
    c.tolerance = p->tolerance;
    c.seed = p->seed;
    c.workers = p->workers;
    return c;
}

}  // namespace

cfv_status cfv_svm_train(const double* features, int64_t n, int64_t dim,
                         const int32_t* labels, const cfv_svm_params* params, cfv_svm** out) {
    if (!features || !labels || !out || n <= 0 || dim <= 0)
        return fail("cfv_svm_train: bad arguments");
    CFV_TRY
    cfv::Matrix f(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    std::memcpy(f.data(), features, sizeof(double) * f.rows() * f.cols());
    std::vector<int> y(labels, labels + n);
    *out = new cfv_svm{cfv::svm::train_ova(f, y, to_svm_config(params))};
    return CFV_OK;
    CFV_CATCH
}

int32_t cfv_svm_num_classes(const cfv_svm* h) {
    return h ? static_cast<int32_t>(h->v.num_classes) : 0;
}

cfv_status cfv_svm_predict(const cfv_svm* h, const double* features, int64_t n,
                           int32_t* out) {
    if (!h || !features || !out || n <= 0) return fail("cfv_svm_predict: bad arguments");
    CFV_TRY
    cfv::Matrix f(static_cast<std::size_t>(n), h->v.feature_dim);
    std::memcpy(f.data(), features, sizeof(double) * f.rows() * f.cols());
    std::vector<int> pred = cfv::svm::predict(h->v, f);
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = static_cast<int32_t>(pred[i]);
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_svm_evaluate(const cfv_svm* h, const double* features, int64_t n,
                            const int32_t* labels, double* out_accuracy,
                            double* out_confusion) {
    if (!h || !features || !labels || !out_accuracy || n <= 0)
        return fail("cfv_svm_evaluate: bad arguments");
    CFV_TRY
    cfv::Matrix f(static_cast<std::size_t>(n), h->v.feature_dim);
    std::memcpy(f.data(), features, sizeof(double) * f.rows() * f.cols());
    std::vector<int> y(labels, labels + n);
    cfv::svm::EvalResult r = cfv::svm::evaluate(h->v, f, y);
    *out_accuracy = r.accuracy;
    if (out_confusion)
        std::memcpy(out_confusion, r.confusion.data(),
                    sizeof(double) * r.confusion.rows() * r.confusion.cols());
    return CFV_OK;
    CFV_CATCH
}

/* ---- analysis ---- */

cfv_status cfv_component_correlations(const cfv_gmm* model,
                                      const cfv_descriptor_set* descriptors,
                                      int32_t component, double* out) {
    if (!model || !descriptors || !out)
        return fail("cfv_component_correlations: null argument");
    CFV_TRY
    cfv::analysis::ComponentCorrelation cc = cfv::analysis::component_correlations(
        model->v, descriptors->v.data, static_cast<std::size_t>(component));
    const cfv::Matrix dense = cc.rho.dense();
    std::memcpy(out, dense.data(), sizeof(double) * dense.rows() * dense.cols());
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_correlation_histogram(const cfv_gmm* model,
                                     const cfv_descriptor_set* const* sets, int64_t num_sets,
                                     int32_t bins, double* out_frequencies,
                                     double* out_mass_below_005, double* out_mass_005_to_05) {
    if (!model || !sets || !out_frequencies || num_sets <= 0 || bins <= 0)
        return fail("cfv_correlation_histogram: bad arguments");
    CFV_TRY
    std::vector<cfv::Matrix> data;
    for (int64_t i = 0; i < num_sets; ++i) {
        if (!sets[i]) return fail("cfv_correlation_histogram: null set");
        data.push_back(sets[i]->v.data);
    }
    cfv::analysis::CorrelationHistogram h =
        cfv::analysis::correlation_histogram(model->v, data, bins);
    std::memcpy(out_frequencies, h.frequencies.data(), sizeof(double) * h.frequencies.size());
    if (out_mass_below_005) *out_mass_below_005 = h.mass_below_005;
    if (out_mass_005_to_05) *out_mass_005_to_05 = h.mass_005_to_05;
    return CFV_OK;
    CFV_CATCH
}

/* ---- synthetic data ---- */

cfv_status cfv_synth_figure1(uint64_t seed, int32_t n_per_component, cfv_descriptor_set** out,
                             int32_t* out_labels) {
    if (!out) return fail("cfv_synth_figure1: null argument");
    CFV_TRY
    cfv::synth::Figure1Data fig = cfv::synth::figure1_dataset(seed, n_per_component);
    cfv::desc::DescriptorSet s;
    s.count = fig.points.rows();
    s.dim = fig.points.cols();
    s.data = std::move(fig.points);
    s.source_id = "synth/figure1";
    if (out_labels)
        for (std::size_t i = 0; i < fig.labels.size(); ++i)
            out_labels[i] = static_cast<int32_t>(fig.labels[i]);
    *out = new cfv_descriptor_set{std::move(s)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_synth_twoclass_write(const char* output_dir, uint64_t seed,
                                    int32_t images_per_class, int32_t descriptors_per_image) {
    if (!output_dir) return fail("cfv_synth_twoclass_write: null output_dir");
    CFV_TRY
    namespace fs = std::filesystem;
    cfv::synth::TwoClassData data =
        cfv::synth::twoclass_benchmark(seed, images_per_class, descriptors_per_image);
    fs::create_directories(output_dir);
    std::vector<cfv::pipeline::ManifestRow> rows;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        std::string name = data.images[i].source_id;
        for (char& c : name)
            if (c == '/') c = '_';
        const std::string path = (fs::path(output_dir) / (name + ".cfvd")).string();
        cfv::desc::save_descriptors(data.images[i], path);
        rows.push_back({path, "class" + std::to_string(data.labels[i])});
    }
    cfv::pipeline::write_manifest(rows, (fs::path(output_dir) / "manifest.csv").string());
    return CFV_OK;
    CFV_CATCH
}

/* ---- container ---- */

cfv_status cfv_container_new(cfv_container** out) {
    if (!out) return fail("cfv_container_new: null argument");
    *out = new cfv_container{};
    return CFV_OK;
}

cfv_status cfv_container_load(const char* path, cfv_container** out) {
    if (!path || !out) return fail("cfv_container_load: null argument");
    CFV_TRY
    *out = new cfv_container{cfv::io::load_container(path)};
    return CFV_OK;
    CFV_CATCH
}

cfv_status cfv_container_save(const cfv_container* h, const char* path) {
    if (!h || !path) return fail("cfv_container_save: null argument");
    CFV_TRY
    cfv::io::save_container(h->v, path);
    return CFV_OK;
    CFV_CATCH
}

int32_t cfv_container_has(const cfv_container* h, const char* section) {
    if (!h || !section) return 0;
    const std::string s = section;
    if (s == "pca") return h->v.pca.has_value();
    if (s == "gmm") return h->v.gmm.has_value();
    if (s == "svm") return h->v.svm.has_value();
    if (s == "encoding") return h->v.encoding.has_value();
    return 0;
}

cfv_status cfv_container_set_pca(cfv_container* h, const cfv_pca* pca) {
    if (!h || !pca) return fail("cfv_container_set_pca: null argument");
    h->v.pca = pca->v;
    return CFV_OK;
}

cfv_status cfv_container_get_pca(const cfv_container* h, cfv_pca** out) {
    if (!h || !out) return fail("cfv_container_get_pca: null argument");
    if (!h->v.pca) return fail("container has no pca section", CFV_ERROR_DATA);
    *out = new cfv_pca{*h->v.pca};
    return CFV_OK;
}

cfv_status cfv_container_set_gmm(cfv_container* h, const cfv_gmm* gmm) {
    if (!h || !gmm) return fail("cfv_container_set_gmm: null argument");
    h->v.gmm = gmm->v;
    return CFV_OK;
}

cfv_status cfv_container_get_gmm(const cfv_container* h, cfv_gmm** out) {
    if (!h || !out) return fail("cfv_container_get_gmm: null argument");
    if (!h->v.gmm) return fail("container has no gmm section", CFV_ERROR_DATA);
    *out = new cfv_gmm{*h->v.gmm};
    return CFV_OK;
}

cfv_status cfv_container_set_encoding(cfv_container* h, const cfv_encoding_params* params) {
    if (!h || !params) return fail("cfv_container_set_encoding: null argument");
    h->v.encoding = to_encoding_config(params);
    return CFV_OK;
}

cfv_status cfv_container_get_encoding(const cfv_container* h, cfv_encoding_params* out) {
    if (!h || !out) return fail("cfv_container_get_encoding: null argument");
    if (!h->v.encoding) return fail("container has no encoding section", CFV_ERROR_DATA);
    *out = from_encoding_config(*h->v.encoding);
    return CFV_OK;
}

/* ---- pipeline commands ---- */

void cfv_extract_opts_init(cfv_extract_opts* o) {
    if (!o) return;
    *o = {};
    o->descriptor = CFV_DESC_LBP;
    cfv_lbp_params_init(&o->lbp);
    cfv_gradhist_params_init(&o->gradhist);
    cfv_multiscale_params_init(&o->multiscale);
    o->workers = 1;
}

cfv_status cfv_run_extract(const cfv_extract_opts* o, int64_t* out_images) {
    if (!o) return fail("cfv_run_extract: null options");
    CFV_TRY
    cfv::pipeline::ExtractOptions opt;
    opt.input_dir = opt_str(o->input_dir);
    opt.list_file = opt_str(o->list_file);
    opt.labels_file = opt_str(o->labels_file);
    opt.output_dir = opt_str(o->output_dir);
    opt.descriptor = o->descriptor == CFV_DESC_GRADHIST ? "gradhist" : "lbp";
    opt.lbp_patch = o->lbp.patch;
    opt.lbp_step = o->lbp.step;
    opt.grad_bins = o->gradhist.bins;
    opt.grad_cells = o->gradhist.cells;
    opt.grad_cell_px = o->gradhist.cell_px;
    opt.grad_step = o->gradhist.step;
    opt.num_scales = o->multiscale.num_scales;
    opt.ratio_max = o->multiscale.ratio_max;
    opt.scale_factor = o->multiscale.factor;
    opt.workers = o->workers;
    cfv::pipeline::ExtractReport r = cfv::pipeline::run_extract(opt);
    if (out_images) *out_images = static_cast<int64_t>(r.images);
    return CFV_OK;
    CFV_CATCH
}

void cfv_train_models_opts_init(cfv_train_models_opts* o) {
    if (!o) return;
    *o = {};
    o->pca_dim = 0;
    o->gmm_k = 0;
    o->cov_kind = CFV_COV_DIAGONAL;
    o->full_cov_path = "direct";
    o->pca_subsample = 200000;
    o->gmm_subsample = 500000;
    cfv_em_params_init(&o->em);
    cfv_encoding_params_init(&o->encoding);
    o->workers = 1;
}

cfv_status cfv_run_train_models(const cfv_train_models_opts* o) {
    if (!o) return fail("cfv_run_train_models: null options");
    CFV_TRY
    cfv::pipeline::TrainModelsOptions opt;
    opt.manifest = opt_str(o->manifest);
    opt.output_container = opt_str(o->output_container);
    opt.pca_dim = static_cast<std::size_t>(o->pca_dim);
    opt.pca_whiten = o->pca_whiten != 0;
    opt.gmm_k = static_cast<std::size_t>(o->gmm_k);
    opt.cov_kind = to_kind(o->cov_kind);
    opt.full_cov_path = opt_str(o->full_cov_path);
    if (opt.full_cov_path.empty()) opt.full_cov_path = "direct";
    opt.pca_subsample = static_cast<std::size_t>(o->pca_subsample);
    opt.gmm_subsample = static_cast<std::size_t>(o->gmm_subsample);
    opt.seed = o->seed;
    opt.em = to_em_config(&o->em);
    opt.encoding = to_encoding_config(&o->encoding);
    opt.workers = o->workers;
    cfv::pipeline::run_train_models(opt);
    return CFV_OK;
    CFV_CATCH
}

void cfv_encode_opts_init(cfv_encode_opts* o) {
    if (!o) return;
    *o = {};
    o->kind = CFV_ENCODER_CFV;
    o->alpha = -1.0;
    o->gamma = -1.0;
    o->power_norm = -1;
    o->l2_norm = -1;
    o->fv_compat_scale = -1;
    o->workers = 1;
}

cfv_status cfv_run_encode(const cfv_encode_opts* o, int64_t* out_vector_length) {
    if (!o) return fail("cfv_run_encode: null options");
    CFV_TRY
    cfv::pipeline::EncodeOptions opt;
    opt.manifest = opt_str(o->manifest);
    opt.container_path = opt_str(o->container);
    opt.output_dir = opt_str(o->output_dir);
    opt.kind = o->kind == CFV_ENCODER_BOW  ? cfv::enc::EncoderKind::bow
               : o->kind == CFV_ENCODER_FV ? cfv::enc::EncoderKind::fv
                                           : cfv::enc::EncoderKind::cfv;
    if (o->alpha >= 0.0) opt.alpha = o->alpha;
    if (o->gamma >= 0.0) opt.gamma = o->gamma;
    if (o->power_norm >= 0) opt.power_norm = o->power_norm != 0;
    if (o->l2_norm >= 0) opt.l2_norm = o->l2_norm != 0;
    if (o->fv_compat_scale >= 0) opt.fv_compat_scale = o->fv_compat_scale != 0;
    opt.text_output = opt_str(o->text_output);
    opt.workers = o->workers;
    cfv::pipeline::EncodeReport r = cfv::pipeline::run_encode(opt);
    if (out_vector_length) *out_vector_length = static_cast<int64_t>(r.vector_length);
    return CFV_OK;
    CFV_CATCH
}

void cfv_classify_opts_init(cfv_classify_opts* o) {
    if (!o) return;
    *o = {};
    o->train_fraction = 0.5;
    o->repeats = 10;
    cfv_svm_params_init(&o->svm);
    o->workers = 1;
}

cfv_status cfv_run_classify(const cfv_classify_opts* o, double* out_mean_accuracy,
                            double* out_stddev_accuracy) {
    if (!o) return fail("cfv_run_classify: null options");
    CFV_TRY
    cfv::pipeline::ClassifyOptions opt;
    opt.train_manifest = opt_str(o->train_manifest);
    opt.test_manifest = opt_str(o->test_manifest);
    opt.pooled_manifest = opt_str(o->pooled_manifest);
    opt.train_fraction = o->train_fraction;
    opt.repeats = o->repeats;
    opt.seed = o->seed;
    opt.train = to_svm_config(&o->svm);
    opt.report_path = opt_str(o->report_path);
    opt.workers = o->workers;
    cfv::pipeline::ClassifyReport r = cfv::pipeline::run_classify(opt);
    if (out_mean_accuracy) *out_mean_accuracy = r.mean_accuracy;
    if (out_stddev_accuracy) *out_stddev_accuracy = r.stddev_accuracy;
    return CFV_OK;
    CFV_CATCH
}

void cfv_analyze_opts_init(cfv_analyze_opts* o) {
    if (!o) return;
    *o = {};
    o->bins = 20;
    o->workers = 1;
}

cfv_status cfv_run_analyze(const cfv_analyze_opts* o) {
    if (!o) return fail("cfv_run_analyze: null options");
    CFV_TRY
    cfv::pipeline::AnalyzeOptions opt;
    opt.container_path = opt_str(o->container);
    opt.train_manifest = opt_str(o->train_manifest);
    opt.test_manifest = opt_str(o->test_manifest);
    opt.bins = o->bins;
    opt.output_prefix = opt_str(o->output_prefix);
    opt.workers = o->workers;
    cfv::pipeline::run_analyze(opt);
    return CFV_OK;
    CFV_CATCH
}

void cfv_synth_bench_opts_init(cfv_synth_bench_opts* o) {
    if (!o) return;
    *o = {};
    o->images_per_class = 100;
    o->descriptors_per_image = 200;
    o->workers = 1;
}

cfv_status cfv_run_synth_bench(const cfv_synth_bench_opts* o) {
    if (!o) return fail("cfv_run_synth_bench: null options");
    CFV_TRY
    cfv::pipeline::SynthBenchOptions opt;
    opt.output_dir = opt_str(o->output_dir);
    opt.seed = o->seed;
    opt.images_per_class = o->images_per_class;
    opt.descriptors_per_image = o->descriptors_per_image;
    if (o->pca_dims && o->num_pca_dims > 0) {
        opt.pca_dims.clear();
        for (int32_t i = 0; i < o->num_pca_dims; ++i)
            opt.pca_dims.push_back(static_cast<std::size_t>(o->pca_dims[i]));
    }
    if (o->ks && o->num_ks > 0) {
        opt.ks.clear();
        for (int32_t i = 0; i < o->num_ks; ++i)
            opt.ks.push_back(static_cast<std::size_t>(o->ks[i]));
    }
    opt.workers = o->workers;
    cfv::pipeline::run_synth_bench(opt);
    return CFV_OK;
    CFV_CATCH
}

}  // extern "C"
