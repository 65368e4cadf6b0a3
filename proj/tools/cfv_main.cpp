// cfv — pipeline driver for the Completed Fisher Vector library.
//
// Thin wrapper over the C API: each subcommand fills an options struct and
// calls the matching cfv_run_* entry point. Exit codes: 0 success,
// 2 validation error, 3 data/format error, 4 numeric failure, 1 internal.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "cfv/cfv.h"

namespace {

int finish(cfv_status status) {
    if (status != CFV_OK) std::fprintf(stderr, "error: %s\n", cfv_last_error());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfv — Completed Fisher Vector encoding pipeline"};
    app.require_subcommand(1);
    app.footer("library version: " + std::string(cfv_version()));

    // Each subcommand accepts a flat key=value config file; flags given on
    // the command line win over config values.
    const auto add_config = [](CLI::App* sub) {
        sub->set_config("--config", "", "flat key=value config file; flags win");
    };

    // ---- extract -----------------------------------------------------------
    auto* extract = app.add_subcommand("extract", "extract dense descriptors from images");
    add_config(extract);
    std::string ex_input, ex_list, ex_labels, ex_out, ex_desc = "lbp";
    cfv_extract_opts eo;
    cfv_extract_opts_init(&eo);
    extract->add_option("--input-dir", ex_input, "directory of .png/.ppm/.pgm images");
    extract->add_option("--list", ex_list, "CSV of image path,label (alternative to --input-dir)");
    extract->add_option("--labels", ex_labels, "sidecar CSV path,label for --input-dir");
    extract->add_option("--out", ex_out, "output directory for .cfvd files")->required();
    extract->add_option("--descriptor", ex_desc, "lbp | gradhist (default lbp)");
    extract->add_option("--lbp-patch", eo.lbp.patch, "LBP patch size (default 16)");
    extract->add_option("--lbp-step", eo.lbp.step, "LBP grid step (default 8)");
    extract->add_option("--grad-bins", eo.gradhist.bins, "orientation bins (default 8)");
    extract->add_option("--grad-cells", eo.gradhist.cells, "cells per side (default 4)");
    extract->add_option("--grad-cell-px", eo.gradhist.cell_px, "pixels per cell (default 4)");
    extract->add_option("--grad-step", eo.gradhist.step, "grid step (default 4)");
    extract->add_option("--scales", eo.multiscale.num_scales, "number of scales (default 7)");
    extract->add_option("--ratio-max", eo.multiscale.ratio_max, "largest ratio (default 2.0)");
    extract->add_option("--scale-factor", eo.multiscale.factor,
                        "ratio between scales (default sqrt(2))");
    extract->add_option("--threads", eo.workers, "worker threads (default 1)");

    // ---- train-models -------------------------------------------------------
    auto* train = app.add_subcommand("train-models", "fit PCA and GMM, write a model container");
    std::string tm_manifest, tm_out, tm_cov = "diag", tm_path = "direct";
    cfv_train_models_opts to;
    cfv_train_models_opts_init(&to);
    train->add_option("--manifest", tm_manifest, "training descriptor manifest")->required();
    train->add_option("--out", tm_out, "output container path")->required();
    train->add_option("--pca-dim", to.pca_dim, "descriptor dimension after PCA")->required();
    train->add_flag("--pca-whiten", "rescale PCA axes by eigenvalue^{-1/2} (default off)");
    train->add_option("--k", to.gmm_k, "GMM component count")->required();
    train->add_option("--cov", tm_cov, "diag | full (default diag)");
    train->add_option("--full-cov-path", tm_path,
                      "direct | refit: full covariances by direct EM or re-estimated from a "
                      "diagonal model's responsibilities (default direct)");
    train->add_option("--pca-subsample", to.pca_subsample,
                      "descriptor cap for PCA fitting (default 200000)");
    train->add_option("--gmm-subsample", to.gmm_subsample,
                      "descriptor cap for EM (default 500000)");
    train->add_option("--seed", to.seed, "root seed (default 0)");
    train->add_option("--em-max-iters", to.em.max_iters, "EM iteration cap (default 200)");
    train->add_option("--em-rel-tol", to.em.rel_tol,
                      "EM relative improvement threshold (default 1e-6)");
    train->add_option("--em-floor", to.em.covariance_floor,
                      "covariance floor; <=0 selects 1e-4 of mean feature variance");
    train->add_option("--em-restarts", to.em.restarts, "EM restarts (default 1)");
    train->add_option("--alpha", to.encoding.alpha, "stored encoding alpha (default 0.25)");
    train->add_option("--gamma", to.encoding.gamma, "stored encoding gamma (default 0.5)");
    train->add_option("--threads", to.workers, "worker threads (default 1)");

    // ---- encode -------------------------------------------------------------
    auto* encode = app.add_subcommand("encode", "encode descriptor files against a container");
    std::string en_manifest, en_container, en_out, en_kind = "cfv", en_text;
    cfv_encode_opts no;
    cfv_encode_opts_init(&no);
    int en_power = -1, en_l2 = -1, en_compat = -1;
    encode->add_option("--manifest", en_manifest, "descriptor manifest")->required();
    encode->add_option("--container", en_container, "model container")->required();
    encode->add_option("--out", en_out, "output directory for .cfve files")->required();
    encode->add_option("--encoder", en_kind, "bow | fv | cfv (default cfv)");
    encode->add_option("--alpha", no.alpha, "override stored alpha (negative keeps it)");
    encode->add_option("--gamma", no.gamma, "override stored gamma (negative keeps it)");
    encode->add_option("--power-norm", en_power, "0/1 override of power normalization");
    encode->add_option("--l2", en_l2, "0/1 override of L2 normalization (bow defaults to 0)");
    encode->add_option("--fv-compat-scale", en_compat,
                       "0/1: divide second-order diagonals by sqrt(2)");
    encode->add_option("--text-out", en_text, "also write all vectors as text, one per line");
    encode->add_option("--threads", no.workers, "worker threads (default 1)");

    // ---- classify -----------------------------------------------------------
    auto* classify = app.add_subcommand("classify", "train and evaluate a one-vs-all linear SVM");
    std::string cl_train, cl_test, cl_pooled, cl_report;
    cfv_classify_opts co;
    cfv_classify_opts_init(&co);
    classify->add_option("--train-manifest", cl_train, "encoded manifest for a fixed split");
    classify->add_option("--test-manifest", cl_test, "encoded manifest for a fixed split");
    classify->add_option("--manifest", cl_pooled,
                         "pooled encoded manifest for repeated random splits");
    classify->add_option("--train-fraction", co.train_fraction,
                         "per-class training fraction for random splits (default 0.5)");
    classify->add_option("--repeats", co.repeats, "number of random splits (default 10)");
    classify->add_option("--seed", co.seed, "root seed (default 0)");
    classify->add_option("--svm-c", co.svm.c, "SVM C parameter (default 1.0)");
    classify->add_option("--svm-epochs", co.svm.max_epochs, "solver epoch cap (default 100)");
    classify->add_option("--svm-tol", co.svm.tolerance, "solver tolerance (default 1e-4)");
    classify->add_option("--report", cl_report, "write the text report here");
    classify->add_option("--threads", co.workers, "worker threads (default 1)");

    // ---- analyze --------------------------------------------------------------
    auto* analyze = app.add_subcommand(
        "analyze", "per-component correlation-coefficient histograms under soft assignment");
    std::string an_container, an_train, an_test, an_prefix;
    cfv_analyze_opts ao;
    cfv_analyze_opts_init(&ao);
    analyze->add_option("--container", an_container, "model container")->required();
    analyze->add_option("--train-manifest", an_train, "descriptor manifest (train split)");
    analyze->add_option("--test-manifest", an_test, "descriptor manifest (test split)");
    analyze->add_option("--out-prefix", an_prefix, "output prefix for .txt/.dat files")
        ->required();
    analyze->add_option("--bins", ao.bins, "histogram bins over [0,1] (default 20)");
    analyze->add_option("--threads", ao.workers, "worker threads (default 1)");

    // ---- synth-bench ---------------------------------------------------------
    auto* bench = app.add_subcommand(
        "synth-bench", "FV-vs-CFV comparison on the synthetic two-class benchmark");
    std::string sb_out;
    cfv_synth_bench_opts so;
    cfv_synth_bench_opts_init(&so);
    std::vector<int32_t> sb_dims{3}, sb_ks{2, 4, 8, 16};
    bench->add_option("--out", sb_out, "output directory")->required();
    bench->add_option("--seed", so.seed, "root seed (default 0)");
    bench->add_option("--images-per-class", so.images_per_class, "default 100");
    bench->add_option("--descriptors-per-image", so.descriptors_per_image, "default 200");
    bench->add_option("--pca-dims", sb_dims, "PCA dimensions to sweep (default 3)");
    bench->add_option("--ks", sb_ks, "GMM sizes to sweep (default 2 4 8 16)");
    bench->add_option("--threads", so.workers, "worker threads (default 1)");

    CLI11_PARSE(app, argc, argv);

    if (*extract) {
        eo.input_dir = ex_input.empty() ? nullptr : ex_input.c_str();
        eo.list_file = ex_list.empty() ? nullptr : ex_list.c_str();
        eo.labels_file = ex_labels.empty() ? nullptr : ex_labels.c_str();
        eo.output_dir = ex_out.c_str();
        eo.descriptor = ex_desc == "gradhist" ? CFV_DESC_GRADHIST : CFV_DESC_LBP;
        int64_t images = 0;
        const cfv_status s = cfv_run_extract(&eo, &images);
        if (s == CFV_OK)
            std::printf("extracted %lld image(s) into %s\n",
                        static_cast<long long>(images), ex_out.c_str());
        return finish(s);
    }

    if (*train) {
        to.manifest = tm_manifest.c_str();
        to.output_container = tm_out.c_str();
        to.pca_whiten = train->count("--pca-whiten") > 0;
        to.cov_kind = tm_cov == "full" ? CFV_COV_FULL : CFV_COV_DIAGONAL;
        if (tm_cov != "full" && tm_cov != "diag") {
            std::fprintf(stderr, "error: --cov must be 'diag' or 'full'\n");
            return 2;
        }
        to.full_cov_path = tm_path.c_str();
        const cfv_status s = cfv_run_train_models(&to);
        if (s == CFV_OK) std::printf("wrote model container %s\n", tm_out.c_str());
        return finish(s);
    }

    if (*encode) {
        no.manifest = en_manifest.c_str();
        no.container = en_container.c_str();
        no.output_dir = en_out.c_str();
        no.kind = parse_encoder(en_kind);
        no.power_norm = en_power;
        no.l2_norm = en_l2;
        no.fv_compat_scale = en_compat;
        no.text_output = en_text.empty() ? nullptr : en_text.c_str();
        int64_t length = 0;
        const cfv_status s = cfv_run_encode(&no, &length);
        if (s == CFV_OK)
            std::printf("encoded vectors of length %lld into %s\n",
                        static_cast<long long>(length), en_out.c_str());
        return finish(s);
    }

    if (*classify) {
        co.train_manifest = cl_train.empty() ? nullptr : cl_train.c_str();
        co.test_manifest = cl_test.empty() ? nullptr : cl_test.c_str();
        co.pooled_manifest = cl_pooled.empty() ? nullptr : cl_pooled.c_str();
        co.report_path = cl_report.empty() ? nullptr : cl_report.c_str();
        double mean = 0.0, sd = 0.0;
        const cfv_status s = cfv_run_classify(&co, &mean, &sd);
        if (s == CFV_OK) std::printf("accuracy %.6f +/- %.6f\n", mean, sd);
        return finish(s);
    }

    if (*analyze) {
        ao.container = an_container.c_str();
        ao.train_manifest = an_train.empty() ? nullptr : an_train.c_str();
        ao.test_manifest = an_test.empty() ? nullptr : an_test.c_str();
        ao.output_prefix = an_prefix.c_str();
        const cfv_status s = cfv_run_analyze(&ao);
        if (s == CFV_OK) std::printf("wrote histograms with prefix %s\n", an_prefix.c_str());
        return finish(s);
    }

    if (*bench) {
        so.output_dir = sb_out.c_str();
        so.pca_dims = sb_dims.data();
        so.num_pca_dims = static_cast<int32_t>(sb_dims.size());
        so.ks = sb_ks.data();
        so.num_ks = static_cast<int32_t>(sb_ks.size());
        const cfv_status s = cfv_run_synth_bench(&so);
        if (s == CFV_OK) std::printf("wrote benchmark report under %s\n", sb_out.c_str());
        return finish(s);
    }

    return 0;
}
