#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "container.hpp"
#include "encoders.hpp"
#include "gmm.hpp"
#include "svm.hpp"

namespace cfv::pipeline {

// Manifest row: a file path plus its class label. Manifests are CSV files of
// "path,label" lines with a "path,label" header.
struct ManifestRow {
    std::string path;
    std::string label;
};
std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------

struct ExtractOptions {
    std::string input_dir;    // scanned for .png/.ppm/.pgm (sorted); needs labels_file
    std::string list_file;    // alternative: explicit CSV of image path,label
    std::string labels_file;  // sidecar CSV: path (relative to input_dir),label
    std::string output_dir;
    std::string descriptor = "lbp";  // lbp | gradhist
    int lbp_patch = 16, lbp_step = 8;
    int grad_bins = 8, grad_cells = 4, grad_cell_px = 4, grad_step = 4;
    int num_scales = 7;
    double ratio_max = 2.0;
    double scale_factor = 1.4142135623730951;
    int workers = 1;
};

struct ExtractReport {
    std::size_t images = 0;
    std::string manifest_path;
    std::vector<std::string> warnings;
};

ExtractReport run_extract(const ExtractOptions& opt);

// ---------------------------------------------------------------------------

struct TrainModelsOptions {
    std::string manifest;  // training descriptor files
    std::string output_container;
    std::size_t pca_dim = 0;
    bool pca_whiten = false;
    std::size_t gmm_k = 0;
    gmm::CovarianceKind cov_kind = gmm::CovarianceKind::diagonal;
    // For full covariances: "direct" EM, or "refit" full covariances from a
    // diagonal-trained model's responsibilities.
    std::string full_cov_path = "direct";
    std::size_t pca_subsample = 200000;
    std::size_t gmm_subsample = 500000;
    std::uint64_t seed = 0;
    gmm::EmConfig em;
    enc::EncodingConfig encoding;
    int workers = 1;
};

struct TrainModelsReport {
    std::size_t descriptors_pooled = 0;
    std::size_t pca_sample = 0, gmm_sample = 0;
    Vector loglik_per_iter;
    std::vector<std::string> warnings;
};

TrainModelsReport run_train_models(const TrainModelsOptions& opt);

// ---------------------------------------------------------------------------

struct EncodeOptions {
    std::string manifest;  // descriptor files
    std::string container_path;
    std::string output_dir;
    enc::EncoderKind kind = enc::EncoderKind::cfv;
    // Overrides of the container's encoding config; unset fields keep it.
    std::optional<double> alpha, gamma;
    std::optional<bool> power_norm, l2_norm;
    std::optional<bool> fv_compat_scale;
    std::string text_output;  // optional: all vectors, one line each
    int workers = 1;
};

struct EncodeReport {
    std::size_t encoded = 0;
    std::size_t vector_length = 0;
    std::string manifest_path;
};

EncodeReport run_encode(const EncodeOptions& opt);

// ---------------------------------------------------------------------------

struct ClassifyOptions {
    // Fixed split: both manifests set (repeats forced to 1), or random splits
    // drawn from pooled_manifest.
    std::string train_manifest, test_manifest;
    std::string pooled_manifest;
    double train_fraction = 0.5;
    int repeats = 10;
    std::uint64_t seed = 0;
    svm::TrainConfig train;
    std::string report_path;  // optional text report
    int workers = 1;
};

struct ClassifyReport {
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;  // sample stddev over splits (0 when R = 1)
    std::vector<double> split_accuracies;
    Matrix confusion;  // summed over splits
    std::vector<std::string> class_names;
    Vector per_class_accuracy;
    // Provenance from the encoded-vector headers.
    std::string encoder;
    std::size_t K = 0, D = 0;
    double alpha = 0.0, gamma = 0.0;
};

ClassifyReport run_classify(const ClassifyOptions& opt);
void write_classify_report(const ClassifyReport& r, std::ostream& os);

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    std::string container_path;
    std::string train_manifest, test_manifest;  // at least one
    int bins = 20;
    std::string output_prefix;  // writes <prefix>_<split>.txt and .dat
    int workers = 1;
};

struct AnalyzeReport {
    std::optional<analysis::CorrelationHistogram> train, test;
    std::vector<std::string> outputs;
};

AnalyzeReport run_analyze(const AnalyzeOptions& opt);
void write_histogram_table(const analysis::CorrelationHistogram& h, std::ostream& os);
void write_histogram_gnuplot(const analysis::CorrelationHistogram& h, std::ostream& os);

// ---------------------------------------------------------------------------

struct SynthBenchOptions {
    std::string output_dir;
    std::uint64_t seed = 0;
    int images_per_class = 100;
    int descriptors_per_image = 200;
    std::vector<std::size_t> pca_dims = {3};
    std::vector<std::size_t> ks = {2, 4, 8, 16};
    int workers = 1;
};

struct SynthBenchCell {
    std::string encoder;
    std::size_t pca_dim = 0, k = 0;
    double train_accuracy = 0.0, test_accuracy = 0.0;
};

struct SynthBenchReport {
    std::vector<SynthBenchCell> cells;  // fv/cfv pairs per (D, K)
    std::string csv_path;
    std::string figure1_path;
};

SynthBenchReport run_synth_bench(const SynthBenchOptions& opt);

}  // namespace cfv::pipeline
