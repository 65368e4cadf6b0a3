#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "descriptors.hpp"
#include "image.hpp"
#include "io_util.hpp"
#include "reduce.hpp"
#include "rng.hpp"
#include "synthdata.hpp"

namespace fs = std::filesystem;

namespace cfv::pipeline {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Rows are "path,label"; the label follows the last comma so paths may
// contain commas, labels may not.
ManifestRow parse_row(const std::string& line, const std::string& file) {
    const auto pos = line.find_last_of(',');
    require(pos != std::string::npos && pos > 0 && pos + 1 < line.size(), ErrorCode::data,
            "malformed manifest line in " + file + ": " + line);
    return {line.substr(0, pos), line.substr(pos + 1)};
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::size_t peek_descriptor_dim(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    const char magic[4] = {'C', 'F', 'V', 'D'};
    io::expect_magic(is, magic, "CFVD descriptor");
    io::read_le<std::uint16_t>(is, "version");
    io::read_le<std::uint32_t>(is, "count");
    return io::read_le<std::uint32_t>(is, "dim");
}

// Uniform subsample without replacement; identity when cap >= n.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t cap, Rng rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (cap >= n) return idx;
    // Partial Fisher-Yates: the first `cap` entries form the sample.
    for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_index(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(rows[i], j);
    return out;
}

struct Pool {
    Matrix data;
    std::size_t dim = 0;
};

Pool load_descriptor_pool(const std::vector<ManifestRow>& rows) {
    require(!rows.empty(), ErrorCode::validation, "empty descriptor manifest");
    std::vector<desc::DescriptorSet> sets;
    sets.reserve(rows.size());
    std::size_t total = 0, dim = 0;
    for (const auto& r : rows) {
        desc::DescriptorSet s = desc::load_descriptors(r.path);
        require(s.count > 0, ErrorCode::data, "descriptor file is empty: " + r.path);
        if (dim == 0) dim = s.dim;
        require(s.dim == dim, ErrorCode::data,
                "descriptor dimension mismatch across manifest: " + r.path);
        total += s.count;
        sets.push_back(std::move(s));
    }
    Pool pool;
    pool.dim = dim;
    pool.data = Matrix(total, dim);
    std::size_t row = 0;
    for (const auto& s : sets)
        for (std::size_t i = 0; i < s.count; ++i, ++row)
            for (std::size_t j = 0; j < dim; ++j) pool.data(row, j) = s.data(i, j);
    return pool;
}

std::string sanitize_stem(const std::string& rel) {
    std::string out = rel;
    for (char& c : out)
        if (c == '/' || c == '\\' || c == ' ') c = '_';
    const auto dot = out.find_last_of('.');
    if (dot != std::string::npos && dot > 0) out.resize(dot);
    return out;
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<ManifestRow> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == 0 && lines[i] == "path,label") continue;
        rows.push_back(parse_row(lines[i], path));
    }
    require(!rows.empty(), ErrorCode::data, "manifest has no rows: " + path);
    return rows;
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path) {
    std::ofstream os(path);
    require(os.good(), ErrorCode::data, "cannot open for writing: " + path);
    os << "path,label\n";
    for (const auto& r : rows) os << r.path << ',' << r.label << '\n';
    require(os.good(), ErrorCode::data, "write failed: " + path);
}

// ---------------------------------------------------------------------------

ExtractReport run_extract(const ExtractOptions& opt) {
    require(!opt.output_dir.empty(), ErrorCode::validation, "extract: output_dir is required");
    require(opt.descriptor == "lbp" || opt.descriptor == "gradhist", ErrorCode::validation,
            "extract: descriptor must be 'lbp' or 'gradhist'");
    require(opt.num_scales >= 1 && opt.ratio_max > 0.0 && opt.scale_factor > 1.0,
            ErrorCode::validation, "extract: bad multiscale parameters");

    // Assemble (image path, label) pairs.
    std::vector<ManifestRow> inputs;
    if (!opt.list_file.empty()) {
        inputs = read_manifest(opt.list_file);
    } else {
        require(!opt.input_dir.empty(), ErrorCode::validation,
                "extract: need input_dir or list_file");
        require(!opt.labels_file.empty(), ErrorCode::validation,
                "extract: labels_file is required with input_dir");
        std::map<std::string, std::string> labels;
        for (const auto& r : read_manifest(opt.labels_file)) labels[r.path] = r.label;

        std::vector<std::string> rels;
        require(fs::is_directory(opt.input_dir), ErrorCode::data,
                "extract: input_dir does not exist: " + opt.input_dir);
        for (const auto& e : fs::recursive_directory_iterator(opt.input_dir)) {
            if (!e.is_regular_file()) continue;
            const std::string ext = e.path().extension().string();
            if (ext == ".png" || ext == ".ppm" || ext == ".pgm")
                rels.push_back(fs::relative(e.path(), opt.input_dir).string());
        }
        std::sort(rels.begin(), rels.end());
        require(!rels.empty(), ErrorCode::data,
                "extract: no images found in " + opt.input_dir + " (count 0)");
        for (const auto& rel : rels) {
            auto it = labels.find(rel);
            require(it != labels.end(), ErrorCode::data,
                    "extract: no label for image '" + rel + "' in " + opt.labels_file);
            inputs.push_back({(fs::path(opt.input_dir) / rel).string(), it->second});
        }
    }

    fs::create_directories(opt.output_dir);
    desc::Extractor extractor;
    if (opt.descriptor == "lbp") {
        const int patch = opt.lbp_patch, step = opt.lbp_step;
        extractor = [patch, step](const img::Image& im) { return desc::dense_lbp(im, patch, step); };
    } else {
        const int b = opt.grad_bins, c = opt.grad_cells, p = opt.grad_cell_px, s = opt.grad_step;
        extractor = [b, c, p, s](const img::Image& im) {
            return desc::dense_gradhist(im, b, c, p, s);
        };
    }

    std::vector<ManifestRow> out_rows(inputs.size());
    std::vector<std::vector<std::string>> warn_slots(inputs.size());
    parallel_for(inputs.size(), opt.workers, [&](std::size_t i) {
        img::Image image = img::load_image(inputs[i].path);
        desc::DescriptorSet set =
            desc::multiscale(image, extractor, opt.num_scales, opt.ratio_max, opt.scale_factor,
                             &warn_slots[i]);
        set.source_id = inputs[i].path;
        const std::string rel =
            opt.input_dir.empty() ? fs::path(inputs[i].path).filename().string()
                                  : fs::relative(inputs[i].path, opt.input_dir).string();
        const std::string out_path =
            (fs::path(opt.output_dir) / (sanitize_stem(rel) + ".cfvd")).string();
        desc::save_descriptors(set, out_path);
        out_rows[i] = {out_path, inputs[i].label};
    });

    ExtractReport report;
    report.images = inputs.size();
    report.manifest_path = (fs::path(opt.output_dir) / "manifest.csv").string();
    write_manifest(out_rows, report.manifest_path);
    for (auto& slot : warn_slots)
        for (auto& w : slot) report.warnings.push_back(std::move(w));
    return report;
}

// ---------------------------------------------------------------------------

TrainModelsReport run_train_models(const TrainModelsOptions& opt) {
    require(!opt.output_container.empty(), ErrorCode::validation,
            "train-models: output container path is required");
    require(opt.pca_dim >= 1, ErrorCode::validation, "train-models: pca_dim must be >= 1");
    require(opt.gmm_k >= 1, ErrorCode::validation, "train-models: gmm K must be >= 1");
    require(opt.pca_subsample >= 1 && opt.gmm_subsample >= 1, ErrorCode::validation,
            "train-models: subsample caps must be positive");
    require(opt.full_cov_path == "direct" || opt.full_cov_path == "refit",
            ErrorCode::validation, "train-models: full_cov_path must be 'direct' or 'refit'");
    opt.em.validate();
    opt.encoding.validate();

    const std::vector<ManifestRow> rows = read_manifest(opt.manifest);
    // Header-only check so bad configs fail before the pool is loaded.
    const std::size_t file_dim = peek_descriptor_dim(rows.front().path);
    require(opt.pca_dim <= file_dim, ErrorCode::validation,
            "train-models: pca_dim " + std::to_string(opt.pca_dim) +
                " exceeds descriptor dimension " + std::to_string(file_dim));

    Pool pool = load_descriptor_pool(rows);
    TrainModelsReport report;
    report.descriptors_pooled = pool.data.rows();

    // PCA on a capped uniform subsample.
    const auto pca_idx = subsample_indices(pool.data.rows(), opt.pca_subsample,
                                           Rng::stream(opt.seed, "pca-subsample"));
    report.pca_sample = pca_idx.size();
    const Matrix pca_points = select_rows(pool.data, pca_idx);
    require(pca_points.rows() > opt.pca_dim, ErrorCode::validation,
            "train-models: not enough descriptors for the requested pca_dim");
    linalg::PcaModel pca = linalg::pca_fit(pca_points, opt.pca_dim, opt.pca_whiten);

    // GMM on a capped subsample, in the reduced space.
    const auto gmm_idx = subsample_indices(pool.data.rows(), opt.gmm_subsample,
                                           Rng::stream(opt.seed, "gmm-subsample"));
    report.gmm_sample = gmm_idx.size();
    const Matrix train = linalg::pca_apply(pca, select_rows(pool.data, gmm_idx));
    require(train.rows() >= opt.gmm_k, ErrorCode::validation,
            "train-models: insufficient descriptors for the requested K");

    gmm::EmConfig em = opt.em;
    em.seed = Rng::stream(opt.seed, "gmm-init").next_u64();
    em.workers = opt.workers;

    io::ModelContainer container;
    if (opt.cov_kind == gmm::CovarianceKind::full && opt.full_cov_path == "refit") {
        gmm::FitResult diag = gmm::fit_em(train, opt.gmm_k, gmm::CovarianceKind::diagonal, em);
        report.loglik_per_iter = diag.loglik_per_iter;
        report.warnings = diag.warnings;
        container.gmm = gmm::refit_full_from_posteriors(diag.model, train, em.covariance_floor,
                                                        opt.workers);
    } else {
        gmm::FitResult fit = gmm::fit_em(train, opt.gmm_k, opt.cov_kind, em);
        report.loglik_per_iter = fit.loglik_per_iter;
        report.warnings = fit.warnings;
        container.gmm = std::move(fit.model);
    }
    container.pca = std::move(pca);
    container.encoding = opt.encoding;
    io::save_container(container, opt.output_container);
    return report;
}

// ---------------------------------------------------------------------------

EncodeReport run_encode(const EncodeOptions& opt) {
    require(!opt.output_dir.empty(), ErrorCode::validation, "encode: output_dir is required");
    const io::ModelContainer container = io::load_container(opt.container_path);
    require(container.pca.has_value(), ErrorCode::data,
            "encode: container has no PCA section: " + opt.container_path);
    require(container.gmm.has_value(), ErrorCode::data,
            "encode: container has no GMM section: " + opt.container_path);
    if (opt.kind == enc::EncoderKind::fv)
        require(container.gmm->kind == gmm::CovarianceKind::diagonal, ErrorCode::validation,
                "encode: fv requires diagonal covariances but the container holds a "
                "full-covariance GMM; use the cfv encoder or retrain with cov=diag");

    enc::EncodingConfig config =
        container.encoding.value_or(enc::EncodingConfig{});
    if (opt.alpha) config.alpha = *opt.alpha;
    if (opt.gamma) config.gamma = *opt.gamma;
    if (opt.power_norm) config.apply_power_norm = *opt.power_norm;
    if (opt.fv_compat_scale) config.fv_compat_scale = *opt.fv_compat_scale;
    // BoW stays a plain histogram unless L2 is explicitly requested.
    if (opt.l2_norm)
        config.apply_l2_norm = *opt.l2_norm;
    else if (opt.kind == enc::EncoderKind::bow)
        config.apply_l2_norm = false;
    config.validate();

    const std::vector<ManifestRow> rows = read_manifest(opt.manifest);
    fs::create_directories(opt.output_dir);

    std::vector<ManifestRow> out_rows(rows.size());
    std::vector<enc::EncodedVector> encoded(rows.size());
    parallel_for(rows.size(), opt.workers, [&](std::size_t i) {
        desc::DescriptorSet set = desc::load_descriptors(rows[i].path);
        require(set.count > 0, ErrorCode::data,
                "encode: descriptor file is empty, nothing to encode: " + rows[i].path);
        require(set.dim == container.pca->input_dim, ErrorCode::data,
                "encode: descriptor dimension does not match the PCA model: " + rows[i].path);
        const Matrix reduced = linalg::pca_apply(*container.pca, set.data);
        enc::EncodedVector v;
        switch (opt.kind) {
            case enc::EncoderKind::bow:
                v = enc::encode_bow(*container.gmm, reduced, config);
                break;
            case enc::EncoderKind::fv:
                v = enc::encode_fv(*container.gmm, reduced, config);
                break;
            case enc::EncoderKind::cfv:
                v = enc::encode_cfv(*container.gmm, reduced, config);
                break;
        }
        const std::string stem = sanitize_stem(fs::path(rows[i].path).filename().string());
        const std::string out_path = (fs::path(opt.output_dir) / (stem + ".cfve")).string();
        enc::save_encoded(v, out_path);
        out_rows[i] = {out_path, rows[i].label};
        encoded[i] = std::move(v);
    });

    EncodeReport report;
    report.encoded = rows.size();
    report.vector_length = encoded.front().values.size();
    report.manifest_path = (fs::path(opt.output_dir) / "manifest.csv").string();
    write_manifest(out_rows, report.manifest_path);
    if (!opt.text_output.empty()) {
        std::ofstream os(opt.text_output);
        require(os.good(), ErrorCode::data, "cannot open for writing: " + opt.text_output);
        for (const auto& v : encoded) enc::write_encoded_text(v, os);
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct EncodedDataset {
    Matrix features;
    std::vector<int> label_ids;            // indices into names
    std::vector<std::string> names;        // sorted unique labels
    enc::EncodedVector first;              // provenance
};

EncodedDataset load_encoded_dataset(const std::vector<ManifestRow>& rows,
                                    const std::vector<std::string>& names) {
    EncodedDataset ds;
    ds.names = names;
    std::vector<enc::EncodedVector> vecs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        vecs[i] = enc::load_encoded(rows[i].path);
        require(vecs[i].values.size() == vecs[0].values.size(), ErrorCode::data,
                "classify: encoded vector length varies across files: " + rows[i].path);
    }
    ds.first = vecs[0];
    ds.features = Matrix(rows.size(), vecs[0].values.size());
    ds.label_ids.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < vecs[i].values.size(); ++j)
            ds.features(i, j) = vecs[i].values[j];
        const auto it = std::lower_bound(names.begin(), names.end(), rows[i].label);
        require(it != names.end() && *it == rows[i].label, ErrorCode::data,
                "classify: unknown label " + rows[i].label);
        ds.label_ids[i] = static_cast<int>(it - names.begin());
    }
    return ds;
}

std::vector<std::string> collect_names(std::initializer_list<const std::vector<ManifestRow>*> lists) {
    std::vector<std::string> names;
    for (const auto* rows : lists)
        for (const auto& r : *rows) names.push_back(r.label);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

}  // namespace

ClassifyReport run_classify(const ClassifyOptions& opt) {
    opt.train.validate();
    const bool fixed = !opt.train_manifest.empty() || !opt.test_manifest.empty();
    const bool pooled = !opt.pooled_manifest.empty();
    require(fixed != pooled, ErrorCode::validation,
            "classify: provide either train+test manifests or a pooled manifest");

    ClassifyReport report;

    auto run_split = [&](const Matrix& ftr, const std::vector<int>& ltr, const Matrix& fte,
                         const std::vector<int>& lte, std::uint64_t split_seed) {
        svm::TrainConfig cfg = opt.train;
        cfg.seed = split_seed;
        cfg.workers = opt.workers;
        const svm::LinearSvmModel model = svm::train_ova(ftr, ltr, cfg);
        const svm::EvalResult test_eval = svm::evaluate(model, fte, lte);
        report.split_accuracies.push_back(test_eval.accuracy);
        if (report.confusion.rows() == 0)
            report.confusion = Matrix(test_eval.confusion.rows(), test_eval.confusion.cols());
        for (std::size_t i = 0; i < report.confusion.rows(); ++i)
            for (std::size_t j = 0; j < report.confusion.cols(); ++j)
                report.confusion(i, j) += test_eval.confusion(i, j);
    };

    if (fixed) {
        require(!opt.train_manifest.empty() && !opt.test_manifest.empty(),
                ErrorCode::validation, "classify: both train and test manifests are required");
        const auto train_rows = read_manifest(opt.train_manifest);
        const auto test_rows = read_manifest(opt.test_manifest);
        const auto names = collect_names({&train_rows, &test_rows});
        const EncodedDataset tr = load_encoded_dataset(train_rows, names);
        const EncodedDataset te = load_encoded_dataset(test_rows, names);
        require(tr.features.cols() == te.features.cols(), ErrorCode::data,
                "classify: train/test encoded lengths differ");
        report.class_names = names;
        report.encoder = enc::encoder_kind_name(tr.first.kind);
        report.K = tr.first.K;
        report.D = tr.first.D;
        report.alpha = tr.first.config.alpha;
        report.gamma = tr.first.config.gamma;
        run_split(tr.features, tr.label_ids, te.features, te.label_ids,
                  Rng::stream(opt.seed, "svm-train").next_u64());
    } else {
        require(opt.train_fraction > 0.0 && opt.train_fraction < 1.0, ErrorCode::validation,
                "classify: train_fraction must lie in (0, 1)");
        require(opt.repeats >= 1, ErrorCode::validation, "classify: repeats must be >= 1");
        const auto rows = read_manifest(opt.pooled_manifest);
        const auto names = collect_names({&rows});
        const EncodedDataset ds = load_encoded_dataset(rows, names);
        report.class_names = names;
        report.encoder = enc::encoder_kind_name(ds.first.kind);
        report.K = ds.first.K;
        report.D = ds.first.D;
        report.alpha = ds.first.config.alpha;
        report.gamma = ds.first.config.gamma;

        std::vector<std::vector<std::size_t>> by_class(names.size());
        for (std::size_t i = 0; i < ds.label_ids.size(); ++i)
            by_class[ds.label_ids[i]].push_back(i);

        for (int r = 0; r < opt.repeats; ++r) {
            Rng rng = Rng::stream(opt.seed + static_cast<std::uint64_t>(r), "classify-split");
            std::vector<std::size_t> train_idx, test_idx;
            for (auto cls : by_class) {
                require(cls.size() >= 2, ErrorCode::validation,
                        "classify: a class has fewer than 2 samples, cannot split");
                rng.shuffle(cls);
                std::size_t ntrain = static_cast<std::size_t>(
                    std::lround(opt.train_fraction * static_cast<double>(cls.size())));
                ntrain = std::min(std::max<std::size_t>(ntrain, 1), cls.size() - 1);
                for (std::size_t i = 0; i < cls.size(); ++i)
                    (i < ntrain ? train_idx : test_idx).push_back(cls[i]);
            }
            auto gather = [&](const std::vector<std::size_t>& idx, Matrix& f,
                              std::vector<int>& l) {
                f = Matrix(idx.size(), ds.features.cols());
                l.resize(idx.size());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    for (std::size_t j = 0; j < ds.features.cols(); ++j)
                        f(i, j) = ds.features(idx[i], j);
                    l[i] = ds.label_ids[idx[i]];
                }
            };
            Matrix ftr, fte;
            std::vector<int> ltr, lte;
            gather(train_idx, ftr, ltr);
            gather(test_idx, fte, lte);
            run_split(ftr, ltr, fte, lte,
                      Rng::stream(opt.seed + static_cast<std::uint64_t>(r), "svm-train")
                          .next_u64());
        }
    }

    const std::size_t n = report.split_accuracies.size();
    double mean = 0.0;
    for (double a : report.split_accuracies) mean += a;
    mean /= static_cast<double>(n);
    report.mean_accuracy = mean;
    if (n > 1) {
        double ss = 0.0;
        for (double a : report.split_accuracies) ss += (a - mean) * (a - mean);
        report.stddev_accuracy = std::sqrt(ss / static_cast<double>(n - 1));
    }
    report.per_class_accuracy.assign(report.class_names.size(), 0.0);
    for (std::size_t c = 0; c < report.class_names.size(); ++c) {
        double row_total = 0.0;
        for (std::size_t j = 0; j < report.class_names.size(); ++j)
            row_total += report.confusion(c, j);
        report.per_class_accuracy[c] =
            row_total > 0.0 ? report.confusion(c, c) / row_total : 0.0;
    }

    if (!opt.report_path.empty()) {
        std::ofstream os(opt.report_path);
        require(os.good(), ErrorCode::data, "cannot open for writing: " + opt.report_path);
        write_classify_report(report, os);
    }
    return report;
}

void write_classify_report(const ClassifyReport& r, std::ostream& os) {
    os << "encoder: " << r.encoder << "  K: " << r.K << "  D: " << r.D
       << "  alpha: " << fmt(r.alpha, "%.4g") << "  gamma: " << fmt(r.gamma, "%.4g") << '\n';
    os << "splits: " << r.split_accuracies.size() << '\n';
    os << "accuracy_mean: " << fmt(r.mean_accuracy) << '\n';
    os << "accuracy_stddev: " << fmt(r.stddev_accuracy) << '\n';
    os << "split_accuracies:";
    for (double a : r.split_accuracies) os << ' ' << fmt(a);
    os << '\n';
    os << "per_class_accuracy:\n";
    for (std::size_t c = 0; c < r.class_names.size(); ++c)
        os << "  " << r.class_names[c] << ": " << fmt(r.per_class_accuracy[c]) << '\n';
    os << "confusion_rows_true_cols_predicted:\n";
    os << "  labels:";
    for (const auto& name : r.class_names) os << ' ' << name;
    os << '\n';
    for (std::size_t i = 0; i < r.class_names.size(); ++i) {
        os << "  " << r.class_names[i] << ':';
        for (std::size_t j = 0; j < r.class_names.size(); ++j)
            os << ' ' << static_cast<long long>(r.confusion(i, j));
        os << '\n';
    }
}

// ---------------------------------------------------------------------------

AnalyzeReport run_analyze(const AnalyzeOptions& opt) {
    require(!opt.train_manifest.empty() || !opt.test_manifest.empty(), ErrorCode::validation,
            "analyze: need at least one manifest");
    require(!opt.output_prefix.empty(), ErrorCode::validation,
            "analyze: output_prefix is required");
    const io::ModelContainer container = io::load_container(opt.container_path);
    require(container.pca.has_value() && container.gmm.has_value(), ErrorCode::data,
            "analyze: container must hold PCA and GMM sections");

    AnalyzeReport report;
    auto run_split = [&](const std::string& manifest, const char* split)
        -> analysis::CorrelationHistogram {
        std::vector<Matrix> sets;
        for (const auto& r : read_manifest(manifest)) {
            desc::DescriptorSet s = desc::load_descriptors(r.path);
            require(s.count > 0, ErrorCode::data, "analyze: empty descriptor file " + r.path);
            sets.push_back(linalg::pca_apply(*container.pca, s.data));
        }
        analysis::CorrelationHistogram h = analysis::correlation_histogram(
            *container.gmm, sets, opt.bins, 1e-8, opt.workers);
        const std::string txt = opt.output_prefix + "_" + split + ".txt";
        const std::string dat = opt.output_prefix + "_" + split + ".dat";
        {
            std::ofstream os(txt);
            require(os.good(), ErrorCode::data, "cannot open for writing: " + txt);
            write_histogram_table(h, os);
        }
        {
            std::ofstream os(dat);
            require(os.good(), ErrorCode::data, "cannot open for writing: " + dat);
            write_histogram_gnuplot(h, os);
        }
        report.outputs.push_back(txt);
        report.outputs.push_back(dat);
        return h;
    };
    if (!opt.train_manifest.empty()) report.train = run_split(opt.train_manifest, "train");
    if (!opt.test_manifest.empty()) report.test = run_split(opt.test_manifest, "test");
    return report;
}

void write_histogram_table(const analysis::CorrelationHistogram& h, std::ostream& os) {
    os << "# |rho| histogram over (image, component) pairs, K=" << h.K << " D=" << h.D
       << " sets=" << h.num_sets << " active_pairs=" << h.num_active_pairs << '\n';
    os << "bin_lo bin_hi frequency\n";
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b)
        os << fmt(h.bin_edges[b], "%.4f") << ' ' << fmt(h.bin_edges[b + 1], "%.4f") << ' '
           << fmt(h.frequencies[b], "%.9f") << '\n';
    os << "mass_below_0.05: " << fmt(h.mass_below_005, "%.9f") << '\n';
    os << "mass_0.05_to_0.5: " << fmt(h.mass_005_to_05, "%.9f") << '\n';
}

void write_histogram_gnuplot(const analysis::CorrelationHistogram& h, std::ostream& os) {
    os << "# bin_center frequency\n";
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b)
        os << fmt(0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]), "%.4f") << ' '
           << fmt(h.frequencies[b], "%.9f") << '\n';
}

// ---------------------------------------------------------------------------

SynthBenchReport run_synth_bench(const SynthBenchOptions& opt) {
    require(!opt.output_dir.empty(), ErrorCode::validation,
            "synth-bench: output_dir is required");
    require(!opt.pca_dims.empty() && !opt.ks.empty(), ErrorCode::validation,
            "synth-bench: pca_dims and ks must be non-empty");
    require(opt.images_per_class >= 4, ErrorCode::validation,
            "synth-bench: need at least 4 images per class");

    const fs::path root(opt.output_dir);
    fs::create_directories(root / "descriptors");

    // Benchmark data, written as CFVD files so the full file-based pipeline
    // runs end to end.
    synth::TwoClassData data =
        synth::twoclass_benchmark(opt.seed, opt.images_per_class, opt.descriptors_per_image);
    std::vector<ManifestRow> train_rows, test_rows;
    const int ntrain = (opt.images_per_class + 1) / 2;
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const std::string path =
            (root / "descriptors" / (sanitize_stem(data.images[i].source_id) + ".cfvd"))
                .string();
        desc::save_descriptors(data.images[i], path);
        const std::string label = "class" + std::to_string(data.labels[i]);
        const int within = static_cast<int>(i) % opt.images_per_class;
        (within < ntrain ? train_rows : test_rows).push_back({path, label});
    }
    const std::string train_manifest = (root / "train_manifest.csv").string();
    const std::string test_manifest = (root / "test_manifest.csv").string();
    write_manifest(train_rows, train_manifest);
    write_manifest(test_rows, test_manifest);

    SynthBenchReport report;
    for (std::size_t D : opt.pca_dims)
        for (std::size_t K : opt.ks)
            for (const char* encoder : {"fv", "cfv"}) {
                const bool is_cfv = std::string(encoder) == "cfv";
                const fs::path cell =
                    root / "work" /
                    (std::string(encoder) + "_d" + std::to_string(D) + "_k" + std::to_string(K));
                fs::create_directories(cell);

                TrainModelsOptions tm;
                tm.manifest = train_manifest;
                tm.output_container = (cell / "models.cfvm").string();
                tm.pca_dim = D;
                tm.gmm_k = K;
                tm.cov_kind =
                    is_cfv ? gmm::CovarianceKind::full : gmm::CovarianceKind::diagonal;
                tm.seed = opt.seed;
                tm.workers = opt.workers;
                run_train_models(tm);

                EncodeOptions eo;
                eo.container_path = tm.output_container;
                eo.kind = is_cfv ? enc::EncoderKind::cfv : enc::EncoderKind::fv;
                eo.workers = opt.workers;
                eo.manifest = train_manifest;
                eo.output_dir = (cell / "enc_train").string();
                const EncodeReport enc_train = run_encode(eo);
                eo.manifest = test_manifest;
                eo.output_dir = (cell / "enc_test").string();
                const EncodeReport enc_test = run_encode(eo);

                ClassifyOptions co;
                co.train_manifest = enc_train.manifest_path;
                co.test_manifest = enc_test.manifest_path;
                co.seed = opt.seed;
                co.workers = opt.workers;
                co.report_path = (cell / "classify.txt").string();
                const ClassifyReport cr = run_classify(co);

                SynthBenchCell out;
                out.encoder = encoder;
                out.pca_dim = D;
                out.k = K;
                out.test_accuracy = cr.mean_accuracy;
                // Training accuracy: evaluate the same fixed split on its own
                // training set via a second classify pass swapping manifests.
                ClassifyOptions co_train = co;
                co_train.test_manifest = enc_train.manifest_path;
                co_train.report_path.clear();
                out.train_accuracy = run_classify(co_train).mean_accuracy;
                report.cells.push_back(out);
            }

    // report.csv: one row per (encoder, D, K); the gap column is filled on
    // cfv rows.
    report.csv_path = (root / "report.csv").string();
    {
        std::ofstream os(report.csv_path);
        require(os.good(), ErrorCode::data, "cannot open for writing: " + report.csv_path);
        os << "encoder,pca_dim,k,train_accuracy,test_accuracy,gap_cfv_minus_fv\n";
        for (std::size_t i = 0; i < report.cells.size(); ++i) {
            const auto& c = report.cells[i];
            os << c.encoder << ',' << c.pca_dim << ',' << c.k << ','
               << fmt(c.train_accuracy) << ',' << fmt(c.test_accuracy) << ',';
            if (c.encoder == "cfv" && i > 0)
                os << fmt(c.test_accuracy - report.cells[i - 1].test_accuracy);
            os << '\n';
        }
    }

    // Figure-1 style diagnostics on the synthetic 4-component dataset.
    report.figure1_path = (root / "figure1.txt").string();
    {
        synth::Figure1Data fig = synth::figure1_dataset(opt.seed);
        const linalg::PcaModel pca = linalg::pca_fit(fig.points, 2);
        const Matrix proj = linalg::pca_apply(pca, fig.points);
        Vector uniform(proj.rows(), 1.0 / static_cast<double>(proj.rows()));
        const analysis::ComponentCorrelation universal =
            analysis::correlations_under_weights(proj, uniform);

        std::ofstream os(report.figure1_path);
        require(os.good(), ErrorCode::data,
                "cannot open for writing: " + report.figure1_path);
        os << "# four-component synthetic dataset after universal PCA to 2D\n";
        os << "universal_abs_offdiag_corr: " << fmt(std::abs(universal.rho.at(0, 1)), "%.9f")
           << '\n';
        for (int comp = 0; comp < 4; ++comp) {
            Vector w(proj.rows(), 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < fig.labels.size(); ++i)
                if (fig.labels[i] == comp) ++count;
            for (std::size_t i = 0; i < fig.labels.size(); ++i)
                if (fig.labels[i] == comp) w[i] = 1.0 / static_cast<double>(count);
            const analysis::ComponentCorrelation cc =
                analysis::correlations_under_weights(proj, w);
            os << "component_" << comp
               << "_abs_offdiag_corr: " << fmt(std::abs(cc.rho.at(0, 1)), "%.9f") << '\n';
        }
        gmm::EmConfig em;
        em.seed = Rng::stream(opt.seed, "fig1-gmm").next_u64();
        em.restarts = 3;
        em.workers = opt.workers;
        const gmm::FitResult fit = gmm::fit_em(proj, 4, gmm::CovarianceKind::full, em);
        const analysis::CorrelationHistogram h =
            analysis::correlation_histogram(fit.model, {proj});
        os << "gmm_mass_below_0.05: " << fmt(h.mass_below_005, "%.9f") << '\n';
        os << "gmm_mass_0.05_to_0.5: " << fmt(h.mass_005_to_05, "%.9f") << '\n';
        os << "gmm_mass_at_or_above_0.05: " << fmt(1.0 - h.mass_below_005, "%.9f") << '\n';
    }
    return report;
}

}  // namespace cfv::pipeline
