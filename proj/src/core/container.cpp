#include "container.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "io_util.hpp"

namespace cfv::io {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'V', 'M'};
constexpr std::uint16_t kVersion = 1;

std::uint32_t crc_of(const std::string& payload) {
    return static_cast<std::uint32_t>(
        ::crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size())));
}

void write_section(std::ostream& os, const std::string& name, const std::string& payload) {
    write_le<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<std::uint64_t>(os, payload.size());
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    write_le<std::uint32_t>(os, crc_of(payload));
}

std::string encode_pca(const linalg::PcaModel& m) {
    std::ostringstream os(std::ios::binary);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.input_dim));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.output_dim));
    write_le<std::uint8_t>(os, m.whiten ? 1 : 0);
    for (double v : m.mean) write_f64(os, v);
    for (std::size_t i = 0; i < m.input_dim; ++i)
        for (std::size_t j = 0; j < m.output_dim; ++j) write_f64(os, m.basis(i, j));
    for (double v : m.eigenvalues) write_f64(os, v);
    return os.str();
}

linalg::PcaModel decode_pca(std::istream& is) {
    linalg::PcaModel m;
    m.input_dim = read_le<std::uint32_t>(is, "pca input_dim");
    m.output_dim = read_le<std::uint32_t>(is, "pca output_dim");
    require(m.output_dim >= 1 && m.output_dim <= m.input_dim, ErrorCode::data,
            "pca section: invalid dimensions");
    m.whiten = read_le<std::uint8_t>(is, "pca whiten") != 0;
    m.mean.resize(m.input_dim);
    for (double& v : m.mean) v = read_f64(is, "pca mean");
    m.basis = Matrix(m.input_dim, m.output_dim);
    for (std::size_t i = 0; i < m.input_dim; ++i)
        for (std::size_t j = 0; j < m.output_dim; ++j) m.basis(i, j) = read_f64(is, "pca basis");
    m.eigenvalues.resize(m.output_dim);
    for (double& v : m.eigenvalues) v = read_f64(is, "pca eigenvalues");
    return m;
}

std::string encode_gmm(const gmm::GmmModel& m) {
    std::ostringstream os(std::ios::binary);
    write_le<std::uint8_t>(os, m.kind == gmm::CovarianceKind::full ? 1 : 0);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.K));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.D));
    write_f64(os, m.floor_used);
    for (double v : m.priors) write_f64(os, v);
    for (std::size_t k = 0; k < m.K; ++k)
        for (std::size_t d = 0; d < m.D; ++d) write_f64(os, m.means(k, d));
    for (std::size_t k = 0; k < m.K; ++k)
        for (double v : m.covariances[k].packed()) write_f64(os, v);
    return os.str();
}

gmm::GmmModel decode_gmm(std::istream& is) {
    gmm::GmmModel m;
    m.kind = read_le<std::uint8_t>(is, "gmm kind") == 1 ? gmm::CovarianceKind::full
                                                        : gmm::CovarianceKind::diagonal;
    m.K = read_le<std::uint32_t>(is, "gmm K");
    m.D = read_le<std::uint32_t>(is, "gmm D");
    require(m.K >= 1 && m.D >= 1, ErrorCode::data, "gmm section: invalid shape");
    m.floor_used = read_f64(is, "gmm floor");
    require(m.floor_used > 0.0, ErrorCode::data, "gmm section: invalid floor");
    m.priors.resize(m.K);
    for (double& v : m.priors) v = read_f64(is, "gmm priors");
    m.means = Matrix(m.K, m.D);
    for (std::size_t k = 0; k < m.K; ++k)
        for (std::size_t d = 0; d < m.D; ++d) m.means(k, d) = read_f64(is, "gmm means");
    m.covariances.assign(m.K, SymMatrix(m.D));
    for (std::size_t k = 0; k < m.K; ++k)
        for (double& v : m.covariances[k].packed()) v = read_f64(is, "gmm covariances");
    // Stored parameters are taken verbatim; only the cache is rebuilt, then
    // checked against its invariant.
    m.rebuild_cache();
    m.verify_cache(1e-6);
    return m;
}

std::string encode_svm(const SvmSection& s) {
    std::ostringstream os(std::ios::binary);
    const auto& m = s.model;
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(m.num_classes));
    write_le<std::uint64_t>(os, m.feature_dim);
    for (int id : m.class_ids) write_le<std::int32_t>(os, id);
    for (std::size_t c = 0; c < m.num_classes; ++c) {
        const std::string name = c < s.class_names.size() ? s.class_names[c] : "";
        write_le<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (std::size_t c = 0; c < m.num_classes; ++c)
        for (std::size_t j = 0; j < m.feature_dim; ++j) write_f64(os, m.weights(c, j));
    for (double b : m.biases) write_f64(os, b);
    return os.str();
}

SvmSection decode_svm(std::istream& is) {
    SvmSection s;
    auto& m = s.model;
    m.num_classes = read_le<std::uint32_t>(is, "svm num_classes");
    m.feature_dim = read_le<std::uint64_t>(is, "svm feature_dim");
    require(m.num_classes >= 1, ErrorCode::data, "svm section: invalid class count");
    m.class_ids.resize(m.num_classes);
    for (int& id : m.class_ids) id = read_le<std::int32_t>(is, "svm class ids");
    s.class_names.resize(m.num_classes);
    for (auto& name : s.class_names) {
        const auto len = read_le<std::uint16_t>(is, "svm class name length");
        name.resize(len);
        is.read(name.data(), len);
        require(is.gcount() == len, ErrorCode::data, "svm section: truncated class name");
    }
    m.weights = Matrix(m.num_classes, m.feature_dim);
    for (std::size_t c = 0; c < m.num_classes; ++c)
        for (std::size_t j = 0; j < m.feature_dim; ++j)
            m.weights(c, j) = read_f64(is, "svm weights");
    m.biases.resize(m.num_classes);
    for (double& b : m.biases) b = read_f64(is, "svm biases");
    return s;
}

std::string encode_encoding(const enc::EncodingConfig& c) {
    std::ostringstream os(std::ios::binary);
    write_f64(os, c.alpha);
    write_f64(os, c.gamma);
    write_f64(os, c.posterior_threshold);
    std::uint8_t flags = 0;
    if (c.apply_power_norm) flags |= 1;
    if (c.apply_l2_norm) flags |= 2;
    if (c.include_first_order) flags |= 4;
    if (c.include_second_order) flags |= 8;
    if (c.fv_compat_scale) flags |= 16;
    write_le<std::uint8_t>(os, flags);
    return os.str();
}

enc::EncodingConfig decode_encoding(std::istream& is) {
    enc::EncodingConfig c;
    c.alpha = read_f64(is, "encoding alpha");
    c.gamma = read_f64(is, "encoding gamma");
    c.posterior_threshold = read_f64(is, "encoding threshold");
    const auto flags = read_le<std::uint8_t>(is, "encoding flags");
    c.apply_power_norm = flags & 1;
    c.apply_l2_norm = flags & 2;
    c.include_first_order = flags & 4;
    c.include_second_order = flags & 8;
    c.fv_compat_scale = flags & 16;
    c.validate();
    return c;
}

}  // namespace

void save_container(const ModelContainer& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::data, "cannot open for writing: " + path);
    write_magic(os, kMagic);
    write_le<std::uint16_t>(os, kVersion);
    std::uint16_t count = 0;
    count += c.pca.has_value();
    count += c.gmm.has_value();
    count += c.svm.has_value();
    count += c.encoding.has_value();
    write_le<std::uint16_t>(os, count);
    if (c.pca) write_section(os, "pca", encode_pca(*c.pca));
    if (c.gmm) write_section(os, "gmm", encode_gmm(*c.gmm));
    if (c.svm) write_section(os, "svm", encode_svm(*c.svm));
    if (c.encoding) write_section(os, "encoding", encode_encoding(*c.encoding));
    require(os.good(), ErrorCode::data, "write failed: " + path);
}

ModelContainer load_container(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    expect_magic(is, kMagic, "CFVM model-container");
    const auto version = read_le<std::uint16_t>(is, "container version");
    require(version == kVersion, ErrorCode::data,
            "unsupported container version " + std::to_string(version));
    const auto count = read_le<std::uint16_t>(is, "section count");

    ModelContainer c;
    for (std::uint16_t s = 0; s < count; ++s) {
        const auto name_len = read_le<std::uint16_t>(is, "section name length");
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        require(is.gcount() == name_len, ErrorCode::data, "truncated section name");
        const auto payload_len = read_le<std::uint64_t>(is, "section payload length");
        std::string payload(payload_len, '\0');
        is.read(payload.data(), static_cast<std::streamsize>(payload_len));
        require(static_cast<std::uint64_t>(is.gcount()) == payload_len, ErrorCode::data,
                "truncated section payload");
        const auto crc = read_le<std::uint32_t>(is, "section checksum");
        require(crc == crc_of(payload), ErrorCode::data,
                "checksum mismatch in section '" + name + "'");

        std::istringstream ps(payload, std::ios::binary);
        if (name == "pca")
            c.pca = decode_pca(ps);
        else if (name == "gmm")
            c.gmm = decode_gmm(ps);
        else if (name == "svm")
            c.svm = decode_svm(ps);
        else if (name == "encoding")
            c.encoding = decode_encoding(ps);
        else
            fail_data("unknown container section '" + name + "'");
    }
    return c;
}

}  // namespace cfv::io
