#include "encoders.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "io_util.hpp"
#include "reduce.hpp"

namespace cfv::enc {

const char* encoder_kind_name(EncoderKind k) {
    switch (k) {
        case EncoderKind::bow: return "bow";
        case EncoderKind::fv: return "fv";
        case EncoderKind::cfv: return "cfv";
    }
    return "?";
}

EncoderKind encoder_kind_from_name(const std::string& name) {
    if (name == "bow") return EncoderKind::bow;
    if (name == "fv") return EncoderKind::fv;
    if (name == "cfv") return EncoderKind::cfv;
    fail_validation("unknown encoder kind: " + name);
}

void EncodingConfig::validate() const {
    require(alpha > 0.0, ErrorCode::validation, "EncodingConfig: alpha must be positive");
    require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::validation,
            "EncodingConfig: gamma must lie in [0, 1]");
    require(posterior_threshold >= 0.0, ErrorCode::validation,
            "EncodingConfig: posterior_threshold must be non-negative");
    require(include_first_order || include_second_order, ErrorCode::validation,
            "EncodingConfig: at least one statistics order must be enabled");
}

std::size_t fv_length(std::size_t K, std::size_t D, const EncodingConfig& config) {
    std::size_t len = 0;
    if (config.include_first_order) len += K * D;
    if (config.include_second_order) len += K * D;
    return len;
}

std::size_t cfv_length(std::size_t K, std::size_t D, const EncodingConfig& config) {
    std::size_t len = 0;
    if (config.include_first_order) len += K * D;
    if (config.include_second_order) len += K * D * (D + 1) / 2;
    return len;
}

Vector pack_symmetric(const SymMatrix& v, double alpha) {
    const std::size_t d = v.dim();
    Vector out;
    out.reserve(d * (d + 1) / 2);
    for (std::size_t i = 0; i < d; ++i) out.push_back(v.at(i, i));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) out.push_back(alpha * v.at(i, j));
    return out;
}

void power_normalize(Vector& v, double gamma) {
    require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::validation,
            "power_normalize: gamma must lie in [0, 1]");
    if (gamma == 1.0) return;
    for (double& z : v) {
        if (z == 0.0) continue;  // 0 -> 0 even for gamma = 0
        z = std::copysign(std::pow(std::abs(z), gamma), z);
    }
}

void l2_normalize(Vector& v) {
    double sq = 0.0;
    for (double z : v) sq += z * z;
    const double norm = std::sqrt(sq);
    if (norm <= 1e-12) return;
    for (double& z : v) z /= norm;
}

namespace {

void apply_normalizations(Vector& v, const EncodingConfig& config) {
    if (config.apply_power_norm) power_normalize(v, config.gamma);
    if (config.apply_l2_norm) l2_normalize(v);
}

void check_inputs(const gmm::GmmModel& model, const Matrix& descriptors) {
    require(descriptors.rows() >= 1, ErrorCode::validation, "encode: empty descriptor set");
    require(descriptors.cols() == model.D, ErrorCode::validation,
            "encode: descriptor dimension does not match the model");
    require(descriptors.all_finite(), ErrorCode::numeric, "encode: non-finite descriptors");
}

}  // namespace

EncodedVector encode_fv(const gmm::GmmModel& model, const Matrix& descriptors,
                        const EncodingConfig& config) {
    config.validate();
    check_inputs(model, descriptors);
    require(model.kind == gmm::CovarianceKind::diagonal, ErrorCode::validation,
            "encode_fv requires a diagonal-covariance model; use encode_cfv for full "
            "covariances");
    const std::size_t n = descriptors.rows(), K = model.K, D = model.D;
    const Matrix post = model.posteriors(descriptors);
    const double thr = config.posterior_threshold;

    // Raw sums: [u-part (K*D), v-part (K*D)].
    Vector acc(2 * K * D, 0.0);
    pairwise_accumulate(n, acc.size(), acc.data(),
                        [&](std::size_t i0, std::size_t i1, double* a) {
                            for (std::size_t i = i0; i < i1; ++i) {
                                const double* x = descriptors.row(i);
                                const double* p = post.row(i);
                                for (std::size_t k = 0; k < K; ++k) {
                                    const double w = p[k];
                                    if (w < thr) continue;
                                    const double* mu = model.means.row(k);
                                    const Vector& isig = model.inv_sigma[k];
                                    double* u = a + k * D;
                                    double* v = a + K * D + k * D;
                                    for (std::size_t d = 0; d < D; ++d) {
                                        const double t = (x[d] - mu[d]) * isig[d];
                                        u[d] += w * t;
                                        v[d] += w * (t * t - 1.0);
                                    }
                                }
                            }
                        });

    EncodedVector out;
    out.kind = EncoderKind::fv;
    out.K = K;
    out.D = D;
    out.config = config;
    out.values.reserve(fv_length(K, D, config));
    const double inv_n = 1.0 / static_cast<double>(n);
    if (config.include_first_order)
        for (std::size_t k = 0; k < K; ++k) {
            const double s = model.priors[k] > 0.0 ? inv_n / std::sqrt(model.priors[k]) : 0.0;
            for (std::size_t d = 0; d < D; ++d) out.values.push_back(s * acc[k * D + d]);
        }
    if (config.include_second_order)
        for (std::size_t k = 0; k < K; ++k) {
            const double s =
                model.priors[k] > 0.0 ? inv_n / std::sqrt(2.0 * model.priors[k]) : 0.0;
            for (std::size_t d = 0; d < D; ++d) out.values.push_back(s * acc[K * D + k * D + d]);
        }
    apply_normalizations(out.values, config);
    return out;
}

EncodedVector encode_cfv(const gmm::GmmModel& model, const Matrix& descriptors,
                         const EncodingConfig& config) {
    config.validate();
    check_inputs(model, descriptors);
    const std::size_t n = descriptors.rows(), K = model.K, D = model.D;
    const std::size_t packed = D * (D + 1) / 2;
    const Matrix post = model.posteriors(descriptors);
    const double thr = config.posterior_threshold;
    const bool diagonal = model.kind == gmm::CovarianceKind::diagonal;

    // Raw sums: [u-part (K*D), scatter-part (K * packed upper triangle)].
    Vector acc(K * D + K * packed, 0.0);
    pairwise_accumulate(
        n, acc.size(), acc.data(), [&](std::size_t i0, std::size_t i1, double* a) {
            Vector w(D), dx(D);
            for (std::size_t i = i0; i < i1; ++i) {
                const double* x = descriptors.row(i);
                const double* p = post.row(i);
                for (std::size_t k = 0; k < K; ++k) {
                    const double lam = p[k];
                    if (lam < thr) continue;
                    const double* mu = model.means.row(k);
                    if (diagonal) {
                        const Vector& isig = model.inv_sigma[k];
                        for (std::size_t d = 0; d < D; ++d) w[d] = (x[d] - mu[d]) * isig[d];
                    } else {
                        for (std::size_t d = 0; d < D; ++d) dx[d] = x[d] - mu[d];
                        model.inv_sqrt_cov[k].multiply(dx.data(), w.data());
                    }
                    double* u = a + k * D;
                    for (std::size_t d = 0; d < D; ++d) u[d] += lam * w[d];
                    double* s = a + K * D + k * packed;
                    std::size_t idx = 0;
                    for (std::size_t r = 0; r < D; ++r) {
                        const double wr = lam * w[r];
                        s[idx++] += wr * w[r] - lam;  // diagonal: w_r^2 - 1
                        for (std::size_t c = r + 1; c < D; ++c) s[idx++] += wr * w[c];
                    }
                }
            }
        });

    EncodedVector out;
    out.kind = EncoderKind::cfv;
    out.K = K;
    out.D = D;
    out.config = config;
    out.values.reserve(cfv_length(K, D, config));
    const double inv_n = 1.0 / static_cast<double>(n);
    const double diag_scale = config.fv_compat_scale ? 1.0 / std::sqrt(2.0) : 1.0;
    if (config.include_first_order)
        for (std::size_t k = 0; k < K; ++k) {
            const double s = model.priors[k] > 0.0 ? inv_n / std::sqrt(model.priors[k]) : 0.0;
            for (std::size_t d = 0; d < D; ++d) out.values.push_back(s * acc[k * D + d]);
        }
    if (config.include_second_order)
        for (std::size_t k = 0; k < K; ++k) {
            const double s = model.priors[k] > 0.0 ? inv_n / std::sqrt(model.priors[k]) : 0.0;
            const double* raw = acc.data() + K * D + k * packed;
            // vd block: diagonal entries in ascending index.
            std::size_t row_start = 0;
            for (std::size_t d = 0; d < D; ++d) {
                out.values.push_back(diag_scale * s * raw[row_start]);
                row_start += D - d;  // next diagonal entry in the packed layout
            }
            // vt block: strict upper triangle, row-major, scaled by alpha.
            std::size_t idx = 0;
            for (std::size_t r = 0; r < D; ++r) {
                ++idx;  // skip the diagonal entry
                for (std::size_t c = r + 1; c < D; ++c)
                    out.values.push_back(config.alpha * s * raw[idx++]);
            }
        }
    apply_normalizations(out.values, config);
    return out;
}

EncodedVector encode_bow(const gmm::GmmModel& model, const Matrix& descriptors,
                         const EncodingConfig& config) {
    config.validate();
    check_inputs(model, descriptors);
    const std::size_t n = descriptors.rows(), K = model.K;
    const Matrix post = model.posteriors(descriptors);
    EncodedVector out;
    out.kind = EncoderKind::bow;
    out.K = K;
    out.D = model.D;
    out.config = config;
    out.values.assign(K, 0.0);
    pairwise_accumulate(n, K, out.values.data(),
                        [&](std::size_t i0, std::size_t i1, double* a) {
                            for (std::size_t i = i0; i < i1; ++i) {
                                const double* p = post.row(i);
                                for (std::size_t k = 0; k < K; ++k) a[k] += p[k];
                            }
                        });
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : out.values) v *= inv_n;
    if (config.apply_l2_norm) l2_normalize(out.values);
    return out;
}

namespace {

std::uint8_t config_flags(const EncodingConfig& c) {
    std::uint8_t f = 0;
    if (c.apply_power_norm) f |= 1;
    if (c.apply_l2_norm) f |= 2;
    if (c.include_first_order) f |= 4;
    if (c.include_second_order) f |= 8;
    if (c.fv_compat_scale) f |= 16;
    return f;
}

constexpr char kEncodedMagic[4] = {'C', 'F', 'V', 'E'};
constexpr std::uint16_t kEncodedVersion = 1;

}  // namespace

void save_encoded(const EncodedVector& v, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::data, "cannot open for writing: " + path);
    io::write_magic(os, kEncodedMagic);
    io::write_le<std::uint16_t>(os, kEncodedVersion);
    io::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(v.kind));
    io::write_le<std::uint8_t>(os, config_flags(v.config));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(v.K));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(v.D));
    io::write_f64(os, v.config.alpha);
    io::write_f64(os, v.config.gamma);
    io::write_f64(os, v.config.posterior_threshold);
    io::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(v.values.size()));
    for (double x : v.values) io::write_f32(os, static_cast<float>(x));
    require(os.good(), ErrorCode::data, "write failed: " + path);
}

EncodedVector load_encoded(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    io::expect_magic(is, kEncodedMagic, "CFVE encoded-vector");
    const auto version = io::read_le<std::uint16_t>(is, "version");
    require(version == kEncodedVersion, ErrorCode::data,
            "unsupported CFVE version " + std::to_string(version));
    EncodedVector v;
    const auto kind = io::read_le<std::uint8_t>(is, "encoder kind");
    require(kind <= 2, ErrorCode::data, "invalid encoder kind in file");
    v.kind = static_cast<EncoderKind>(kind);
    const auto flags = io::read_le<std::uint8_t>(is, "flags");
    v.config.apply_power_norm = flags & 1;
    v.config.apply_l2_norm = flags & 2;
    v.config.include_first_order = flags & 4;
    v.config.include_second_order = flags & 8;
    v.config.fv_compat_scale = flags & 16;
    v.K = io::read_le<std::uint32_t>(is, "K");
    v.D = io::read_le<std::uint32_t>(is, "D");
    v.config.alpha = io::read_f64(is, "alpha");
    v.config.gamma = io::read_f64(is, "gamma");
    v.config.posterior_threshold = io::read_f64(is, "posterior threshold");
    const auto len = io::read_le<std::uint64_t>(is, "payload length");
    v.values.resize(len);
    for (auto& x : v.values) x = io::read_f32(is, "payload");
    return v;
}

void write_encoded_text(const EncodedVector& v, std::ostream& os) {
    char buf[32];
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(v.values[i])));
        if (i) os << ' ';
        os << buf;
    }
    os << '\n';
}

}  // namespace cfv::enc
