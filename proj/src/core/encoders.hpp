#pragma once

#include <iosfwd>
#include <string>

#include "gmm.hpp"
#include "types.hpp"

namespace cfv::enc {

enum class EncoderKind : std::uint8_t { bow = 0, fv = 1, cfv = 2 };

const char* encoder_kind_name(EncoderKind k);
EncoderKind encoder_kind_from_name(const std::string& name);

struct EncodingConfig {
    double alpha = 0.25;   // balance of off-diagonal vs diagonal second-order entries
    double gamma = 0.5;    // power-normalization exponent
    bool apply_power_norm = true;
    bool apply_l2_norm = true;
    bool include_first_order = true;
    bool include_second_order = true;
    // Soft assignments below this are skipped when aggregating; 0 disables.
    double posterior_threshold = 1e-8;
    // Divide second-order diagonals by sqrt(2) so they match the classic FV
    // convention exactly.
    bool fv_compat_scale = false;

    void validate() const;
};

struct EncodedVector {
    Vector values;
    EncoderKind kind = EncoderKind::fv;
    std::size_t K = 0, D = 0;
    EncodingConfig config;
};

// Expected raw lengths under the configured blocks.
std::size_t fv_length(std::size_t K, std::size_t D, const EncodingConfig& config);
std::size_t cfv_length(std::size_t K, std::size_t D, const EncodingConfig& config);

// Classic Fisher vector under diagonal component covariances. Layout: all
// first-order blocks by ascending component, then all second-order blocks.
EncodedVector encode_fv(const gmm::GmmModel& model, const Matrix& descriptors,
                        const EncodingConfig& config);

// Completed Fisher vector: per-component whitened deviations, second order as
// a symmetric scatter matrix packed via pack_symmetric. Accepts diagonal or
// full covariances.
EncodedVector encode_cfv(const gmm::GmmModel& model, const Matrix& descriptors,
                         const EncodingConfig& config);

// Soft-assignment histogram; sums to 1. L2 normalization applied only when
// config.apply_l2_norm is set. Power normalization never applies here.
EncodedVector encode_bow(const gmm::GmmModel& model, const Matrix& descriptors,
                         const EncodingConfig& config);

// [diagonal ascending; alpha * strict upper triangle in row-major order].
Vector pack_symmetric(const SymMatrix& v, double alpha);

// z -> |z|^gamma * sign(z), with 0 -> 0 for every gamma.
void power_normalize(Vector& v, double gamma);

// v / ||v||_2 when the norm exceeds 1e-12; unchanged otherwise.
void l2_normalize(Vector& v);

// Binary format: magic "CFVE", version, kind, flags, K, D, alpha, gamma,
// threshold, then the payload as little-endian float32.
void save_encoded(const EncodedVector& v, const std::string& path);
EncodedVector load_encoded(const std::string& path);

// Plain-text interop: the vector as one space-separated line.
void write_encoded_text(const EncodedVector& v, std::ostream& os);

}  // namespace cfv::enc
