#include "descriptors.hpp"

#include <cmath>
#include <exception>
#include <fstream>

#include "io_util.hpp"

namespace cfv::desc {

const std::array<int, 256>& uniform_lbp_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        int next_bin = 0;
        for (int code = 0; code < 256; ++code) {
            int transitions = 0;
            for (int b = 0; b < 8; ++b) {
                const int cur = (code >> b) & 1;
                const int nxt = (code >> ((b + 1) % 8)) & 1;
                if (cur != nxt) ++transitions;
            }
            t[code] = (transitions <= 2) ? next_bin++ : kUniformPatternCount;
        }
        return t;
    }();
    return table;
}

namespace {

// Clockwise 8-neighborhood starting at the east neighbor (y grows downward).
constexpr int kNbrX[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNbrY[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int grid_count(int extent, int patch, int step) {
    return (extent - patch) / step + 1;
}

}  // namespace

DescriptorSet dense_lbp(const img::Image& image, int patch, int step) {
    image.validate();
    require(image.channels == 3, ErrorCode::validation, "dense_lbp: image must have 3 channels");
    require(patch >= 2 && step >= 1, ErrorCode::validation, "dense_lbp: bad patch/step");
    require(patch <= image.width && patch <= image.height, ErrorCode::validation,
            "dense_lbp: patch larger than image");

    // Per-pixel uniform-LBP bin, precomputed once per channel.
    const std::size_t npix = static_cast<std::size_t>(image.width) * image.height;
    std::vector<std::array<std::uint8_t, 3>> bins(npix);
    const auto& table = uniform_lbp_table();
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double center = image.at(x, y, c);
                int code = 0;
                for (int b = 0; b < 8; ++b)
                    if (image.at_clamped(x + kNbrX[b], y + kNbrY[b], c) >= center)
                        code |= 1 << b;
                bins[static_cast<std::size_t>(y) * image.width + x][c] =
                    static_cast<std::uint8_t>(table[code]);
            }

    const int gx = grid_count(image.width, patch, step);
    const int gy = grid_count(image.height, patch, step);
    DescriptorSet set;
    set.count = static_cast<std::size_t>(gx) * gy;
    set.dim = 3 * kLbpBins;
    set.data = Matrix(set.count, set.dim);
    set.positions = Matrix(set.count, 3);

    std::size_t row = 0;
    const double inv_patch = 1.0 / (static_cast<double>(patch) * patch);
    for (int py = 0; py < gy; ++py)
        for (int px = 0; px < gx; ++px, ++row) {
            const int x0 = px * step, y0 = py * step;
            double* d = set.data.row(row);
            for (int y = y0; y < y0 + patch; ++y)
                for (int x = x0; x < x0 + patch; ++x) {
                    const auto& b = bins[static_cast<std::size_t>(y) * image.width + x];
                    d[b[0]] += 1.0;
                    d[kLbpBins + b[1]] += 1.0;
                    d[2 * kLbpBins + b[2]] += 1.0;
                }
            for (std::size_t i = 0; i < set.dim; ++i) d[i] *= inv_patch;  // L1 per channel
            set.positions(row, 0) = x0 + patch / 2.0;
            set.positions(row, 1) = y0 + patch / 2.0;
            set.positions(row, 2) = 1.0;
        }
    return set;
}

DescriptorSet dense_gradhist(const img::Image& image, int bins, int cells, int cell_px,
                             int step) {
    image.validate();
    require(bins >= 2 && cells >= 1 && cell_px >= 1 && step >= 1, ErrorCode::validation,
            "dense_gradhist: bad parameters");
    const int patch = cells * cell_px;
    require(patch <= image.width && patch <= image.height, ErrorCode::validation,
            "dense_gradhist: patch exceeds image");
    const img::Image gray = to_gray(image);

    // Central-difference gradients with replicated borders, orientation over
    // [0, pi). Votes split between bin floor(theta/width) and the next bin by
    // the fractional offset, so an orientation on a bin edge lands in one bin.
    const std::size_t npix = static_cast<std::size_t>(gray.width) * gray.height;
    std::vector<float> mag(npix), b0w(npix);
    std::vector<std::uint16_t> b0(npix);
    const double bin_width = M_PI / bins;
    for (int y = 0; y < gray.height; ++y)
        for (int x = 0; x < gray.width; ++x) {
            const double gx = 0.5 * (gray.at_clamped(x + 1, y, 0) - gray.at_clamped(x - 1, y, 0));
            const double gy = 0.5 * (gray.at_clamped(x, y + 1, 0) - gray.at_clamped(x, y - 1, 0));
            const double m = std::sqrt(gx * gx + gy * gy);
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += M_PI;
            if (theta >= M_PI) theta -= M_PI;
            double f = theta / bin_width;
            int i0 = static_cast<int>(f);
            if (i0 >= bins) i0 = bins - 1;
            const std::size_t idx = static_cast<std::size_t>(y) * gray.width + x;
            mag[idx] = static_cast<float>(m);
            b0[idx] = static_cast<std::uint16_t>(i0);
            b0w[idx] = static_cast<float>(1.0 - (f - i0));
        }

    const int gxc = grid_count(gray.width, patch, step);
    const int gyc = grid_count(gray.height, patch, step);
    DescriptorSet set;
    set.count = static_cast<std::size_t>(gxc) * gyc;
    set.dim = static_cast<std::size_t>(cells) * cells * bins;
    set.data = Matrix(set.count, set.dim);
    set.positions = Matrix(set.count, 3);

    std::size_t row = 0;
    for (int py = 0; py < gyc; ++py)
        for (int px = 0; px < gxc; ++px, ++row) {
            const int x0 = px * step, y0 = py * step;
            double* d = set.data.row(row);
            for (int cy = 0; cy < cells; ++cy)
                for (int cx = 0; cx < cells; ++cx) {
                    double* cell = d + (static_cast<std::size_t>(cy) * cells + cx) * bins;
                    for (int y = y0 + cy * cell_px; y < y0 + (cy + 1) * cell_px; ++y)
                        for (int x = x0 + cx * cell_px; x < x0 + (cx + 1) * cell_px; ++x) {
                            const std::size_t idx =
                                static_cast<std::size_t>(y) * gray.width + x;
                            const double m = mag[idx];
                            const double w0 = b0w[idx];
                            cell[b0[idx]] += m * w0;
                            cell[(b0[idx] + 1) % bins] += m * (1.0 - w0);
                        }
                }
            // SIFT-style normalization: L2, clip at 0.2, renormalize.
            double sq = 0.0;
            for (std::size_t i = 0; i < set.dim; ++i) sq += d[i] * d[i];
            if (sq > 1e-24) {
                double inv = 1.0 / std::sqrt(sq);
                sq = 0.0;
                for (std::size_t i = 0; i < set.dim; ++i) {
                    d[i] = std::min(d[i] * inv, 0.2);
                    sq += d[i] * d[i];
                }
                inv = 1.0 / std::sqrt(sq);
                for (std::size_t i = 0; i < set.dim; ++i) d[i] *= inv;
            }
            set.positions(row, 0) = x0 + patch / 2.0;
            set.positions(row, 1) = y0 + patch / 2.0;
            set.positions(row, 2) = 1.0;
        }
    return set;
}

DescriptorSet multiscale(const img::Image& image, const Extractor& extractor, int num_scales,
                         double ratio_max, double factor,
                         std::vector<std::string>* warnings) {
    image.validate();
    require(num_scales >= 1, ErrorCode::validation, "multiscale: num_scales must be >= 1");
    require(ratio_max > 0.0 && factor > 1.0, ErrorCode::validation,
            "multiscale: ratio_max must be positive and factor > 1");

    std::vector<DescriptorSet> parts;
    std::exception_ptr first_error;
    double ratio = ratio_max;
    for (int s = 0; s < num_scales; ++s, ratio /= factor) {
        const int w = std::max(1, static_cast<int>(std::lround(image.width * ratio)));
        const int h = std::max(1, static_cast<int>(std::lround(image.height * ratio)));
        img::Image level =
            (w == image.width && h == image.height) ? image : img::resize_bilinear(image, w, h);
        DescriptorSet part;
        try {
            part = extractor(level);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::validation) {
                if (!first_error) first_error = std::current_exception();
                if (warnings)
                    warnings->push_back("multiscale: scale ratio " + std::to_string(ratio) +
                                        " skipped (" + e.what() + ")");
                continue;
            }
            throw;
        }
        for (std::size_t i = 0; i < part.count; ++i) part.positions(i, 2) = ratio;
        parts.push_back(std::move(part));
    }
    if (parts.empty() && first_error) std::rethrow_exception(first_error);
    require(!parts.empty(), ErrorCode::validation, "multiscale: no usable scales");

    DescriptorSet out;
    out.dim = parts.front().dim;
    for (const auto& p : parts) {
        require(p.dim == out.dim, ErrorCode::validation, "multiscale: extractor dim varies");
        out.count += p.count;
    }
    out.data = Matrix(out.count, out.dim);
    out.positions = Matrix(out.count, 3);
    std::size_t row = 0;
    for (const auto& p : parts)
        for (std::size_t i = 0; i < p.count; ++i, ++row) {
            for (std::size_t j = 0; j < out.dim; ++j) out.data(row, j) = p.data(i, j);
            for (std::size_t j = 0; j < 3; ++j) out.positions(row, j) = p.positions(i, j);
        }
    return out;
}

namespace {
constexpr char kDescMagic[4] = {'C', 'F', 'V', 'D'};
constexpr std::uint16_t kDescVersion = 1;
constexpr std::uint16_t kFlagPositions = 1;
}  // namespace

void save_descriptors(const DescriptorSet& set, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::data, "cannot open for writing: " + path);
    io::write_magic(os, kDescMagic);
    io::write_le<std::uint16_t>(os, kDescVersion);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(set.count));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(set.dim));
    io::write_le<std::uint16_t>(os, set.has_positions() ? kFlagPositions : 0);
    for (std::size_t i = 0; i < set.count * set.dim; ++i)
        io::write_f32(os, static_cast<float>(set.data.data()[i]));
    if (set.has_positions())
        for (std::size_t i = 0; i < set.count * 3; ++i)
            io::write_f32(os, static_cast<float>(set.positions.data()[i]));
    require(os.good(), ErrorCode::data, "write failed: " + path);
}

DescriptorSet load_descriptors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    io::expect_magic(is, kDescMagic, "CFVD descriptor");
    const auto version = io::read_le<std::uint16_t>(is, "version");
    require(version == kDescVersion, ErrorCode::data,
            "unsupported CFVD version " + std::to_string(version));
    DescriptorSet set;
    set.count = io::read_le<std::uint32_t>(is, "descriptor count");
    set.dim = io::read_le<std::uint32_t>(is, "descriptor dim");
    const auto flags = io::read_le<std::uint16_t>(is, "flags");
    require(set.count == 0 || set.dim >= 1, ErrorCode::data,
            "CFVD: dimension header inconsistent with count");
    set.data = Matrix(set.count, set.dim);
    for (std::size_t i = 0; i < set.count * set.dim; ++i)
        set.data.data()[i] = io::read_f32(is, "descriptor payload");
    if (flags & kFlagPositions) {
        set.positions = Matrix(set.count, 3);
        for (std::size_t i = 0; i < set.count * 3; ++i)
            set.positions.data()[i] = io::read_f32(is, "positions payload");
    }
    // Anything left over means the header undercounts the payload.
    is.peek();
    require(is.eof(), ErrorCode::data, "CFVD: trailing bytes after payload");
    set.source_id = path;
    return set;
}

}  // namespace cfv::desc
