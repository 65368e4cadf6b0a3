#include "image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace cfv::img {

void Image::validate() const {
    require(width > 0 && height > 0, ErrorCode::validation, "Image: empty dimensions");
    require(channels == 1 || channels == 3, ErrorCode::validation,
            "Image: channels must be 1 or 3");
    require(pixels.size() ==
                static_cast<std::size_t>(width) * height * channels,
            ErrorCode::validation, "Image: pixel count does not match dimensions");
    for (double v : pixels)
        require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorCode::validation,
                "Image: pixel values must lie in [0, 1]");
}

Image make_image(int width, int height, int channels, std::vector<double> pixels) {
    Image im;
    im.width = width;
    im.height = height;
    im.channels = channels;
    im.pixels = std::move(pixels);
    im.validate();
    return im;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image load_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    require(f != nullptr, ErrorCode::data, "cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, ErrorCode::data, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail_data("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail_data("not a valid PNG file: " + path);
    }
    png_init_io(png, f.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit gray or RGB.
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_GRAY_ALPHA ||
        png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    require(channels == 1 || channels == 3, ErrorCode::data,
            "unsupported PNG channel count after normalization");
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * h);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = buffer.data() + y * stride;
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    Image im;
    im.width = static_cast<int>(w);
    im.height = static_cast<int>(h);
    im.channels = channels;
    im.pixels.resize(static_cast<std::size_t>(w) * h * channels);
    const std::size_t row_values = static_cast<std::size_t>(w) * channels;
    for (png_uint_32 y = 0; y < h; ++y) {
        const png_byte* src = buffer.data() + y * stride;
        for (std::size_t i = 0; i < row_values; ++i)
            im.pixels[y * row_values + i] = src[i] / 255.0;
    }
    return im;
}

void save_png(const Image& image, const std::string& path) {
    image.validate();
    FilePtr f(std::fopen(path.c_str(), "wb"));
    require(f != nullptr, ErrorCode::data, "cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, ErrorCode::data, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail_data("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail_data("PNG write failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(image.width) * image.channels);
    for (int y = 0; y < image.height; ++y) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double v = image.pixels[static_cast<std::size_t>(y) * row.size() + i];
            row[i] = static_cast<png_byte>(std::lround(v * 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace {

int ppm_next_token(std::istream& is) {
    // Skips whitespace and '#' comments, then parses a non-negative integer.
    while (true) {
        int c = is.peek();
        if (c == '#') {
            std::string line;
            std::getline(is, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            is.get();
        } else {
            break;
        }
    }
    int value = 0;
    require(static_cast<bool>(is >> value) && value >= 0, ErrorCode::data,
            "malformed PPM header");
    return value;
}

}  // namespace

Image load_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), ErrorCode::data, "cannot open: " + path);
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    require(m0 == 'P' && (m1 == '5' || m1 == '6'), ErrorCode::data,
            "not a binary PGM/PPM file: " + path);
    const int channels = (m1 == '6') ? 3 : 1;
    const int w = ppm_next_token(is);
    const int h = ppm_next_token(is);
    const int maxval = ppm_next_token(is);
    require(w > 0 && h > 0, ErrorCode::data, "PPM: empty dimensions");
    require(maxval == 255, ErrorCode::data, "PPM: only 8-bit (maxval 255) supported");
    is.get();  // single whitespace after maxval

    const std::size_t count = static_cast<std::size_t>(w) * h * channels;
    std::vector<unsigned char> raw(count);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    require(static_cast<std::size_t>(is.gcount()) == count, ErrorCode::data,
            "PPM: truncated pixel data");

    Image im;
    im.width = w;
    im.height = h;
    im.channels = channels;
    im.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) im.pixels[i] = raw[i] / 255.0;
    return im;
}

void save_ppm(const Image& image, const std::string& path) {
    image.validate();
    std::ofstream os(path, std::ios::binary);
    require(os.good(), ErrorCode::data, "cannot open for writing: " + path);
    os << (image.channels == 3 ? "P6" : "P5") << "\n"
       << image.width << " " << image.height << "\n255\n";
    for (double v : image.pixels)
        os.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    require(os.good(), ErrorCode::data, "write failed: " + path);
}

Image load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    require(probe.good(), ErrorCode::data, "cannot open: " + path);
    unsigned char sig[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(sig), 2);
    probe.close();
    if (sig[0] == 0x89 && sig[1] == 'P') return load_png(path);
    if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) return load_ppm(path);
    fail_data("unrecognized image format (expected PNG or binary PGM/PPM): " + path);
}

Image to_gray(const Image& image) {
    if (image.channels == 1) return image;
    Image out;
    out.width = image.width;
    out.height = image.height;
    out.channels = 1;
    out.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            out.at(x, y, 0) = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                              0.114 * image.at(x, y, 2);
    return out;
}

Image resize_bilinear(const Image& image, int new_width, int new_height) {
    require(new_width > 0 && new_height > 0, ErrorCode::validation,
            "resize_bilinear: target dimensions must be positive");
    Image out;
    out.width = new_width;
    out.height = new_height;
    out.channels = image.channels;
    out.pixels.resize(static_cast<std::size_t>(new_width) * new_height * image.channels);
    const double sx = static_cast<double>(image.width) / new_width;
    const double sy = static_cast<double>(image.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        for (int x = 0; x < new_width; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            for (int c = 0; c < image.channels; ++c) {
                const double v00 = image.at_clamped(x0, y0, c);
                const double v10 = image.at_clamped(x0 + 1, y0, c);
                const double v01 = image.at_clamped(x0, y0 + 1, c);
                const double v11 = image.at_clamped(x0 + 1, y0 + 1, c);
                out.at(x, y, c) = (1 - wy) * ((1 - wx) * v00 + wx * v10) +
                                  wy * ((1 - wx) * v01 + wx * v11);
            }
        }
    }
    return out;
}

}  // namespace cfv::img
