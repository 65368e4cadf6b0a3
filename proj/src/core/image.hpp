#pragma once

#include <string>
#include <vector>

#include "error.hpp"

namespace cfv::img {

// 8-bit images are mapped to [0, 1]; pixels are row-major, channel-interleaved.
struct Image {
    int width = 0, height = 0, channels = 1;
    std::vector<double> pixels;

    double at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    // Replicate-border lookup.
    double at_clamped(int x, int y, int c) const {
        x = x < 0 ? 0 : (x >= width ? width - 1 : x);
        y = y < 0 ? 0 : (y >= height ? height - 1 : y);
        return at(x, y, c);
    }
    void validate() const;
};

Image make_image(int width, int height, int channels, std::vector<double> pixels);

// Dispatches on the file's magic bytes (PNG signature or P5/P6).
Image load_image(const std::string& path);
Image load_png(const std::string& path);
Image load_ppm(const std::string& path);  // binary P5 (gray) / P6 (rgb), 8-bit
void save_png(const Image& image, const std::string& path);
void save_ppm(const Image& image, const std::string& path);

// Luma conversion with weights 0.299/0.587/0.114; identity for grayscale.
Image to_gray(const Image& image);

Image resize_bilinear(const Image& image, int new_width, int new_height);

}  // namespace cfv::img
