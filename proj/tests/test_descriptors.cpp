#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/descriptors.hpp"
#include "core/rng.hpp"

using namespace cfv;
using namespace cfv::desc;

namespace {

img::Image noise_image(Rng& rng, int w, int h, int channels) {
    std::vector<double> px(static_cast<std::size_t>(w) * h * channels);
    for (double& v : px) v = rng.next_double();
    return img::make_image(w, h, channels, std::move(px));
}

img::Image constant_image(int w, int h, int channels, double value) {
    return img::make_image(w, h, channels,
                           std::vector<double>(static_cast<std::size_t>(w) * h * channels, value));
}

std::string read_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("uniform LBP table has 58 uniform patterns plus a catch-all") {
    const auto& t = uniform_lbp_table();
    int uniform = 0;
    for (int code = 0; code < 256; ++code)
        if (t[code] != kUniformPatternCount) ++uniform;
    CHECK(uniform == 58);
    CHECK(t[0] == 0);           // all-zero pattern is uniform
    CHECK(t[255] == 57);        // all-ones pattern is the last uniform bin
    CHECK(t[0b01010101] == kUniformPatternCount);  // 8 transitions
}

TEST_CASE("dense_lbp: constant image concentrates on the all-ones pattern") {
    img::Image im = constant_image(24, 24, 3, 0.5);
    DescriptorSet set = dense_lbp(im, 16, 8);
    CHECK(set.dim == 177);
    REQUIRE(set.count == 4);  // 2x2 grid
    const auto& t = uniform_lbp_table();
    const int bin255 = t[255];
    for (std::size_t i = 0; i < set.count; ++i)
        for (int c = 0; c < 3; ++c)
            for (int b = 0; b < kLbpBins; ++b) {
                const double expect = (b == bin255) ? 1.0 : 0.0;
                CHECK(set.data(i, c * kLbpBins + b) == doctest::Approx(expect));
            }
}

TEST_CASE("dense_lbp: grid size and histogram normalization") {
    Rng rng(301);
    img::Image im = noise_image(rng, 64, 64, 3);
    DescriptorSet set = dense_lbp(im, 16, 8);
    CHECK(set.count == 49);  // 7x7
    CHECK(set.dim == 177);
    for (std::size_t i = 0; i < set.count; ++i)
        for (int c = 0; c < 3; ++c) {
            double sum = 0.0;
            for (int b = 0; b < kLbpBins; ++b) sum += set.data(i, c * kLbpBins + b);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    // Positions fall inside the image at scale 1.
    for (std::size_t i = 0; i < set.count; ++i) {
        CHECK(set.positions(i, 0) >= 0.0);
        CHECK(set.positions(i, 0) <= 64.0);
        CHECK(set.positions(i, 2) == 1.0);
    }
}

TEST_CASE("dense_lbp input validation") {
    Rng rng(303);
    img::Image gray = noise_image(rng, 32, 32, 1);
    CHECK_THROWS_AS(dense_lbp(gray), Error);
    img::Image small = noise_image(rng, 8, 8, 3);
    CHECK_THROWS_AS(dense_lbp(small, 16, 8), Error);
}

TEST_CASE("dense_gradhist: constant image gives all-zero descriptors") {
    img::Image im = constant_image(20, 20, 1, 0.3);
    DescriptorSet set = dense_gradhist(im);
    CHECK(set.dim == 128);
    REQUIRE(set.count == 4);  // floor((20-16)/4)+1 = 2 per axis
    for (std::size_t i = 0; i < set.count; ++i)
        for (std::size_t j = 0; j < set.dim; ++j) CHECK(set.data(i, j) == 0.0);
}

TEST_CASE("dense_gradhist: horizontal ramp puts all energy in one bin per cell") {
    const int w = 24, h = 24;
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) px[static_cast<std::size_t>(y) * w + x] = x / (w - 1.0);
    img::Image im = img::make_image(w, h, 1, std::move(px));
    DescriptorSet set = dense_gradhist(im, 8, 4, 4, 4);
    REQUIRE(set.count > 0);
    for (std::size_t i = 0; i < set.count; ++i)
        for (int cell = 0; cell < 16; ++cell) {
            CHECK(set.data(i, cell * 8) > 0.0);  // bin 0: orientation 0
            for (int b = 1; b < 8; ++b) CHECK(set.data(i, cell * 8 + b) == 0.0);
        }
}

TEST_CASE("dense_gradhist: entries are bounded and vectors unit-or-zero") {
    Rng rng(307);
    img::Image im = noise_image(rng, 40, 40, 3);
    DescriptorSet set = dense_gradhist(im);
    for (std::size_t i = 0; i < set.count; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < set.dim; ++j) {
            CHECK(set.data(i, j) >= 0.0);
            CHECK(set.data(i, j) <= 1.0 + 1e-9);
            sq += set.data(i, j) * set.data(i, j);
        }
        const double norm = std::sqrt(sq);
        CHECK((norm < 1e-12 || std::abs(norm - 1.0) < 1e-9));
    }
}

TEST_CASE("multiscale: defaults yield the documented ratio ladder") {
    Rng rng(311);
    img::Image im = noise_image(rng, 128, 128, 3);
    DescriptorSet set = multiscale(im, [](const img::Image& i) { return dense_lbp(i); });
    std::vector<double> scales;
    for (std::size_t i = 0; i < set.count; ++i)
        if (scales.empty() || std::abs(scales.back() - set.positions(i, 2)) > 1e-12)
            scales.push_back(set.positions(i, 2));
    const double expect[7] = {2.0, 1.414, 1.0, 0.707, 0.5, 0.354, 0.25};
    REQUIRE(scales.size() == 7);
    for (int s = 0; s < 7; ++s) CHECK(std::abs(scales[s] - expect[s]) < 1e-3);

    // Total count is the sum of per-scale grids.
    std::size_t expected_count = 0;
    double ratio = 2.0;
    for (int s = 0; s < 7; ++s, ratio /= std::sqrt(2.0)) {
        const int side = static_cast<int>(std::lround(128 * ratio));
        const int g = (side - 16) / 8 + 1;
        expected_count += static_cast<std::size_t>(g) * g;
    }
    CHECK(set.count == expected_count);
}

TEST_CASE("multiscale: single unit scale equals the direct extractor call") {
    Rng rng(313);
    img::Image im = noise_image(rng, 48, 48, 3);
    DescriptorSet direct = dense_lbp(im);
    DescriptorSet via = multiscale(im, [](const img::Image& i) { return dense_lbp(i); }, 1, 1.0);
    REQUIRE(via.count == direct.count);
    for (std::size_t i = 0; i < via.count; ++i)
        for (std::size_t j = 0; j < via.dim; ++j) CHECK(via.data(i, j) == direct.data(i, j));
}

TEST_CASE("multiscale: undersized scales are skipped with a warning") {
    Rng rng(317);
    img::Image im = noise_image(rng, 40, 40, 3);
    std::vector<std::string> warnings;
    DescriptorSet set = multiscale(
        im, [](const img::Image& i) { return dense_lbp(i, 16, 8); }, 7, 2.0,
        std::sqrt(2.0), &warnings);
    CHECK(set.count > 0);
    CHECK(warnings.size() == 2);  // ratios 0.354 and 0.25 shrink below the patch
}

TEST_CASE("CFVD round-trip is byte-exact") {
    Rng rng(331);
    img::Image im = noise_image(rng, 48, 48, 3);
    DescriptorSet set = dense_lbp(im);
    namespace fs = std::filesystem;
    const std::string p1 = (fs::temp_directory_path() / "rt1.cfvd").string();
    const std::string p2 = (fs::temp_directory_path() / "rt2.cfvd").string();
    save_descriptors(set, p1);
    DescriptorSet loaded = load_descriptors(p1);
    CHECK(loaded.count == set.count);
    CHECK(loaded.dim == set.dim);
    CHECK(loaded.has_positions());
    save_descriptors(loaded, p2);
    CHECK(read_bytes(p1) == read_bytes(p2));
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("CFVD: empty sets round-trip; malformed files are rejected") {
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "empty.cfvd").string();
    DescriptorSet empty;
    empty.dim = 128;
    empty.data = Matrix(0, 128);
    save_descriptors(empty, p);
    DescriptorSet loaded = load_descriptors(p);
    CHECK(loaded.count == 0);
    CHECK(loaded.dim == 128);

    // Bad magic.
    {
        std::ofstream os(p, std::ios::binary);
        os << "NOPExxxxxxxxxxxxxxxx";
    }
    CHECK_THROWS_WITH_AS(load_descriptors(p), doctest::Contains("bad magic"), Error);

    // Truncated payload: header promises more floats than present.
    {
        std::ofstream os(p, std::ios::binary);
        const unsigned char header[] = {'C', 'F', 'V', 'D', 1, 0, 2, 0, 0, 0,
                                        3,   0,   0,   0,  0, 0};
        os.write(reinterpret_cast<const char*>(header), sizeof(header));
        const float f = 1.0f;
        os.write(reinterpret_cast<const char*>(&f), 4);
    }
    CHECK_THROWS_WITH_AS(load_descriptors(p), doctest::Contains("truncated"), Error);
    fs::remove(p);
}

TEST_CASE("extraction is deterministic: same image bytes, same descriptor bytes") {
    Rng rng(337);
    img::Image im = noise_image(rng, 40, 40, 3);
    namespace fs = std::filesystem;
    const std::string p1 = (fs::temp_directory_path() / "det1.cfvd").string();
    const std::string p2 = (fs::temp_directory_path() / "det2.cfvd").string();
    save_descriptors(multiscale(im, [](const img::Image& i) { return dense_lbp(i); }, 3), p1);
    save_descriptors(multiscale(im, [](const img::Image& i) { return dense_lbp(i); }, 3), p2);
    CHECK(read_bytes(p1) == read_bytes(p2));
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("PPM and PNG image io round-trips") {
    Rng rng(341);
    namespace fs = std::filesystem;
    for (int channels : {1, 3}) {
        img::Image im = noise_image(rng, 21, 13, channels);
        const std::string ppm = (fs::temp_directory_path() / "io.ppm").string();
        const std::string png = (fs::temp_directory_path() / "io.png").string();
        img::save_ppm(im, ppm);
        img::Image r1 = img::load_image(ppm);
        CHECK(r1.width == 21);
        CHECK(r1.height == 13);
        CHECK(r1.channels == channels);
        img::save_png(im, png);
        img::Image r2 = img::load_image(png);
        REQUIRE(r2.pixels.size() == r1.pixels.size());
        // Both formats quantize to 8 bits, so they agree exactly.
        for (std::size_t i = 0; i < r1.pixels.size(); ++i) CHECK(r1.pixels[i] == r2.pixels[i]);
        fs::remove(ppm);
        fs::remove(png);
    }
    CHECK_THROWS_AS(img::load_image("/nonexistent/file.png"), Error);
}
