#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "image.hpp"
#include "types.hpp"

namespace cfv::desc {

struct DescriptorSet {
    std::size_t count = 0, dim = 0;
    Matrix data;       // count x dim
    Matrix positions;  // count x 3: (x, y, scale); empty when absent
    std::string source_id;

    bool has_positions() const { return positions.rows() == count && count > 0; }
};

// 256 -> 59-bin map for uniform local binary patterns (at most two circular
// bit transitions); the 58 uniform codes keep individual bins in ascending
// code order, everything else lands in the catch-all bin 58.
const std::array<int, 256>& uniform_lbp_table();
constexpr int kUniformPatternCount = 58;
constexpr int kLbpBins = 59;

// Dense 59-bin uniform-LBP color descriptor: per grid patch, one L1-normalized
// histogram per RGB channel, concatenated (D = 177). Neighbor bits are taken
// clockwise starting at the east neighbor, neighbor >= center -> 1; image
// borders replicate.
DescriptorSet dense_lbp(const img::Image& image, int patch = 16, int step = 8);

// Dense spatial histogram of gradient orientations over [0, pi): cells x cells
// grid of cell_px x cell_px cells per patch, magnitude-weighted votes linearly
// interpolated between adjacent orientation bins; per-descriptor L2 norm with
// 0.2 clipping and renormalization (D = cells^2 * bins = 128 at defaults).
DescriptorSet dense_gradhist(const img::Image& image, int bins = 8, int cells = 4,
                             int cell_px = 4, int step = 4);

using Extractor = std::function<DescriptorSet(const img::Image&)>;

// Runs the extractor at ratios ratio_max * factor^{-s}, s = 0..num_scales-1,
// resampling bilinearly; descriptor order is scale-major. Scales smaller than
// the extractor's patch produce a warning and are skipped.
DescriptorSet multiscale(const img::Image& image, const Extractor& extractor,
                         int num_scales = 7, double ratio_max = 2.0,
                         double factor = 1.4142135623730951,
                         std::vector<std::string>* warnings = nullptr);

// CFVD container: magic "CFVD", version u16, N u32, D u32, flags u16, payload
// of N*D little-endian float32, then an optional positions block (N float32
// triples) when flags bit 0 is set.
void save_descriptors(const DescriptorSet& set, const std::string& path);
DescriptorSet load_descriptors(const std::string& path);

}  // namespace cfv::desc
