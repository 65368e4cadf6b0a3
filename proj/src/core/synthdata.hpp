#pragma once

#include <cstdint>
#include <vector>

#include "descriptors.hpp"
#include "types.hpp"

namespace cfv::synth {

// Four 3D Gaussian components whose principal axes are rotated (about z) by
// pairwise-distinct angles, placed so the pooled covariance is axis-aligned:
// universal PCA diagonalizes the pool while every component stays correlated.
// Generator constants (documented, fixed):
//   means     (+4,+2,0), (-4,+2,0), (-4,-2,0), (+4,-2,0)
//   axis vars (2.0, 0.3, 0.3), rotation angles 30/60/120/150 degrees
struct Figure1Data {
    Matrix points;            // N x 3, N = 4 * n_per_component
    std::vector<int> labels;  // true component per point
};
Figure1Data figure1_dataset(std::uint64_t seed, int n_per_component = 500);

// Two-class benchmark where the classes differ only in the sign of the
// intra-component correlation (rho = +/-0.6 between axes 0 and 1, jittered
// per image by +/-0.1): per-component means, priors, and per-axis variances
// are identical across classes, so diagonal statistics carry almost no class
// signal while correlation-aware statistics carry a strong one.
struct TwoClassData {
    std::vector<desc::DescriptorSet> images;
    std::vector<int> labels;  // 0 or 1 per image
};
TwoClassData twoclass_benchmark(std::uint64_t seed, int images_per_class = 100,
                                int descriptors_per_image = 200);

inline constexpr double kTwoClassRho = 0.6;
inline constexpr double kTwoClassRhoJitter = 0.1;
inline constexpr int kTwoClassComponents = 2;
inline constexpr int kTwoClassDim = 3;

}  // namespace cfv::synth
