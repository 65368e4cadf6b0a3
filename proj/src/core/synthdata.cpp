#include "synthdata.hpp"

#include <cmath>

#include "rng.hpp"

namespace cfv::synth {

namespace {

constexpr double kFig1Means[4][3] = {
    {4.0, 2.0, 0.0}, {-4.0, 2.0, 0.0}, {-4.0, -2.0, 0.0}, {4.0, -2.0, 0.0}};
constexpr double kFig1AnglesDeg[4] = {30.0, 60.0, 120.0, 150.0};
constexpr double kFig1AxisVars[3] = {2.0, 0.3, 0.3};

}  // namespace

Figure1Data figure1_dataset(std::uint64_t seed, int n_per_component) {
    require(n_per_component >= 10, ErrorCode::validation,
            "figure1_dataset: n_per_component must be >= 10");
    Rng rng = Rng::stream(seed, "synth-fig1");

    Figure1Data out;
    const std::size_t n = 4 * static_cast<std::size_t>(n_per_component);
    out.points = Matrix(n, 3);
    out.labels.resize(n);

    std::size_t row = 0;
    for (int comp = 0; comp < 4; ++comp) {
        const double theta = kFig1AnglesDeg[comp] * M_PI / 180.0;
        const double c = std::cos(theta), s = std::sin(theta);
        const double sa = std::sqrt(kFig1AxisVars[0]);
        const double sb = std::sqrt(kFig1AxisVars[1]);
        const double sc = std::sqrt(kFig1AxisVars[2]);
        for (int i = 0; i < n_per_component; ++i, ++row) {
            const double z0 = sa * rng.next_gaussian();
            const double z1 = sb * rng.next_gaussian();
            const double z2 = sc * rng.next_gaussian();
            // Rotation about z applied to the axis-aligned draw.
            out.points(row, 0) = kFig1Means[comp][0] + c * z0 - s * z1;
            out.points(row, 1) = kFig1Means[comp][1] + s * z0 + c * z1;
            out.points(row, 2) = kFig1Means[comp][2] + z2;
            out.labels[row] = comp;
        }
    }
    return out;
}

TwoClassData twoclass_benchmark(std::uint64_t seed, int images_per_class,
                                int descriptors_per_image) {
    require(images_per_class >= 1 && descriptors_per_image >= 1, ErrorCode::validation,
            "twoclass_benchmark: counts must be positive");
    Rng rng = Rng::stream(seed, "synth-twoclass");

    const double comp_means[kTwoClassComponents][kTwoClassDim] = {{3.0, 0.0, 0.0},
                                                                  {-3.0, 0.0, 0.0}};
    TwoClassData out;
    out.images.reserve(2 * static_cast<std::size_t>(images_per_class));
    out.labels.reserve(out.images.capacity());

    for (int cls = 0; cls < 2; ++cls) {
        const double sign = cls == 0 ? 1.0 : -1.0;
        for (int im = 0; im < images_per_class; ++im) {
            const double jitter = (2.0 * rng.next_double() - 1.0) * kTwoClassRhoJitter;
            const double rho = sign * (kTwoClassRho + jitter);
            const double tail = std::sqrt(1.0 - rho * rho);

            desc::DescriptorSet set;
            set.count = static_cast<std::size_t>(descriptors_per_image);
            set.dim = kTwoClassDim;
            set.data = Matrix(set.count, set.dim);
            set.source_id =
                "synth/class" + std::to_string(cls) + "/img" + std::to_string(im);
            for (std::size_t i = 0; i < set.count; ++i) {
                const int comp = rng.next_double() < 0.5 ? 0 : 1;
                const double z0 = rng.next_gaussian();
                const double z1 = rng.next_gaussian();
                const double z2 = rng.next_gaussian();
                // Unit marginal variances for every axis; only the (0,1)
                // correlation carries the class.
                set.data(i, 0) = comp_means[comp][0] + z0;
                set.data(i, 1) = comp_means[comp][1] + rho * z0 + tail * z1;
                set.data(i, 2) = comp_means[comp][2] + z2;
            }
            out.images.push_back(std::move(set));
            out.labels.push_back(cls);
        }
    }
    return out;
}

}  // namespace cfv::synth
