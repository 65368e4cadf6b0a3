#pragma once

#include <vector>

#include "gmm.hpp"
#include "types.hpp"

namespace cfv::analysis {

struct ComponentCorrelation {
    SymMatrix rho;                        // diagonal exactly 1
    std::vector<std::size_t> degenerate_axes;  // zero-variance axes (entries set to 0)
};

// Pearson correlations of the descriptors under the given pmf weights
// (non-negative, summing to 1).
ComponentCorrelation correlations_under_weights(const Matrix& descriptors,
                                                const Vector& weights);

// Correlations w.r.t. component k using the model's soft assignments as the
// pmf. Fails (data error) when the component mass is below the threshold.
ComponentCorrelation component_correlations(const gmm::GmmModel& model,
                                            const Matrix& descriptors, std::size_t k,
                                            double active_threshold = 1e-8);

struct CorrelationHistogram {
    Vector bin_edges;    // bins + 1, uniform over [0, 1]
    Vector frequencies;  // bins, sums to 1
    double mass_below_005 = 0.0;  // fraction with |rho| < 0.05
    double mass_005_to_05 = 0.0;  // fraction with 0.05 <= |rho| <= 0.5
    std::size_t K = 0, D = 0;
    std::size_t num_sets = 0;          // descriptor sets (images) seen
    std::size_t num_active_pairs = 0;  // (set, component) pairs averaged
};

// Histogram of |rho_ij| over all i<j pairs, one histogram per active
// (set, component) pair, averaged uniformly over pairs.
CorrelationHistogram correlation_histogram(const gmm::GmmModel& model,
                                           const std::vector<Matrix>& sets, int bins = 20,
                                           double active_threshold = 1e-8, int workers = 1);

}  // namespace cfv::analysis
