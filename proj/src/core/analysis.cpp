#include "analysis.hpp"

#include <cmath>

#include "reduce.hpp"

namespace cfv::analysis {

ComponentCorrelation correlations_under_weights(const Matrix& descriptors,
                                                const Vector& weights) {
    const linalg::Moments mom = linalg::weighted_moments(descriptors, weights);
    const std::size_t d = descriptors.cols();
    ComponentCorrelation out;
    out.rho = SymMatrix(d);
    Vector sd(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double var = mom.cov.at(i, i);
        if (var <= 0.0) {
            out.degenerate_axes.push_back(i);
            sd[i] = 0.0;
        } else {
            sd[i] = std::sqrt(var);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        out.rho.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (sd[i] == 0.0 || sd[j] == 0.0) {
                out.rho.at(i, j) = 0.0;
            } else {
                double r = mom.cov.at(i, j) / (sd[i] * sd[j]);
                // Clamp the rounding spill of perfectly dependent axes.
                out.rho.at(i, j) = std::max(-1.0, std::min(1.0, r));
            }
        }
    }
    return out;
}

ComponentCorrelation component_correlations(const gmm::GmmModel& model,
                                            const Matrix& descriptors, std::size_t k,
                                            double active_threshold) {
    require(k < model.K, ErrorCode::validation, "component_correlations: bad component index");
    const gmm::Posteriors post = gmm::Posteriors::compute(model, descriptors);
    require(post.mass[k] > active_threshold, ErrorCode::data,
            "component_correlations: component " + std::to_string(k) +
                " is inactive for this descriptor set");
    return correlations_under_weights(descriptors, post.normalized_column(k));
}

CorrelationHistogram correlation_histogram(const gmm::GmmModel& model,
                                           const std::vector<Matrix>& sets, int bins,
                                           double active_threshold, int workers) {
    require(bins >= 1, ErrorCode::validation, "correlation_histogram: bins must be >= 1");
    require(!sets.empty(), ErrorCode::validation, "correlation_histogram: no descriptor sets");
    require(model.D >= 2, ErrorCode::validation,
            "correlation_histogram: need at least two feature axes");

    CorrelationHistogram h;
    h.K = model.K;
    h.D = model.D;
    h.num_sets = sets.size();
    h.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.bin_edges[b] = static_cast<double>(b) / bins;
    h.frequencies.assign(bins, 0.0);

    // One normalized histogram per active (set, component) pair.
    struct PairHist {
        Vector freq;
        double below = 0.0, mid = 0.0;
        bool active = false;
    };
    std::vector<PairHist> partial(sets.size() * model.K);
    parallel_for(sets.size(), workers, [&](std::size_t s) {
        const gmm::Posteriors post = gmm::Posteriors::compute(model, sets[s]);
        for (std::size_t k = 0; k < model.K; ++k) {
            if (post.mass[k] <= active_threshold) continue;
            const ComponentCorrelation cc =
                correlations_under_weights(sets[s], post.normalized_column(k));
            PairHist& ph = partial[s * model.K + k];
            ph.freq.assign(bins, 0.0);
            std::size_t npairs = 0;
            for (std::size_t i = 0; i < model.D; ++i)
                for (std::size_t j = i + 1; j < model.D; ++j, ++npairs) {
                    const double a = std::abs(cc.rho.at(i, j));
                    int b = std::min(static_cast<int>(a * bins), bins - 1);
                    ph.freq[b] += 1.0;
                    if (a < 0.05) ph.below += 1.0;
                    if (a >= 0.05 && a <= 0.5) ph.mid += 1.0;
                }
            for (double& f : ph.freq) f /= static_cast<double>(npairs);
            ph.below /= static_cast<double>(npairs);
            ph.mid /= static_cast<double>(npairs);
            ph.active = true;
        }
    });

    for (const PairHist& ph : partial) {
        if (!ph.active) continue;
        ++h.num_active_pairs;
        for (int b = 0; b < bins; ++b) h.frequencies[b] += ph.freq[b];
        h.mass_below_005 += ph.below;
        h.mass_005_to_05 += ph.mid;
    }
    require(h.num_active_pairs > 0, ErrorCode::data,
            "correlation_histogram: no active (set, component) pairs");
    const double inv = 1.0 / static_cast<double>(h.num_active_pairs);
    for (double& f : h.frequencies) f *= inv;
    h.mass_below_005 *= inv;
    h.mass_005_to_05 *= inv;
    return h;
}

}  // namespace cfv::analysis
