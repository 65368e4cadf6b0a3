#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace cfv {

// xoshiro256++ with splitmix64 seeding. All randomness in the library flows
// through this generator so that results are reproducible across platforms
// with IEEE-754 doubles; std::* distributions are avoided on purpose since
// their output is implementation-defined.
//
// Stream layout is fixed: next_double() consumes one u64, next_gaussian()
// consumes exactly two u64 (Box-Muller, no caching), next_index(n) consumes
// one u64 per rejection round.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Named sub-stream derived from a root seed; changing one stage's stream
    // leaves the others untouched.
    static Rng stream(std::uint64_t root_seed, std::string_view name);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_double();

    // Standard normal via Box-Muller; each call consumes two u64.
    double next_gaussian();

    // Uniform integer in [0, n), unbiased (rejection sampling).
    std::uint64_t next_index(std::uint64_t n);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

// FNV-1a 64-bit, used to hash stream names.
std::uint64_t fnv1a64(std::string_view s);

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace cfv
