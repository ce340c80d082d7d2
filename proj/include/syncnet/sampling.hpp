#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "syncnet/linalg.hpp"

namespace syncnet {

/// Seeded generator with explicit value derivations, so sample sets are reproducible
/// from the seed alone regardless of standard-library distribution internals.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal() {
        // Box-Muller; guard against log(0)
        double u1 = uniform01();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Vec uniform_vec(int dim, double lo, double hi) {
        Vec v(static_cast<std::size_t>(dim));
        for (double& x : v)
            x = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

/// SYNCNET_SEED environment variable, default 0.
inline std::uint64_t seed_from_env() {
    if (const char* s = std::getenv("SYNCNET_SEED"))
        return std::strtoull(s, nullptr, 10);
    return 0;
}

/// One probe point for the dissipation checks: (t, eta) or, in relative mode, (t, eta, zeta).
struct StateSample {
    double t = 0.0;
    Vec eta;
    Vec zeta;
};

struct PairSample {
    Vec eta;
    Vec zeta;
};

inline std::vector<StateSample> make_state_samples(std::uint64_t seed, int count, int dim,
                                                   double box = 3.0, double t_max = 10.0) {
    SampleRng rng(seed);
    std::vector<StateSample> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        StateSample s;
        s.t = rng.uniform(0.0, t_max);
        s.eta = rng.uniform_vec(dim, -box, box);
        s.zeta = rng.uniform_vec(dim, -box, box);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline std::vector<PairSample> make_pair_samples(std::uint64_t seed, int count, int dim,
                                                 double box = 3.0) {
    SampleRng rng(seed);
    std::vector<PairSample> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        samples.push_back({rng.uniform_vec(dim, -box, box), rng.uniform_vec(dim, -box, box)});
    return samples;
}

}  // namespace syncnet
