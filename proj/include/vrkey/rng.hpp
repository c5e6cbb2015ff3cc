#pragma once

// Seeded RNG with hand-rolled distributions. std::* distributions are
// implementation-defined, which would break byte-identical reruns.

#include <cstdint>
#include <cmath>
#include <random>

namespace vrkey {

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return (engine_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    double gaussian(double mean = 0.0, double stddev = 1.0) {
        // Box-Muller, one value per call.
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Derive an independent stream, e.g. per user or per worker.
    Rng fork(uint64_t salt) { return Rng(engine_() ^ (salt * 0x9e3779b97f4a7c15ull)); }

private:
    std::mt19937_64 engine_;
};

// FNV-1a, used for config/trace/report fingerprints in manifests.
inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace vrkey
