#include "spintomo/random.hpp"

#include <cmath>

namespace spintomo {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t s = root;
    std::uint64_t a = splitmix64(s);
    s = root ^ (0xA0761D6478BD642FULL * (stream + 1));
    std::uint64_t b = splitmix64(s);
    return a ^ b;
}

} // namespace

Rng::Rng(std::uint64_t seed) : root_(seed), eng_(mix_seed(seed, 0)) {}

Rng Rng::child(std::uint64_t stream) const {
    Rng r(mix_seed(root_, stream));
    return r;
}

std::uint64_t Rng::next_u64() {
    return eng_();
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

long Rng::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    return mean < 10.0 ? poisson_knuth(mean) : poisson_ptrs(mean);
}

long Rng::poisson_knuth(double mean) {
    const double threshold = std::exp(-mean);
    long k = 0;
    double prod = uniform();
    while (prod > threshold) {
        ++k;
        prod *= uniform();
    }
    return k;
}

// Hoermann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
long Rng::poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= vr) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= -mean + k * loglam - std::lgamma(k + 1.0)) {
            return k;
        }
    }
}

} // namespace spintomo
