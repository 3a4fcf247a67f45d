#pragma once

// Deterministic random streams. A root seed fans out to independent child
// streams through a counter-based splitmix64 hash, so every stochastic task
// in a run can be replayed bit-for-bit from one 64-bit seed. The uniform and
// Poisson samplers are implemented here (not taken from <random>'s
// distributions) so that sequences are identical across standard libraries.

#include <cstdint>
#include <random>

namespace spintomo {

/// splitmix64 step; also used to derive child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream derived from this generator's root seed and a
    /// caller-chosen stream index. Deterministic; does not advance *this.
    Rng child(std::uint64_t stream) const;

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Poisson sample; exact inversion for small means, transformed
    /// rejection (PTRS) for large means. mean <= 0 returns 0.
    long poisson(double mean);

    std::uint64_t root_seed() const { return root_; }

private:
    std::uint64_t root_;
    std::mt19937_64 eng_;

    long poisson_knuth(double mean);
    long poisson_ptrs(double mean);
};

} // namespace spintomo
