#pragma once

#include <cstdint>

namespace dynat {

/// Portable 64-bit PRNG (xoshiro256**, state seeded through SplitMix64).
///
/// Every draw is defined here bit-for-bit rather than delegated to
/// <random> distributions, whose output is implementation-defined. Two
/// instances built from the same seed produce the same sequence on any
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() noexcept;

    /// Uniform integer in [0, n). Unbiased (rejection on the top bits).
    /// n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) noexcept;

    /// Seed for an independent child stream.
    ///
    /// child = splitmix64(seed ^ splitmix64(stream + 1)). Streams with
    /// distinct ids never share a draw sequence in practice, so a run can
    /// hand separate generators to the environment and the agent.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept;

    static std::uint64_t splitmix64(std::uint64_t x) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

}  // namespace dynat
