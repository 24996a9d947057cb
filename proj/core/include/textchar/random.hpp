#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace textchar {

/// Version of the seed -> sample stream mapping below. Bump when any
/// generator changes its output for a given seed.
inline constexpr int kRandomStreamVersion = 1;

/// Seeded random stream, stream version 1:
///   engine   std::mt19937_64 seeded with the 64-bit seed (fully specified by the standard)
///   uniform  (engine() >> 11) * 2^-53, in [0, 1)
///   normal   Box-Muller on (1 - u1, u2), both outputs of a pair used in order
///   index    unbiased bounded integer by rejection on the top bits of engine()
/// std::normal_distribution and std::uniform_int_distribution are avoided
/// because their output is implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept;
    double normal() noexcept;
    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Independent child seed for sub-stream `stream` of `seed` (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace textchar

namespace textchar {

/// k distinct indices drawn uniformly from [0, n), returned in ascending order.
/// Partial Fisher-Yates over an index array; O(n) memory.
std::vector<std::size_t> choose_subset(std::size_t n, std::size_t k, RandomStream& rng);

}  // namespace textchar
