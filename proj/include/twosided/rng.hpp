#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace twosided {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key is the master seed; the upper 64 bits of the 128-bit
/// counter carry a stream id and the lower 64 bits are the position within
/// the stream. Any (seed, stream) pair therefore gives an independent,
/// reproducible sequence without coordination between threads.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// The raw 10-round bijection. Exposed for known-answer tests.
    static Block encrypt(Block counter, Key key) noexcept;

private:
    Key key_;
    Block counter_;
    Block buffer_{};
    int index_ = 4;
};

/// Helper layer over Philox with the distributions the library needs. All
/// algorithms are fixed here (not delegated to <random> distributions) so the
/// same seed produces the same numbers on every standard library.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) noexcept : engine_(seed, stream) {}

    std::uint32_t next_u32() noexcept { return engine_(); }
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform integer in [0, bound) (Lemire's nearly-divisionless method).
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller; caches the second variate.
    double normal() noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    template <class T>
    void shuffle(std::span<T> values) noexcept {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    Philox4x32 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed for a (parent, index) pair.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Deterministic child seed for a (parent, label) pair.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

}  // namespace twosided
