#pragma once

#include <cstdint>
#include <optional>

namespace twosided {

/// log C(n, k) via log-gamma. Returns -inf when k > n.
double log_choose(std::uint64_t n, std::uint64_t k) noexcept;

/// Exact C(n, k) when it fits in 64 bits.
std::optional<std::uint64_t> choose_exact(std::uint64_t n, std::uint64_t k) noexcept;

}  // namespace twosided
