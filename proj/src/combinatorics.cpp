#include "twosided/combinatorics.hpp"

#include <cmath>
#include <limits>

namespace twosided {

__extension__ using u128 = unsigned __int128;

double log_choose(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    const auto nd = static_cast<double>(n);
    const auto kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

std::optional<std::uint64_t> choose_exact(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays integral at every step.
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(r);
}

}  // namespace twosided
