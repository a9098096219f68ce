#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "twosided/core.hpp"
#include "twosided/rng.hpp"

namespace testing {

inline twosided::AssignmentPair make_pair(std::initializer_list<int> buyer, std::initializer_list<int> seller) {
    return {twosided::AssignmentVector(buyer), twosided::AssignmentVector(seller)};
}

inline twosided::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    twosided::Rng rng(seed, 99);
    twosided::Matrix m(rows, cols);
    for (double& x : m.data()) x = rng.normal();
    return m;
}

inline twosided::Matrix constant_matrix(std::size_t rows, std::size_t cols, double c) {
    return twosided::Matrix(rows, cols, c);
}

// Every binary vector of length m, as bit masks.
inline twosided::AssignmentVector from_mask(std::uint64_t mask, std::size_t m) {
    std::vector<std::uint8_t> bits(m);
    for (std::size_t i = 0; i < m; ++i) bits[i] = (mask >> i) & 1u;
    return twosided::AssignmentVector(std::move(bits));
}

}  // namespace testing
