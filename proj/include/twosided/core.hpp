#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twosided/rng.hpp"

namespace twosided {

/// The two populations of the marketplace. Buyers index rows, sellers columns.
enum class Side { buyer, seller };

inline Side other(Side s) noexcept { return s == Side::buyer ? Side::seller : Side::buyer; }
std::string to_string(Side s);

/// Binary treatment vector for one side of the market.
class AssignmentVector {
public:
    AssignmentVector() = default;
    /// Throws ParameterError if any entry is not 0 or 1.
    explicit AssignmentVector(std::vector<std::uint8_t> bits);
    AssignmentVector(std::initializer_list<int> bits);

    static AssignmentVector zeros(std::size_t m) { return AssignmentVector(std::vector<std::uint8_t>(m, 0)); }
    static AssignmentVector ones(std::size_t m) { return AssignmentVector(std::vector<std::uint8_t>(m, 1)); }

    std::size_t size() const noexcept { return bits_.size(); }
    std::size_t treated_count() const noexcept { return treated_; }
    std::size_t control_count() const noexcept { return bits_.size() - treated_; }
    bool treated(std::size_t i) const { return bits_.at(i) != 0; }
    std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// Ascending indices whose entry equals `value`.
    std::vector<std::size_t> indices_of(bool value) const;

    friend bool operator==(const AssignmentVector&, const AssignmentVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
    std::size_t treated_ = 0;
};

/// w^B and w^S. The induced assignment matrix is their outer product and is
/// only materialized by outer_matrix().
struct AssignmentPair {
    AssignmentVector buyer;
    AssignmentVector seller;

    const AssignmentVector& side(Side s) const noexcept { return s == Side::buyer ? buyer : seller; }
    AssignmentVector& side(Side s) noexcept { return s == Side::buyer ? buyer : seller; }
    std::size_t rows() const noexcept { return buyer.size(); }
    std::size_t cols() const noexcept { return seller.size(); }

    friend bool operator==(const AssignmentPair&, const AssignmentPair&) = default;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Observed outcomes Y (I x J). Entries must be finite.
class OutcomeMatrix {
public:
    OutcomeMatrix() = default;
    explicit OutcomeMatrix(Matrix values);

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    const Matrix& values() const noexcept { return values_; }

    friend bool operator==(const OutcomeMatrix&, const OutcomeMatrix&) = default;

private:
    Matrix values_;
};

/// Potential outcomes under the four exposure cases (buyer, seller) in
/// {(0,0), (1,0), (0,1), (1,1)}.
class PotentialOutcomeSchedule {
public:
    PotentialOutcomeSchedule(Matrix y00, Matrix y10, Matrix y01, Matrix y11);

    std::size_t rows() const noexcept { return y00_.rows(); }
    std::size_t cols() const noexcept { return y00_.cols(); }
    const Matrix& y00() const noexcept { return y00_; }
    const Matrix& y10() const noexcept { return y10_; }
    const Matrix& y01() const noexcept { return y01_; }
    const Matrix& y11() const noexcept { return y11_; }
    const Matrix& exposure(bool buyer_treated, bool seller_treated) const noexcept;

private:
    Matrix y00_, y10_, y01_, y11_;
};

/// Fixed-count randomization on both sides.
struct CompleteDesign {
    std::size_t buyers, treated_buyers, sellers, treated_sellers;
};

/// Independent coin flips per unit.
struct BernoulliDesign {
    std::size_t buyers, sellers;
    double p_buyer, p_seller;
    int max_redraws = 1000;
};

/// User-supplied marginal samplers. `exchangeable` asserts design symmetry.
struct CustomDesign {
    using Sampler = std::function<AssignmentVector(Rng&)>;
    std::size_t buyers, sellers;
    Sampler buyer_sampler, seller_sampler;
    bool exchangeable = false;
};

/// Independent two-sided randomized design: p(W) = p^B(w^B) p^S(w^S).
class Design {
public:
    static Design complete(std::size_t buyers, std::size_t treated_buyers, std::size_t sellers,
                           std::size_t treated_sellers);
    static Design bernoulli(std::size_t buyers, std::size_t sellers, double p_buyer, double p_seller,
                            int max_redraws = 1000);
    static Design custom(CustomDesign spec);

    bool exchangeable() const noexcept;
    std::size_t size(Side s) const noexcept;
    const std::variant<CompleteDesign, BernoulliDesign, CustomDesign>& kind() const noexcept { return kind_; }
    std::string name() const;

    /// One draw from the marginal design of one side, with no degeneracy
    /// screening (used by the conditional rejection sampler).
    AssignmentVector sample_side(Side s, Rng& rng) const;

private:
    explicit Design(std::variant<CompleteDesign, BernoulliDesign, CustomDesign> kind) : kind_(std::move(kind)) {}
    std::variant<CompleteDesign, BernoulliDesign, CustomDesign> kind_;
};

/// Draw an assignment pair. Bernoulli sides that come out all-treated or
/// all-control are redrawn up to the design's cap, then ParameterError.
AssignmentPair sample_design(const Design& design, std::uint64_t seed);

/// Materialize W = w^B (w^S)^T as a 0/1 matrix.
Matrix outer_matrix(const AssignmentPair& pair);

/// Y_ij = Y_ij(w^B_i, w^S_j). Throws ShapeError on dimension mismatch.
OutcomeMatrix realize_outcomes(const PotentialOutcomeSchedule& schedule, const AssignmentPair& pair);

/// Uniformly random vector of length m with exactly `treated` ones.
AssignmentVector sample_fixed_count(std::size_t m, std::size_t treated, Rng& rng);

}  // namespace twosided
