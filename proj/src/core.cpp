#include "twosided/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "twosided/error.hpp"

namespace twosided {

std::string to_string(Side s) { return s == Side::buyer ? "buyer" : "seller"; }

AssignmentVector::AssignmentVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] > 1)
            throw ParameterError("assignment entry " + std::to_string(i) + " is not 0 or 1");
        treated_ += bits_[i];
    }
}

AssignmentVector::AssignmentVector(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw ParameterError("assignment entries must be 0 or 1");
        bits_.push_back(static_cast<std::uint8_t>(b));
        treated_ += static_cast<std::size_t>(b);
    }
}

std::vector<std::size_t> AssignmentVector::indices_of(bool value) const {
    std::vector<std::size_t> out;
    out.reserve(value ? treated_ : bits_.size() - treated_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if ((bits_[i] != 0) == value) out.push_back(i);
    return out;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        throw ShapeError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                         std::to_string(rows_ * cols_));
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

OutcomeMatrix::OutcomeMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.all_finite()) throw ParameterError("outcome matrix contains non-finite entries");
}

PotentialOutcomeSchedule::PotentialOutcomeSchedule(Matrix y00, Matrix y10, Matrix y01, Matrix y11)
    : y00_(std::move(y00)), y10_(std::move(y10)), y01_(std::move(y01)), y11_(std::move(y11)) {
    for (const Matrix* m : {&y10_, &y01_, &y11_}) {
        if (m->rows() != y00_.rows() || m->cols() != y00_.cols())
            throw ShapeError("potential outcome matrices must share dimensions");
    }
    for (const Matrix* m : {&y00_, &y10_, &y01_, &y11_}) {
        if (!m->all_finite()) throw ParameterError("potential outcomes must be finite");
    }
}

const Matrix& PotentialOutcomeSchedule::exposure(bool buyer_treated, bool seller_treated) const noexcept {
    if (buyer_treated) return seller_treated ? y11_ : y10_;
    return seller_treated ? y01_ : y00_;
}

Design Design::complete(std::size_t buyers, std::size_t treated_buyers, std::size_t sellers,
                        std::size_t treated_sellers) {
    if (!(0 < treated_buyers && treated_buyers < buyers))
        throw ParameterError("complete design requires 0 < I_1 < I (got I=" + std::to_string(buyers) +
                             ", I_1=" + std::to_string(treated_buyers) + ")");
    if (!(0 < treated_sellers && treated_sellers < sellers))
        throw ParameterError("complete design requires 0 < J_1 < J (got J=" + std::to_string(sellers) +
                             ", J_1=" + std::to_string(treated_sellers) + ")");
    return Design(CompleteDesign{buyers, treated_buyers, sellers, treated_sellers});
}

Design Design::bernoulli(std::size_t buyers, std::size_t sellers, double p_buyer, double p_seller,
                         int max_redraws) {
    if (buyers < 2 || sellers < 2) throw ParameterError("bernoulli design needs at least two units per side");
    if (!(p_buyer > 0.0 && p_buyer < 1.0) || !(p_seller > 0.0 && p_seller < 1.0))
        throw ParameterError("bernoulli probabilities must lie in (0, 1)");
    if (max_redraws < 1) throw ParameterError("max_redraws must be positive");
    return Design(BernoulliDesign{buyers, sellers, p_buyer, p_seller, max_redraws});
}

Design Design::custom(CustomDesign spec) {
    if (!spec.buyer_sampler || !spec.seller_sampler) throw ParameterError("custom design needs both samplers");
    if (spec.buyers == 0 || spec.sellers == 0) throw ParameterError("custom design needs non-empty sides");
    return Design(std::move(spec));
}

bool Design::exchangeable() const noexcept {
    if (const auto* c = std::get_if<CustomDesign>(&kind_)) return c->exchangeable;
    return true;
}

std::size_t Design::size(Side s) const noexcept {
    return std::visit(
        [s](const auto& d) -> std::size_t { return s == Side::buyer ? d.buyers : d.sellers; }, kind_);
}

std::string Design::name() const {
    struct Namer {
        std::string operator()(const CompleteDesign&) const { return "complete"; }
        std::string operator()(const BernoulliDesign&) const { return "bernoulli"; }
        std::string operator()(const CustomDesign&) const { return "custom"; }
    };
    return std::visit(Namer{}, kind_);
}

AssignmentVector sample_fixed_count(std::size_t m, std::size_t treated, Rng& rng) {
    std::vector<std::uint8_t> bits(m, 0);
    std::fill_n(bits.begin(), std::min(treated, m), std::uint8_t{1});
    rng.shuffle(std::span<std::uint8_t>(bits));
    return AssignmentVector(std::move(bits));
}

namespace {

AssignmentVector bernoulli_vector(std::size_t m, double p, Rng& rng) {
    std::vector<std::uint8_t> bits(m);
    for (auto& b : bits) b = rng.bernoulli(p) ? 1 : 0;
    return AssignmentVector(std::move(bits));
}

AssignmentVector checked_custom(const CustomDesign::Sampler& sampler, std::size_t m, Rng& rng) {
    AssignmentVector v = sampler(rng);
    if (v.size() != m) throw ShapeError("custom sampler returned a vector of the wrong length");
    return v;
}

}  // namespace

AssignmentVector Design::sample_side(Side s, Rng& rng) const {
    struct Sampler {
        Side s;
        Rng& rng;
        AssignmentVector operator()(const CompleteDesign& d) const {
            return s == Side::buyer ? sample_fixed_count(d.buyers, d.treated_buyers, rng)
                                    : sample_fixed_count(d.sellers, d.treated_sellers, rng);
        }
        AssignmentVector operator()(const BernoulliDesign& d) const {
            return s == Side::buyer ? bernoulli_vector(d.buyers, d.p_buyer, rng)
                                    : bernoulli_vector(d.sellers, d.p_seller, rng);
        }
        AssignmentVector operator()(const CustomDesign& d) const {
            return s == Side::buyer ? checked_custom(d.buyer_sampler, d.buyers, rng)
                                    : checked_custom(d.seller_sampler, d.sellers, rng);
        }
    };
    return std::visit(Sampler{s, rng}, kind_);
}

AssignmentPair sample_design(const Design& design, std::uint64_t seed) {
    // Independent streams per side keep the two marginals independent of
    // each other's number of draws.
    Rng buyer_rng(seed, 0);
    Rng seller_rng(seed, 1);
    int cap = 1;
    if (const auto* b = std::get_if<BernoulliDesign>(&design.kind())) cap = b->max_redraws;

    auto draw = [&](Side s, Rng& rng) {
        for (int attempt = 0; attempt < cap; ++attempt) {
            AssignmentVector v = design.sample_side(s, rng);
            if (!std::holds_alternative<BernoulliDesign>(design.kind())) return v;
            if (v.treated_count() > 0 && v.control_count() > 0) return v;
        }
        throw ParameterError("bernoulli design produced a degenerate " + to_string(s) + " side " +
                             std::to_string(cap) + " times in a row");
    };
    AssignmentPair pair{draw(Side::buyer, buyer_rng), draw(Side::seller, seller_rng)};
    return pair;
}

Matrix outer_matrix(const AssignmentPair& pair) {
    Matrix w(pair.rows(), pair.cols());
    for (std::size_t i = 0; i < pair.rows(); ++i) {
        if (!pair.buyer[i]) continue;
        for (std::size_t j = 0; j < pair.cols(); ++j) w(i, j) = pair.seller[j];
    }
    return w;
}

OutcomeMatrix realize_outcomes(const PotentialOutcomeSchedule& schedule, const AssignmentPair& pair) {
    if (schedule.rows() != pair.rows() || schedule.cols() != pair.cols())
        throw ShapeError("schedule is " + std::to_string(schedule.rows()) + "x" + std::to_string(schedule.cols()) +
                         " but assignment is " + std::to_string(pair.rows()) + "x" + std::to_string(pair.cols()));
    const std::size_t cols = pair.cols();
    std::vector<double> out(pair.rows() * cols);
    for (std::size_t i = 0; i < pair.rows(); ++i) {
        const bool b = pair.buyer[i] != 0;
        const Matrix& control_seller = schedule.exposure(b, false);
        const Matrix& treated_seller = schedule.exposure(b, true);
        for (std::size_t j = 0; j < cols; ++j)
            out[i * cols + j] = pair.seller[j] ? treated_seller(i, j) : control_seller(i, j);
    }
    return OutcomeMatrix(Matrix(pair.rows(), cols, std::move(out)));
}

}  // namespace twosided
