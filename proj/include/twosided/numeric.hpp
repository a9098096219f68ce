#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace twosided {

// Neumaier compensated summation. Order of add() calls is the accumulation
// order; callers iterate in ascending index order so results are bit-stable.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

/// Upper quantile of the standard normal: z such that P(Z > z) = p.
double normal_upper_quantile(double p);

}  // namespace twosided
