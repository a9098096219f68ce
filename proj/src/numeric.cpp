#include "twosided/numeric.hpp"

#include <boost/math/distributions/normal.hpp>

#include "twosided/error.hpp"

namespace twosided {

double normal_upper_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), p));
}

}  // namespace twosided
