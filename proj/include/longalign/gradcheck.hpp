#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "longalign/core.hpp"

namespace longalign {

// Compares an analytic gradient against central finite differences
// (step 1e-4 on [0,1]-scaled parameters) and returns the maximum relative
// deviation over coordinates. The denominator is floored so coordinates
// where both gradients vanish contribute zero.
inline double check_gradients(const std::function<double(const std::vector<double>&)>& objective,
                              const std::function<std::vector<double>(const std::vector<double>&)>&
                                  analytic_gradient,
                              const std::vector<double>& point, double step = 1e-4) {
    const std::vector<double> analytic = analytic_gradient(point);
    if (analytic.size() != point.size())
        throw dimension_error("check_gradients: gradient size != point size");
    double worst = 0.0;
    std::vector<double> x = point;
    for (std::size_t i = 0; i < point.size(); ++i) {
        x[i] = point[i] + step;
        const double fp = objective(x);
        x[i] = point[i] - step;
        const double fm = objective(x);
        x[i] = point[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw divergence_error("check_gradients: objective non-finite at perturbation");
        const double fd = (fp - fm) / (2.0 * step);
        const double denom = std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
        worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
    }
    return worst;
}

} // namespace longalign
