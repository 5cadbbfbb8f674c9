#pragma once

#include <optional>
#include <span>

namespace dbf {

// Fit statistics between an observed and a predicted series.
//   mse, mae  use divisor n (losses, not variance estimates)
//   r2        coefficient of determination, 1 - SSres/SStot (may be negative)
//   r         Pearson correlation; undefined when either series is constant
struct FitMetrics {
    std::optional<double> r2;
    std::optional<double> r;
    double mse = 0.0;
    double mae = 0.0;
    int n = 0;
};

FitMetrics compute_metrics(std::span<const double> observed,
                           std::span<const double> predicted);

} // namespace dbf
