#include "dbf/metrics.hpp"

#include <cmath>
#include <string>

#include "dbf/errors.hpp"

namespace dbf {

FitMetrics compute_metrics(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size())
        throw Error(Errc::LengthMismatch, "observed has " + std::to_string(observed.size()) +
                                              " points, predicted has " +
                                              std::to_string(predicted.size()));
    const std::size_t n = observed.size();
    if (n < 2) throw Error(Errc::TooFewPoints, "need at least 2 points");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(observed[i]) || !std::isfinite(predicted[i]))
            throw Error(Errc::DomainError, "non-finite value at point " + std::to_string(i));

    FitMetrics m;
    m.n = static_cast<int>(n);

    double meanObs = 0.0;
    double meanPred = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        meanObs += observed[i];
        meanPred += predicted[i];
    }
    meanObs /= static_cast<double>(n);
    meanPred /= static_cast<double>(n);

    double ssRes = 0.0;
    double absSum = 0.0;
    double ssObs = 0.0;
    double ssPred = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = observed[i] - predicted[i];
        ssRes += e * e;
        absSum += std::abs(e);
        const double dObs = observed[i] - meanObs;
        const double dPred = predicted[i] - meanPred;
        ssObs += dObs * dObs;
        ssPred += dPred * dPred;
        cross += dObs * dPred;
    }

    m.mse = ssRes / static_cast<double>(n);
    m.mae = absSum / static_cast<double>(n);
    if (ssObs > 0.0) m.r2 = 1.0 - ssRes / ssObs;
    if (ssObs > 0.0 && ssPred > 0.0) m.r = cross / (std::sqrt(ssObs) * std::sqrt(ssPred));
    return m;
}

} // namespace dbf
