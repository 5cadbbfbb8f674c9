#include "dbf/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

constexpr double kOffDiagTol = 1e-12;
constexpr int kSweepBudget = 100;
constexpr double kEigenClampTol = 1e-9;

} // namespace

SymMatrix correlation_matrix(const StandardizedMatrix& z) {
    const std::size_t n = z.rows();
    const std::size_t p = z.cols();
    if (n < 3) throw Error(Errc::TooFewRows, "need at least 3 rows for a correlation matrix");

    SymMatrix r(static_cast<int>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t row = 0; row < n; ++row) s += z.z[row][i] * z.z[row][j];
            s /= static_cast<double>(n - 1);
            r.at(static_cast<int>(i), static_cast<int>(j)) = s;
            r.at(static_cast<int>(j), static_cast<int>(i)) = s;
        }
    }
    return r;
}

void orient_sign(std::vector<double>& v) {
    std::size_t best = 0;
    double bestAbs = -1.0;
    bool nonzero = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > 0.0) nonzero = true;
        if (a > bestAbs) {
            bestAbs = a;
            best = i;
        }
    }
    if (!nonzero) throw Error(Errc::ZeroVector, "cannot orient a zero vector");
    if (v[best] < 0.0)
        for (auto& x : v) x = -x;
}

EigenDecomposition eigen_decompose(const SymMatrix& m) {
    const int p = m.dim;
    for (double e : m.entries)
        if (!std::isfinite(e)) throw Error(Errc::DomainError, "matrix entry is not finite");
    std::vector<std::vector<double>> a(p, std::vector<double>(p));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a[i][j] = m.at(i, j);

    // V starts as identity and accumulates the rotations.
    std::vector<std::vector<double>> v(p, std::vector<double>(p, 0.0));
    for (int i = 0; i < p; ++i) v[i][i] = 1.0;

    auto max_off_diag = [&]() {
        double mx = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) mx = std::max(mx, std::abs(a[i][j]));
        return mx;
    };

    int sweep = 0;
    while (max_off_diag() >= kOffDiagTol) {
        if (++sweep > kSweepBudget)
            throw Error(Errc::NoConvergence,
                        "Jacobi sweep budget exhausted at " + std::to_string(kSweepBudget));
        for (int q = 0; q < p - 1; ++q) {
            for (int r = q + 1; r < p; ++r) {
                if (std::abs(a[q][r]) < kOffDiagTol) continue;

                const double theta = (a[r][r] - a[q][q]) / (2.0 * a[q][r]);
                double tval = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) tval = -tval;
                const double c = 1.0 / std::sqrt(tval * tval + 1.0);
                const double s = tval * c;

                for (int k = 0; k < p; ++k) {
                    const double akq = a[k][q];
                    const double akr = a[k][r];
                    a[k][q] = c * akq - s * akr;
                    a[k][r] = s * akq + c * akr;
                }
                for (int k = 0; k < p; ++k) {
                    const double aqk = a[q][k];
                    const double ark = a[r][k];
                    a[q][k] = c * aqk - s * ark;
                    a[r][k] = s * aqk + c * ark;
                }
                for (int k = 0; k < p; ++k) {
                    const double vkq = v[k][q];
                    const double vkr = v[k][r];
                    v[k][q] = c * vkq - s * vkr;
                    v[k][r] = s * vkq + c * vkr;
                }
            }
        }
    }

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a[x][x] > a[y][y]; });

    EigenDecomposition out;
    out.values.resize(p);
    out.vectors.assign(p, std::vector<double>(p, 0.0));
    for (int k = 0; k < p; ++k) {
        out.values[k] = a[order[k]][order[k]];
        std::vector<double> col(p);
        for (int j = 0; j < p; ++j) col[j] = v[j][order[k]];
        orient_sign(col);
        for (int j = 0; j < p; ++j) out.vectors[j][k] = col[j];
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>>
explained_variance(const std::vector<double>& eigenvalues, int p) {
    std::vector<double> fractions;
    std::vector<double> cumulative;
    fractions.reserve(eigenvalues.size());
    cumulative.reserve(eigenvalues.size());
    double running = 0.0;
    for (double lambda : eigenvalues) {
        const double f = lambda / static_cast<double>(p);
        running += f;
        fractions.push_back(f);
        cumulative.push_back(running);
    }
    return {fractions, cumulative};
}

int retain_components(const std::vector<double>& eigenvalues, const RetentionRule& rule) {
    const int p = static_cast<int>(eigenvalues.size());
    switch (rule.kind) {
        case RetentionRule::Kind::Kaiser: {
            int k = 0;
            for (double lambda : eigenvalues)
                if (lambda > 1.0) ++k;
            return std::max(k, 1);
        }
        case RetentionRule::Kind::CumVar: {
            const auto [fractions, cumulative] = explained_variance(eigenvalues, p);
            for (int k = 0; k < p; ++k)
                if (cumulative[k] >= rule.fraction) return k + 1;
            return p;
        }
        case RetentionRule::Kind::Fixed:
            return std::clamp(rule.count, 1, p);
    }
    return 1;
}

PcaModel fit_pca(const StandardizedMatrix& z, GroupId group, const RetentionRule& rule) {
    const SymMatrix corr = correlation_matrix(z);
    EigenDecomposition eig = eigen_decompose(corr);

    const int p = corr.dim;
    for (auto& lambda : eig.values) {
        if (lambda < 0.0) {
            if (lambda < -kEigenClampTol)
                throw Error(Errc::NoConvergence,
                            "correlation matrix produced eigenvalue " + std::to_string(lambda));
            lambda = 0.0;
        }
    }

    PcaModel model;
    model.groupId = group;
    model.eigenvalues = eig.values;
    model.loadings = eig.vectors;
    model.retained = retain_components(eig.values, rule);
    std::tie(model.explainedFraction, model.cumulativeFraction) =
        explained_variance(eig.values, p);
    return model;
}

std::string component_label(GroupId group, int k) {
    const char* prefix = "PC";
    switch (group) {
        case GroupId::Communicable: prefix = "CPC"; break;
        case GroupId::Noncommunicable: prefix = "NPC"; break;
        case GroupId::Injury: prefix = "IPC"; break;
    }
    if (group == GroupId::Noncommunicable && k == 0) return "NPC";
    return std::string(prefix) + std::to_string(k + 1);
}

std::vector<ScoreSeries> component_scores(const StandardizedMatrix& z, const PcaModel& model,
                                          const std::vector<int>& years) {
    const std::size_t p = model.loadings.size();
    if (z.cols() != p)
        throw Error(Errc::DimensionMismatch,
                    "z has " + std::to_string(z.cols()) + " columns, loadings have " +
                        std::to_string(p) + " rows");
    if (!years.empty() && years.size() != z.rows())
        throw Error(Errc::DimensionMismatch, "years do not match standardized rows");

    std::vector<ScoreSeries> series;
    for (int k = 0; k < model.retained; ++k) {
        ScoreSeries s;
        s.indexId = component_label(model.groupId, k);
        s.years = years;
        s.scores.reserve(z.rows());
        for (std::size_t row = 0; row < z.rows(); ++row) {
            double score = 0.0;
            for (std::size_t j = 0; j < p; ++j) score += z.z[row][j] * model.loadings[j][k];
            s.scores.push_back(score);
        }
        series.push_back(std::move(s));
    }
    return series;
}

std::vector<std::pair<int, double>> scree_data(const PcaModel& model) {
    std::vector<std::pair<int, double>> pairs;
    pairs.reserve(model.eigenvalues.size());
    for (std::size_t k = 0; k < model.eigenvalues.size(); ++k)
        pairs.emplace_back(static_cast<int>(k) + 1, model.eigenvalues[k]);
    return pairs;
}

} // namespace dbf
