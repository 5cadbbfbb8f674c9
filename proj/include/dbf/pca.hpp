#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dbf/data.hpp"

namespace dbf {

// Dense symmetric matrix, row-major storage.
struct SymMatrix {
    int dim = 0;
    std::vector<double> entries; // dim * dim

    explicit SymMatrix(int p = 0) : dim(p), entries(static_cast<std::size_t>(p) * p, 0.0) {}

    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

struct EigenDecomposition {
    std::vector<double> values;                 // descending
    std::vector<std::vector<double>> vectors;   // vectors[j][k]: coefficient of
                                                // variable j in eigenvector k
};

struct PcaModel {
    GroupId groupId = GroupId::Communicable;
    std::vector<double> eigenvalues;            // descending, clamped at 0
    std::vector<std::vector<double>> loadings;  // p x p, column k = eigenvector k
    int retained = 1;
    std::vector<double> explainedFraction;
    std::vector<double> cumulativeFraction;
};

// One component index over time (CPC1, CPC2, NPC, IPC1, IPC2 or a user label).
struct ScoreSeries {
    std::string indexId;
    std::vector<int> years;
    std::vector<double> scores;
};

struct RetentionRule {
    enum class Kind { Kaiser, CumVar, Fixed };
    Kind kind = Kind::Kaiser;
    double fraction = 0.8; // CumVar
    int count = 1;         // Fixed

    static RetentionRule kaiser() { return {}; }
    static RetentionRule cumvar(double f) { return {Kind::CumVar, f, 1}; }
    static RetentionRule fixed(int k) { return {Kind::Fixed, 0.8, k}; }
};

// R[i][j] = (1/(n-1)) sum_r z[r][i] z[r][j]; unit diagonal up to rounding.
SymMatrix correlation_matrix(const StandardizedMatrix& z);

// Cyclic Jacobi rotations; converged when every off-diagonal magnitude is
// below 1e-12, sweep budget 100. Eigenvalues sorted descending, eigenvectors
// orthonormal and sign-oriented.
EigenDecomposition eigen_decompose(const SymMatrix& m);

// Make the entry of largest magnitude positive; ties break to the lowest index.
void orient_sign(std::vector<double>& v);

// fraction[k] = eigenvalue[k] / p, plus the running cumulative sum.
std::pair<std::vector<double>, std::vector<double>>
explained_variance(const std::vector<double>& eigenvalues, int p);

int retain_components(const std::vector<double>& eigenvalues, const RetentionRule& rule);

// Full correlation-matrix PCA for one standardized group.
PcaModel fit_pca(const StandardizedMatrix& z, GroupId group,
                 const RetentionRule& rule = RetentionRule::kaiser());

// Project rows onto the retained loading columns; one series per component.
std::vector<ScoreSeries> component_scores(const StandardizedMatrix& z, const PcaModel& model,
                                          const std::vector<int>& years);

// (1-based component number, eigenvalue) pairs for plotting.
std::vector<std::pair<int, double>> scree_data(const PcaModel& model);

// Index label for component k of a group: CPC1/CPC2..., NPC/NPC2..., IPC1/IPC2...
std::string component_label(GroupId group, int k);

} // namespace dbf
