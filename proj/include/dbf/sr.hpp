#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbf/expr.hpp"
#include "dbf/metrics.hpp"
#include "dbf/rng.hpp"

namespace dbf {

struct OperatorSet {
    std::vector<BinaryOp> binary{BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div};
    std::vector<UnaryOp> unary{UnaryOp::Cos, UnaryOp::Sin, UnaryOp::Log, UnaryOp::Exp};
    bool powInt = true;
};

struct SrConfig {
    std::uint64_t seed = 0;
    int populationSize = 500;
    int generations = 200;
    int tournamentSize = 5;
    double crossoverProb = 0.9;
    double mutationProb = 0.15;
    // kind split, conditional on mutating
    double subtreeMutWeight = 0.5;
    double pointMutWeight = 0.3;
    double jitterMutWeight = 0.2;
    int initDepthMin = 2;
    int initDepthMax = 6;
    int maxDepth = 10;
    double constantMin = -20.0;
    double constantMax = 20.0;
    OperatorSet operators;
    int constantTuneEvery = 10;
    int constantTuneBudget = 100; // evaluations per constant per tuning pass

    void validate() const; // throws InvalidConfig
};

struct TrainingSet {
    std::vector<double> t;
    std::vector<double> y;

    // n >= 3, all finite, t values distinct
    static TrainingSet create(std::vector<double> t, std::vector<double> y);
    std::size_t size() const { return t.size(); }
};

struct ParetoEntry {
    Expr expr;
    double mse = 0.0;
    int complexity = 0;
};

// Error/complexity archive. Entries are mutually nondominated, sorted by
// ascending complexity with strictly decreasing mse along the list.
class ParetoFront {
public:
    // Insert iff no existing entry is at least as good on both axes; removes
    // every entry the candidate weakly dominates. Returns true if inserted.
    bool insert(ParetoEntry entry);

    const std::vector<ParetoEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<ParetoEntry> entries_;
};

struct FitReport {
    Expr expr;
    FitMetrics metrics;
    int complexity = 0;
};

struct SelectionCriterion {
    double r2Threshold = 0.99;
};

// --- engine operations ---

// Ramped half-and-half over [initDepthMin, initDepthMax].
std::vector<Expr> init_population(const SrConfig& cfg, Rng& rng);

Expr random_tree(const SrConfig& cfg, Rng& rng, int depthBudget, bool full);

// Subtree exchange; a child exceeding maxDepth is replaced by its parent.
std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, const SrConfig& cfg, Rng& rng);

// Subtree replacement, point mutation, or constant jitter per the config split.
Expr mutate(const Expr& e, const SrConfig& cfg, Rng& rng);

// MSE over the training set; nullopt = rejected (domain error or non-finite
// value at some training point).
std::optional<double> evaluate_fitness(const Expr& e, const TrainingSet& data);

// Derivative-free coordinate search over the Const values; never increases
// mse. Returns the input unchanged when it has no constants or budget == 0.
Expr optimize_constants(const Expr& e, const TrainingSet& data, int budgetPerConstant);

ParetoFront run_search(const TrainingSet& data, const SrConfig& cfg); // throws EmptyFront

// Minimum complexity among entries with r2 >= threshold; if none qualifies,
// the entry with the highest r2. Full metrics computed for the winner.
FitReport select_model(const ParetoFront& front, const TrainingSet& data,
                       const SelectionCriterion& criterion = {});

} // namespace dbf
