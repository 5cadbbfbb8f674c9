#include "dbf/sr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dbf/errors.hpp"

namespace dbf {

void SrConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(crossoverProb) || !prob(mutationProb))
        throw Error(Errc::InvalidConfig, "probabilities must lie in [0, 1]");
    if (populationSize < 2) throw Error(Errc::InvalidConfig, "populationSize must be >= 2");
    if (generations < 1) throw Error(Errc::InvalidConfig, "generations must be >= 1");
    if (tournamentSize < 1) throw Error(Errc::InvalidConfig, "tournamentSize must be >= 1");
    if (initDepthMin < 1 || initDepthMax < initDepthMin || maxDepth < initDepthMax)
        throw Error(Errc::InvalidConfig, "depth bounds must satisfy 1 <= min <= max <= maxDepth");
    if (!(constantMin < constantMax))
        throw Error(Errc::InvalidConfig, "constant range must be nonempty");
    if (subtreeMutWeight < 0 || pointMutWeight < 0 || jitterMutWeight < 0 ||
        subtreeMutWeight + pointMutWeight + jitterMutWeight <= 0)
        throw Error(Errc::InvalidConfig, "mutation weights must be nonnegative, not all zero");
    if (constantTuneEvery < 1) throw Error(Errc::InvalidConfig, "constantTuneEvery must be >= 1");
}

TrainingSet TrainingSet::create(std::vector<double> t, std::vector<double> y) {
    if (t.size() != y.size())
        throw Error(Errc::LengthMismatch, "t and y lengths differ");
    if (t.size() < 3) throw Error(Errc::TooFewPoints, "training set needs at least 3 points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(y[i]))
            throw Error(Errc::InvalidConfig, "training point " + std::to_string(i) +
                                                 " is not finite");
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j])
                throw Error(Errc::InvalidConfig, "duplicate time value " + std::to_string(t[i]));
    }
    TrainingSet s;
    s.t = std::move(t);
    s.y = std::move(y);
    return s;
}

bool ParetoFront::insert(ParetoEntry entry) {
    for (const auto& e : entries_)
        if (e.mse <= entry.mse && e.complexity <= entry.complexity) return false;
    std::erase_if(entries_, [&](const ParetoEntry& e) {
        return entry.mse <= e.mse && entry.complexity <= e.complexity;
    });
    auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.complexity,
                               [](const ParetoEntry& e, int cx) { return e.complexity < cx; });
    entries_.insert(it, std::move(entry));
    return true;
}

std::optional<double> evaluate_fitness(const Expr& e, const TrainingSet& data) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const EvalResult r = evaluate(e, data.t[i]);
        if (!r.ok()) return std::nullopt;
        const double d = data.y[i] - r.value;
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(data.size());
    if (!std::isfinite(mse)) return std::nullopt;
    return mse;
}

namespace {

NodePtr random_node(const SrConfig& cfg, Rng& rng, int depthBudget, bool full) {
    const auto& ops = cfg.operators;
    const int nFunc =
        static_cast<int>(ops.binary.size() + ops.unary.size()) + (ops.powInt ? 1 : 0);
    const bool mustTerminal = depthBudget <= 1 || nFunc == 0;

    int pick;
    if (mustTerminal) {
        pick = rng.uniform_int(0, 1);
    } else if (full) {
        pick = 2 + rng.uniform_int(0, nFunc - 1);
    } else {
        pick = rng.uniform_int(0, 1 + nFunc);
    }

    if (pick == 0) return make_const(rng.uniform(cfg.constantMin, cfg.constantMax));
    if (pick == 1) return make_time();

    int f = pick - 2;
    if (f < static_cast<int>(ops.binary.size())) {
        NodePtr l = random_node(cfg, rng, depthBudget - 1, full);
        NodePtr r = random_node(cfg, rng, depthBudget - 1, full);
        return make_binary(ops.binary[f], std::move(l), std::move(r));
    }
    f -= static_cast<int>(ops.binary.size());
    if (f < static_cast<int>(ops.unary.size()))
        return make_unary(ops.unary[f], random_node(cfg, rng, depthBudget - 1, full));
    return make_pow(random_node(cfg, rng, depthBudget - 1, full),
                    rng.uniform_int(kPowExponentMin, kPowExponentMax));
}

void collect_const_indices(const NodePtr& node, int& index, std::vector<int>& out) {
    if (!node) return;
    if (node->kind == ExprNode::Kind::Const) out.push_back(index);
    ++index;
    collect_const_indices(node->a, index, out);
    collect_const_indices(node->b, index, out);
}

// 1-based depth of the preorder node `index`
bool depth_at(const NodePtr& node, int& index, int depth, int& out) {
    if (!node) return false;
    if (index == 0) {
        out = depth;
        return true;
    }
    --index;
    if (depth_at(node->a, index, depth + 1, out)) return true;
    return depth_at(node->b, index, depth + 1, out);
}

std::vector<int> const_indices(const Expr& e) {
    std::vector<int> out;
    int index = 0;
    collect_const_indices(e.root(), index, out);
    return out;
}

int tournament(const std::vector<double>& fitness, const SrConfig& cfg, Rng& rng) {
    int best = rng.uniform_int(0, cfg.populationSize - 1);
    for (int i = 1; i < cfg.tournamentSize; ++i) {
        const int challenger = rng.uniform_int(0, cfg.populationSize - 1);
        if (fitness[challenger] < fitness[best]) best = challenger;
    }
    return best;
}

} // namespace

Expr random_tree(const SrConfig& cfg, Rng& rng, int depthBudget, bool full) {
    return Expr(random_node(cfg, rng, depthBudget, full));
}

std::vector<Expr> init_population(const SrConfig& cfg, Rng& rng) {
    cfg.validate();
    const int nDepths = cfg.initDepthMax - cfg.initDepthMin + 1;
    std::vector<Expr> population;
    population.reserve(cfg.populationSize);
    for (int i = 0; i < cfg.populationSize; ++i) {
        const int depth = cfg.initDepthMin + i % nDepths;
        const bool full = (i / nDepths) % 2 == 0;
        population.push_back(random_tree(cfg, rng, depth, full));
    }
    return population;
}

std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, const SrConfig& cfg, Rng& rng) {
    const int ia = rng.uniform_int(0, a.size() - 1);
    const int ib = rng.uniform_int(0, b.size() - 1);
    const NodePtr subA = nth_node(a.root(), ia);
    const NodePtr subB = nth_node(b.root(), ib);

    Expr childA(replace_nth(a.root(), ia, subB));
    Expr childB(replace_nth(b.root(), ib, subA));
    if (childA.depth() > cfg.maxDepth) childA = a;
    if (childB.depth() > cfg.maxDepth) childB = b;
    return {std::move(childA), std::move(childB)};
}

Expr mutate(const Expr& e, const SrConfig& cfg, Rng& rng) {
    const double total = cfg.subtreeMutWeight + cfg.pointMutWeight + cfg.jitterMutWeight;
    const double u = rng.uniform01() * total;

    if (u < cfg.subtreeMutWeight) {
        // subtree replacement; the fresh subtree is grown no deeper than the
        // room left below the chosen point, so mutation stays effective on
        // trees already at the depth bound
        const int idx = rng.uniform_int(0, e.size() - 1);
        int pointDepth = 1;
        int i = idx;
        depth_at(e.root(), i, 1, pointDepth);
        const int room = std::max(1, cfg.maxDepth - pointDepth + 1);
        const int depth = std::min(room, rng.uniform_int(1, cfg.initDepthMax));
        Expr child(replace_nth(e.root(), idx, random_node(cfg, rng, depth, false)));
        if (child.depth() > cfg.maxDepth) return e;
        return child;
    }

    if (u < cfg.subtreeMutWeight + cfg.pointMutWeight) {
        // point mutation: swap the operator, keep the children
        const int idx = rng.uniform_int(0, e.size() - 1);
        const NodePtr node = nth_node(e.root(), idx);
        NodePtr replacement;
        switch (node->kind) {
            case ExprNode::Kind::Binary: {
                std::vector<BinaryOp> others;
                for (BinaryOp op : cfg.operators.binary)
                    if (op != node->bop) others.push_back(op);
                if (others.empty()) return e;
                replacement = make_binary(others[rng.uniform_int(0, (int)others.size() - 1)],
                                          node->a, node->b);
                break;
            }
            case ExprNode::Kind::Unary: {
                std::vector<UnaryOp> others;
                for (UnaryOp op : cfg.operators.unary)
                    if (op != node->uop) others.push_back(op);
                if (others.empty()) return e;
                replacement = make_unary(others[rng.uniform_int(0, (int)others.size() - 1)],
                                         node->a);
                break;
            }
            case ExprNode::Kind::Pow: {
                int exponent = rng.uniform_int(kPowExponentMin, kPowExponentMax - 1);
                if (exponent >= node->exponent) ++exponent;
                replacement = make_pow(node->a, exponent);
                break;
            }
            case ExprNode::Kind::Const:
            case ExprNode::Kind::Time:
                replacement = make_const(rng.uniform(cfg.constantMin, cfg.constantMax));
                break;
        }
        return Expr(replace_nth(e.root(), idx, std::move(replacement)));
    }

    // constant jitter: c -> c*(1 + 0.1 g) + 0.01 g, g standard normal
    const auto idxs = const_indices(e);
    if (idxs.empty()) return e;
    const int idx = idxs[rng.uniform_int(0, (int)idxs.size() - 1)];
    const double c = nth_node(e.root(), idx)->value;
    const double g = rng.gauss();
    const double jittered = c * (1.0 + 0.1 * g) + 0.01 * g;
    if (!std::isfinite(jittered)) return e;
    return Expr(replace_nth(e.root(), idx, make_const(jittered)));
}

Expr optimize_constants(const Expr& e, const TrainingSet& data, int budgetPerConstant) {
    const auto idxs = const_indices(e);
    if (idxs.empty() || budgetPerConstant <= 0) return e;

    const auto baseMse = evaluate_fitness(e, data);
    if (!baseMse) return e;

    Expr current = e;
    double bestMse = *baseMse;
    long budget = static_cast<long>(budgetPerConstant) * static_cast<long>(idxs.size());

    auto value_at = [&](int idx) { return nth_node(current.root(), idx)->value; };
    auto with_values = [&](const std::vector<double>& values) {
        NodePtr root = current.root();
        for (std::size_t k = 0; k < idxs.size(); ++k)
            root = replace_nth(root, idxs[k], make_const(values[k]));
        return Expr(std::move(root));
    };

    auto probe = [&](int idx, double value) -> bool {
        if (!std::isfinite(value)) return false;
        Expr cand(replace_nth(current.root(), idx, make_const(value)));
        const auto mse = evaluate_fitness(cand, data);
        if (mse && *mse < bestMse) {
            current = std::move(cand);
            bestMse = *mse;
            return true;
        }
        return false;
    };

    bool improvedInCycle = true;
    while (improvedInCycle && budget > 0) {
        improvedInCycle = false;
        std::vector<double> cycleStart(idxs.size());
        for (std::size_t k = 0; k < idxs.size(); ++k) cycleStart[k] = value_at(idxs[k]);

        for (int idx : idxs) {
            double c = value_at(idx);
            double step = 0.1 * std::abs(c) + 0.1;
            long coordBudget = std::min<long>(budgetPerConstant, budget);
            int failures = 0;
            while (coordBudget > 0 && failures < 16 &&
                   step > 1e-14 * (1.0 + std::abs(c))) {
                --coordBudget;
                --budget;
                if (probe(idx, c + step)) {
                    c += step;
                    step *= 2.0;
                    failures = 0;
                    improvedInCycle = true;
                    continue;
                }
                if (coordBudget <= 0) break;
                --coordBudget;
                --budget;
                if (probe(idx, c - step)) {
                    c -= step;
                    step *= 2.0;
                    failures = 0;
                    improvedInCycle = true;
                    continue;
                }
                step *= 0.5;
                ++failures;
            }
        }

        // pattern move along the net cycle direction; coordinate steps alone
        // zigzag badly when the constants are strongly correlated
        if (improvedInCycle && budget > 0) {
            std::vector<double> base(idxs.size());
            std::vector<double> delta(idxs.size());
            bool moved = false;
            for (std::size_t k = 0; k < idxs.size(); ++k) {
                base[k] = value_at(idxs[k]);
                delta[k] = base[k] - cycleStart[k];
                if (delta[k] != 0.0) moved = true;
            }
            while (moved && budget > 0) {
                std::vector<double> trial(idxs.size());
                bool finite = true;
                for (std::size_t k = 0; k < idxs.size(); ++k) {
                    trial[k] = base[k] + delta[k];
                    finite = finite && std::isfinite(trial[k]);
                }
                if (!finite) break;
                --budget;
                Expr cand = with_values(trial);
                const auto mse = evaluate_fitness(cand, data);
                if (!mse || *mse >= bestMse) break;
                current = std::move(cand);
                bestMse = *mse;
                base = trial;
                for (auto& d : delta) d *= 2.0;
            }
        }
    }
    return current;
}

namespace {

// Candidates enter the archive in simplified form; simplification preserves
// the value at every training point, the mse is recomputed regardless.
// A least-squares affine wrap a + b*f is offered as a second candidate: a
// shape that matches the target up to an affine map earns its slot at once
// instead of waiting for lucky constants, and the tuner refines it from there.
void archive_insert(ParetoFront& front, const Expr& expr, double mse, const TrainingSet& data) {
    Expr reduced = simplify(expr);
    if (!(reduced == expr)) {
        const auto again = evaluate_fitness(reduced, data);
        if (again) {
            mse = *again;
        } else {
            reduced = expr;
        }
    }
    const int cx = complexity(reduced);
    front.insert(ParetoEntry{reduced, mse, cx});

    const std::size_t n = data.size();
    double meanF = 0.0;
    double meanY = 0.0;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const EvalResult r = evaluate(reduced, data.t[i]);
        if (!r.ok()) return;
        f[i] = r.value;
        meanF += r.value;
        meanY += data.y[i];
    }
    meanF /= static_cast<double>(n);
    meanY /= static_cast<double>(n);
    double varF = 0.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        varF += (f[i] - meanF) * (f[i] - meanF);
        cov += (f[i] - meanF) * (data.y[i] - meanY);
    }
    if (varF <= 0.0) return;
    const double b = cov / varF;
    const double a = meanY - b * meanF;
    if (!std::isfinite(a) || !std::isfinite(b)) return;

    double scaled = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = data.y[i] - (a + b * f[i]);
        scaled += d * d;
    }
    scaled /= static_cast<double>(n);
    if (!(scaled < 0.99 * mse)) return; // only a real improvement earns the +4 nodes

    Expr wrapped = simplify(Expr(make_binary(
        BinaryOp::Add, make_const(a), make_binary(BinaryOp::Mul, make_const(b), reduced.root()))));
    const auto wrappedMse = evaluate_fitness(wrapped, data);
    if (!wrappedMse) return;
    const int wrappedCx = complexity(wrapped);
    front.insert(ParetoEntry{std::move(wrapped), *wrappedMse, wrappedCx});
}

void tune_archive(ParetoFront& front, const TrainingSet& data, int budgetPerConstant) {
    const std::vector<ParetoEntry> entries = front.entries();
    ParetoFront rebuilt;
    for (const auto& entry : entries) {
        Expr tuned = optimize_constants(entry.expr, data, budgetPerConstant);
        const auto mse = evaluate_fitness(tuned, data);
        if (mse)
            archive_insert(rebuilt, tuned, *mse, data);
        else
            rebuilt.insert(entry);
    }
    front = rebuilt;
}

} // namespace

ParetoFront run_search(const TrainingSet& data, const SrConfig& cfg) {
    cfg.validate();
    const Rng base(cfg.seed);
    constexpr double kRejected = std::numeric_limits<double>::infinity();

    Rng initRng = base.split(0);
    std::vector<Expr> population = init_population(cfg, initRng);

    std::vector<double> fitness(cfg.populationSize, kRejected);
    ParetoFront front;

    auto evaluate_population = [&](const std::vector<Expr>& pop) {
        for (int i = 0; i < cfg.populationSize; ++i) {
            const auto mse = evaluate_fitness(pop[i], data);
            fitness[i] = mse ? *mse : kRejected;
        }
    };
    auto update_archive = [&](const std::vector<Expr>& pop) {
        for (int i = 0; i < cfg.populationSize; ++i)
            if (fitness[i] != kRejected) archive_insert(front, pop[i], fitness[i], data);
    };
    // Elitist feedback: the lowest-mse archive entries replace the worst
    // individuals, so tuned constants become heritable material.
    auto reinject_archive = [&](std::vector<Expr>& pop) {
        const auto& entries = front.entries();
        const int k = std::min(static_cast<int>(entries.size()),
                               std::max(1, cfg.populationSize / 10));
        if (k <= 0) return;
        std::vector<int> order(cfg.populationSize);
        for (int i = 0; i < cfg.populationSize; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int x, int y) { return fitness[x] > fitness[y]; });
        for (int j = 0; j < k; ++j) {
            const auto& entry = entries[entries.size() - 1 - j];
            pop[order[j]] = entry.expr;
            fitness[order[j]] = entry.mse;
        }
    };

    evaluate_population(population);
    update_archive(population);
    reinject_archive(population);

    bool tunedLast = false;
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // variation phase: all randomness lives here, one child stream per
        // offspring slot so the draw sequence is independent of evaluation
        const std::uint64_t streamBase =
            1 + static_cast<std::uint64_t>(gen - 1) * static_cast<std::uint64_t>(cfg.populationSize);
        std::vector<Expr> next;
        next.reserve(cfg.populationSize);
        while (static_cast<int>(next.size()) < cfg.populationSize) {
            Rng slot = base.split(streamBase + next.size());
            const bool pairLeft = cfg.populationSize - static_cast<int>(next.size()) >= 2;
            if (slot.uniform01() < cfg.crossoverProb && pairLeft) {
                const int ia = tournament(fitness, cfg, slot);
                const int ib = tournament(fitness, cfg, slot);
                auto [c1, c2] = crossover(population[ia], population[ib], cfg, slot);
                if (slot.uniform01() < cfg.mutationProb) c1 = mutate(c1, cfg, slot);
                if (slot.uniform01() < cfg.mutationProb) c2 = mutate(c2, cfg, slot);
                next.push_back(std::move(c1));
                next.push_back(std::move(c2));
            } else {
                const int ia = tournament(fitness, cfg, slot);
                Expr child = population[ia];
                if (slot.uniform01() < cfg.mutationProb) child = mutate(child, cfg, slot);
                next.push_back(std::move(child));
            }
        }

        population = std::move(next);
        evaluate_population(population);
        update_archive(population);

        tunedLast = gen % cfg.constantTuneEvery == 0;
        if (tunedLast && !front.empty()) tune_archive(front, data, cfg.constantTuneBudget);
        if (!front.empty()) reinject_archive(population);
    }
    if (!tunedLast && !front.empty()) tune_archive(front, data, cfg.constantTuneBudget);

    if (front.empty())
        throw Error(Errc::EmptyFront, "every candidate was rejected on the training data");
    return front;
}

FitReport select_model(const ParetoFront& front, const TrainingSet& data,
                       const SelectionCriterion& criterion) {
    if (front.empty()) throw Error(Errc::EmptyFront, "cannot select from an empty front");

    const std::size_t n = data.size();
    double mean = 0.0;
    for (double v : data.y) mean += v;
    mean /= static_cast<double>(n);
    double varP = 0.0;
    for (double v : data.y) varP += (v - mean) * (v - mean);
    varP /= static_cast<double>(n);

    const auto& entries = front.entries();
    const ParetoEntry* winner = nullptr;
    if (varP > 0.0) {
        for (const auto& e : entries) {
            const double r2 = 1.0 - e.mse / varP;
            if (r2 >= criterion.r2Threshold) {
                winner = &e;
                break; // entries are sorted by ascending complexity
            }
        }
    }
    if (!winner) winner = &entries.back(); // lowest mse, i.e. highest r2

    std::vector<double> predicted;
    predicted.reserve(n);
    for (double t : data.t) predicted.push_back(evaluate(winner->expr, t).value);

    FitReport report;
    report.expr = winner->expr;
    report.metrics = compute_metrics(data.y, predicted);
    report.complexity = winner->complexity;
    return report;
}

} // namespace dbf
