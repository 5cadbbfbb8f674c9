#include "dbf/expr.hpp"

#include <charconv>
#include <cmath>

#include "dbf/errors.hpp"

namespace dbf {

NodePtr make_const(double value) {
    if (!std::isfinite(value)) throw Error(Errc::DomainError, "constant must be finite");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Const;
    n->value = value;
    return n;
}

NodePtr make_time() {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Time;
    return n;
}

NodePtr make_unary(UnaryOp op, NodePtr child) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->uop = op;
    n->a = std::move(child);
    return n;
}

NodePtr make_binary(BinaryOp op, NodePtr left, NodePtr right) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->bop = op;
    n->a = std::move(left);
    n->b = std::move(right);
    return n;
}

NodePtr make_pow(NodePtr base, int exponent) {
    if (exponent < kPowExponentMin || exponent > kPowExponentMax)
        throw Error(Errc::ExponentNotInteger,
                    "power exponent " + std::to_string(exponent) + " outside [" +
                        std::to_string(kPowExponentMin) + ", " + std::to_string(kPowExponentMax) +
                        "]");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->exponent = exponent;
    n->a = std::move(base);
    return n;
}

int node_count(const NodePtr& node) {
    if (!node) return 0;
    return 1 + node_count(node->a) + node_count(node->b);
}

int node_depth(const NodePtr& node) {
    if (!node) return 0;
    return 1 + std::max(node_depth(node->a), node_depth(node->b));
}

int Expr::size() const { return node_count(root_); }
int Expr::depth() const { return node_depth(root_); }

namespace {

bool node_equal(const NodePtr& x, const NodePtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case ExprNode::Kind::Const: return x->value == y->value;
        case ExprNode::Kind::Time: return true;
        case ExprNode::Kind::Unary: return x->uop == y->uop && node_equal(x->a, y->a);
        case ExprNode::Kind::Binary:
            return x->bop == y->bop && node_equal(x->a, y->a) && node_equal(x->b, y->b);
        case ExprNode::Kind::Pow: return x->exponent == y->exponent && node_equal(x->a, y->a);
    }
    return false;
}

struct RawEval {
    double value;
    EvalError error;
};

RawEval eval_node(const ExprNode* n, double t) {
    switch (n->kind) {
        case ExprNode::Kind::Const: return {n->value, EvalError::None};
        case ExprNode::Kind::Time: return {t, EvalError::None};
        case ExprNode::Kind::Unary: {
            const RawEval c = eval_node(n->a.get(), t);
            if (c.error != EvalError::None) return c;
            double v = 0.0;
            switch (n->uop) {
                case UnaryOp::Cos: v = std::cos(c.value); break;
                case UnaryOp::Sin: v = std::sin(c.value); break;
                case UnaryOp::Log:
                    if (c.value <= 0.0) return {0.0, EvalError::LogNonPositive};
                    v = std::log(c.value);
                    break;
                case UnaryOp::Exp: v = std::exp(c.value); break;
            }
            if (!std::isfinite(v)) return {0.0, EvalError::Overflow};
            return {v, EvalError::None};
        }
        case ExprNode::Kind::Binary: {
            const RawEval l = eval_node(n->a.get(), t);
            if (l.error != EvalError::None) return l;
            const RawEval r = eval_node(n->b.get(), t);
            if (r.error != EvalError::None) return r;
            double v = 0.0;
            switch (n->bop) {
                case BinaryOp::Add: v = l.value + r.value; break;
                case BinaryOp::Sub: v = l.value - r.value; break;
                case BinaryOp::Mul: v = l.value * r.value; break;
                case BinaryOp::Div:
                    if (r.value == 0.0) return {0.0, EvalError::DivByZero};
                    v = l.value / r.value;
                    break;
            }
            if (!std::isfinite(v)) return {0.0, EvalError::Overflow};
            return {v, EvalError::None};
        }
        case ExprNode::Kind::Pow: {
            const RawEval c = eval_node(n->a.get(), t);
            if (c.error != EvalError::None) return c;
            double v = 1.0;
            for (int i = 0; i < n->exponent; ++i) v *= c.value;
            if (!std::isfinite(v)) return {0.0, EvalError::Overflow};
            return {v, EvalError::None};
        }
    }
    return {0.0, EvalError::Overflow};
}

} // namespace

bool Expr::operator==(const Expr& other) const { return node_equal(root_, other.root_); }

EvalResult evaluate(const Expr& e, double t) {
    const RawEval r = eval_node(e.root().get(), t);
    return {r.value, r.error};
}

const char* eval_error_name(EvalError err) {
    switch (err) {
        case EvalError::None: return "None";
        case EvalError::DivByZero: return "DivByZero";
        case EvalError::LogNonPositive: return "LogNonPositive";
        case EvalError::Overflow: return "Overflow";
    }
    return "Unknown";
}

namespace {

int node_complexity(const ExprNode* n, const ComplexityWeights& w) {
    switch (n->kind) {
        case ExprNode::Kind::Const: return w.constant;
        case ExprNode::Kind::Time: return w.timeVar;
        case ExprNode::Kind::Unary: return w.unary + node_complexity(n->a.get(), w);
        case ExprNode::Kind::Binary:
            return w.binary + node_complexity(n->a.get(), w) + node_complexity(n->b.get(), w);
        case ExprNode::Kind::Pow: return w.powInt + node_complexity(n->a.get(), w);
    }
    return 0;
}

} // namespace

int complexity(const Expr& e, const ComplexityWeights& w) {
    return node_complexity(e.root().get(), w);
}

bool contains_time(const NodePtr& node) {
    if (!node) return false;
    if (node->kind == ExprNode::Kind::Time) return true;
    return contains_time(node->a) || contains_time(node->b);
}

namespace {

NodePtr simplify_node(const NodePtr& node) {
    if (!node) return node;
    if (node->kind == ExprNode::Kind::Const || node->kind == ExprNode::Kind::Time) return node;

    NodePtr a = simplify_node(node->a);
    NodePtr b = simplify_node(node->b);

    NodePtr current = node;
    if (a != node->a || b != node->b) {
        auto copy = std::make_shared<ExprNode>(*node);
        copy->a = a;
        copy->b = b;
        current = copy;
    }

    // fold subtrees with no time variable; a domain error leaves them as-is
    if (!contains_time(current)) {
        const RawEval r = eval_node(current.get(), 0.0);
        if (r.error == EvalError::None) return make_const(r.value);
        return current;
    }

    auto is_const = [](const NodePtr& n, double v) {
        return n && n->kind == ExprNode::Kind::Const && n->value == v;
    };

    if (current->kind == ExprNode::Kind::Binary) {
        switch (current->bop) {
            case BinaryOp::Add:
                if (is_const(current->a, 0.0)) return current->b;
                if (is_const(current->b, 0.0)) return current->a;
                break;
            case BinaryOp::Mul:
                if (is_const(current->a, 1.0)) return current->b;
                if (is_const(current->b, 1.0)) return current->a;
                if (is_const(current->a, 0.0) || is_const(current->b, 0.0))
                    return make_const(0.0);
                break;
            case BinaryOp::Div:
                if (is_const(current->b, 1.0)) return current->a;
                break;
            case BinaryOp::Sub:
                break;
        }
    }
    return current;
}

} // namespace

Expr simplify(const Expr& e) { return Expr(simplify_node(e.root())); }

namespace {

NodePtr nth_node_impl(const NodePtr& node, int& index) {
    if (!node) return nullptr;
    if (index == 0) return node;
    --index;
    if (NodePtr found = nth_node_impl(node->a, index)) return found;
    return nth_node_impl(node->b, index);
}

NodePtr replace_nth_impl(const NodePtr& node, int& index, const NodePtr& replacement) {
    if (index == 0) {
        --index;
        return replacement;
    }
    --index;
    if (!node->a) return node; // leaf, target lies elsewhere

    NodePtr newA = node->a;
    NodePtr newB = node->b;
    if (index >= 0) newA = replace_nth_impl(node->a, index, replacement);
    if (index >= 0 && node->b) newB = replace_nth_impl(node->b, index, replacement);
    if (newA == node->a && newB == node->b) return node;

    auto copy = std::make_shared<ExprNode>(*node);
    copy->a = newA;
    copy->b = newB;
    return copy;
}

} // namespace

NodePtr nth_node(const NodePtr& root, int index) {
    int i = index;
    NodePtr found = nth_node_impl(root, i);
    if (!found) throw Error(Errc::DimensionMismatch, "node index out of range");
    return found;
}

NodePtr replace_nth(const NodePtr& root, int index, NodePtr replacement) {
    if (index < 0 || index >= node_count(root))
        throw Error(Errc::DimensionMismatch, "node index out of range");
    int i = index;
    return replace_nth_impl(root, i, replacement);
}

Expr paper_model(const std::string& indexId) {
    if (indexId == "CPC1")
        return parse_expr("6.31 + 14.73/t + 14.59/t^2 + 6.63*cos(t)/t^3 - 1.63e-6*t^4");
    if (indexId == "CPC2")
        return parse_expr("1.62 + 0.08*t + 5.79e-5*t^3 + 0.04*cos(-12.96*t) - 0.004*t^2");
    if (indexId == "NPC")
        return parse_expr("9.32 + 0.16*t + 0.02*t^2 - 0.0005*t^3");
    if (indexId == "IPC1")
        return parse_expr("1.479 + 0.10*t - 0.12*log(t) - 6.72e-5*t^3 - 0.0002*t^2*sin(0.39*t)");
    if (indexId == "IPC2")
        return parse_expr("0.78 + 0.006*t^2 + 1.08e-7*t^5 - 0.10*t - 6.59e-6*t^4");
    throw Error(Errc::UnknownIndex, "no built-in model for index '" + indexId + "'");
}

std::vector<std::string> paper_model_ids() { return {"CPC1", "CPC2", "NPC", "IPC1", "IPC2"}; }

} // namespace dbf
