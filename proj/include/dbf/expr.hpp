#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dbf {

enum class UnaryOp { Cos, Sin, Log, Exp };
enum class BinaryOp { Add, Sub, Mul, Div };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

// Expression tree over the time variable t. Nodes are immutable and shared;
// variation operators build new trees that reuse untouched subtrees.
struct ExprNode {
    enum class Kind { Const, Time, Unary, Binary, Pow };

    Kind kind = Kind::Const;
    double value = 0.0;   // Const
    UnaryOp uop = UnaryOp::Cos;
    BinaryOp bop = BinaryOp::Add;
    int exponent = 2;     // Pow, in [2, 8]
    NodePtr a, b;         // child (Unary/Pow: a; Binary: a, b)
};

constexpr int kPowExponentMin = 2;
constexpr int kPowExponentMax = 8;

NodePtr make_const(double value);             // value must be finite
NodePtr make_time();
NodePtr make_unary(UnaryOp op, NodePtr child);
NodePtr make_binary(BinaryOp op, NodePtr left, NodePtr right);
NodePtr make_pow(NodePtr base, int exponent); // exponent in [2, 8]

class Expr {
public:
    Expr() : root_(make_const(0.0)) {}
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    const NodePtr& root() const { return root_; }

    int size() const;   // node count
    int depth() const;  // single node = depth 1

    bool operator==(const Expr& other) const;

private:
    NodePtr root_;
};

// Protected evaluation: a domain violation or non-finite intermediate is
// reported as an error value, never returned as NaN/inf.
enum class EvalError { None, DivByZero, LogNonPositive, Overflow };

struct EvalResult {
    double value = 0.0;
    EvalError error = EvalError::None;
    bool ok() const { return error == EvalError::None; }
};

EvalResult evaluate(const Expr& e, double t);

const char* eval_error_name(EvalError err);

// Per-node-kind complexity weights; a Pow node counts its base node plus one
// for the exponent, hence the default of 2.
struct ComplexityWeights {
    int constant = 1;
    int timeVar = 1;
    int unary = 1;
    int binary = 1;
    int powInt = 2;
};

int complexity(const Expr& e, const ComplexityWeights& w = {});

// Text form: infix + - * / ^, cos( ) sin( ) log( ) exp( ), variable t,
// decimal and scientific constants. ^ takes an integer literal exponent.
Expr parse_expr(const std::string& text);   // throws ParseError / ExponentNotInteger
std::string print_expr(const Expr& e);

// Constant folding plus the identities x+0, x*1, x*0, x/1 (and the commuted
// forms for + and *). Folding that would hit a domain error leaves the
// subtree unchanged, so the value is preserved everywhere it is defined.
Expr simplify(const Expr& e);

bool contains_time(const NodePtr& node);

// The five built-in index models, keyed CPC1, CPC2, NPC, IPC1, IPC2.
Expr paper_model(const std::string& indexId); // throws UnknownIndex
std::vector<std::string> paper_model_ids();

// --- tree navigation used by the search engine and tests ---

int node_count(const NodePtr& node);
int node_depth(const NodePtr& node);
NodePtr nth_node(const NodePtr& root, int index);              // preorder
NodePtr replace_nth(const NodePtr& root, int index, NodePtr replacement);

} // namespace dbf
