#include <charconv>
#include <cmath>
#include <string>

#include "dbf/errors.hpp"
#include "dbf/expr.hpp"

namespace dbf {

namespace {

struct Token {
    enum class Kind { Number, TimeVar, Func, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind = Kind::End;
    double number = 0.0;
    std::string text;     // func name or raw number text
    std::size_t pos = 0;
};

[[noreturn]] void fail(std::size_t pos, const std::string& what) {
    throw Error(Errc::ParseError, what + " at position " + std::to_string(pos));
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& current() const { return tok_; }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.pos = pos_;
        if (pos_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        const char c = text_[pos_];
        switch (c) {
            case '+': tok_.kind = Token::Kind::Plus; ++pos_; return;
            case '-': tok_.kind = Token::Kind::Minus; ++pos_; return;
            case '*': tok_.kind = Token::Kind::Star; ++pos_; return;
            case '/': tok_.kind = Token::Kind::Slash; ++pos_; return;
            case '^': tok_.kind = Token::Kind::Caret; ++pos_; return;
            case '(': tok_.kind = Token::Kind::LParen; ++pos_; return;
            case ')': tok_.kind = Token::Kind::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isalpha(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            const std::string word = text_.substr(start, pos_ - start);
            if (word == "t") {
                tok_.kind = Token::Kind::TimeVar;
                return;
            }
            if (word == "cos" || word == "sin" || word == "log" || word == "exp") {
                tok_.kind = Token::Kind::Func;
                tok_.text = word;
                return;
            }
            fail(start, "unknown identifier '" + word + "'");
        }
        fail(pos_, std::string("unexpected character '") + c + "'");
    }

private:
    void lex_number() {
        const std::size_t start = pos_;
        bool sawDigit = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
            sawDigit = true;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                sawDigit = true;
            }
        }
        if (!sawDigit) fail(start, "malformed number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t expStart = pos_ + 1;
            std::size_t q = expStart;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
            std::size_t digits = q;
            while (digits < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits])))
                ++digits;
            if (digits > q) pos_ = digits; // otherwise the 'e' belongs to something else
        }
        tok_.kind = Token::Kind::Number;
        tok_.text = text_.substr(start, pos_ - start);
        auto [ptr, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(),
                                         tok_.number);
        if (ec != std::errc() || ptr != tok_.text.data() + tok_.text.size() ||
            !std::isfinite(tok_.number))
            fail(start, "malformed number '" + tok_.text + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Expr run() {
        NodePtr e = expr();
        if (lex_.current().kind != Token::Kind::End)
            fail(lex_.current().pos, "unexpected trailing input");
        return Expr(std::move(e));
    }

private:
    NodePtr expr() {
        NodePtr left = term();
        while (true) {
            const auto kind = lex_.current().kind;
            if (kind == Token::Kind::Plus) {
                lex_.advance();
                left = make_binary(BinaryOp::Add, std::move(left), term());
            } else if (kind == Token::Kind::Minus) {
                lex_.advance();
                left = make_binary(BinaryOp::Sub, std::move(left), term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        while (true) {
            const auto kind = lex_.current().kind;
            if (kind == Token::Kind::Star) {
                lex_.advance();
                left = make_binary(BinaryOp::Mul, std::move(left), unary());
            } else if (kind == Token::Kind::Slash) {
                lex_.advance();
                left = make_binary(BinaryOp::Div, std::move(left), unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (lex_.current().kind == Token::Kind::Minus) {
            lex_.advance();
            NodePtr child = unary();
            // fold the sign into literals; otherwise encode as 0 - x
            if (child->kind == ExprNode::Kind::Const) return make_const(-child->value);
            return make_binary(BinaryOp::Sub, make_const(0.0), std::move(child));
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (lex_.current().kind != Token::Kind::Caret) return base;
        lex_.advance();
        const Token expTok = lex_.current();
        if (expTok.kind != Token::Kind::Number)
            fail(expTok.pos, "expected integer exponent after '^'");
        if (expTok.text.find('.') != std::string::npos ||
            expTok.text.find('e') != std::string::npos ||
            expTok.text.find('E') != std::string::npos)
            throw Error(Errc::ExponentNotInteger,
                        "exponent '" + expTok.text + "' is not an integer literal");
        const int e = static_cast<int>(expTok.number);
        lex_.advance();
        if (e == 0) return make_const(1.0);
        if (e == 1) return base;
        if (e < kPowExponentMin || e > kPowExponentMax)
            fail(expTok.pos, "exponent " + std::to_string(e) + " outside [" +
                                 std::to_string(kPowExponentMin) + ", " +
                                 std::to_string(kPowExponentMax) + "]");
        return make_pow(std::move(base), e);
    }

    NodePtr primary() {
        const Token tok = lex_.current();
        switch (tok.kind) {
            case Token::Kind::Number:
                lex_.advance();
                return make_const(tok.number);
            case Token::Kind::TimeVar:
                lex_.advance();
                return make_time();
            case Token::Kind::Func: {
                lex_.advance();
                if (lex_.current().kind != Token::Kind::LParen)
                    fail(lex_.current().pos, "expected '(' after '" + tok.text + "'");
                lex_.advance();
                NodePtr arg = expr();
                if (lex_.current().kind != Token::Kind::RParen)
                    fail(lex_.current().pos, "expected ')'");
                lex_.advance();
                UnaryOp op = UnaryOp::Cos;
                if (tok.text == "sin") op = UnaryOp::Sin;
                else if (tok.text == "log") op = UnaryOp::Log;
                else if (tok.text == "exp") op = UnaryOp::Exp;
                return make_unary(op, std::move(arg));
            }
            case Token::Kind::LParen: {
                lex_.advance();
                NodePtr inner = expr();
                if (lex_.current().kind != Token::Kind::RParen)
                    fail(lex_.current().pos, "expected ')'");
                lex_.advance();
                return inner;
            }
            default:
                fail(tok.pos, "expected a number, 't', a function call or '('");
        }
    }

    Lexer lex_;
};

// Precedence levels used by the printer: 1 add/sub, 2 mul/div, 3 pow and
// negative literals, 4 atoms. A parenthesized child is emitted whenever the
// text would otherwise re-parse with a different shape.
int print_prec(const ExprNode* n) {
    switch (n->kind) {
        case ExprNode::Kind::Const: return std::signbit(n->value) ? 3 : 4;
        case ExprNode::Kind::Time: return 4;
        case ExprNode::Kind::Unary: return 4;
        case ExprNode::Kind::Pow: return 3;
        case ExprNode::Kind::Binary:
            return (n->bop == BinaryOp::Add || n->bop == BinaryOp::Sub) ? 1 : 2;
    }
    return 4;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void print_node(const ExprNode* n, std::string& out);

void print_child(const ExprNode* child, int minPrec, std::string& out) {
    if (print_prec(child) < minPrec) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const ExprNode* n, std::string& out) {
    switch (n->kind) {
        case ExprNode::Kind::Const:
            out += format_number(n->value);
            return;
        case ExprNode::Kind::Time:
            out += 't';
            return;
        case ExprNode::Kind::Unary:
            switch (n->uop) {
                case UnaryOp::Cos: out += "cos("; break;
                case UnaryOp::Sin: out += "sin("; break;
                case UnaryOp::Log: out += "log("; break;
                case UnaryOp::Exp: out += "exp("; break;
            }
            print_node(n->a.get(), out);
            out += ')';
            return;
        case ExprNode::Kind::Pow:
            print_child(n->a.get(), 4, out);
            out += '^';
            out += std::to_string(n->exponent);
            return;
        case ExprNode::Kind::Binary: {
            const int p = print_prec(n);
            const char* op = " + ";
            if (n->bop == BinaryOp::Sub) op = " - ";
            else if (n->bop == BinaryOp::Mul) op = " * ";
            else if (n->bop == BinaryOp::Div) op = " / ";
            print_child(n->a.get(), p, out);
            out += op;
            print_child(n->b.get(), p + 1, out);
            return;
        }
    }
}

} // namespace

Expr parse_expr(const std::string& text) { return Parser(text).run(); }

std::string print_expr(const Expr& e) {
    std::string out;
    print_node(e.root().get(), out);
    return out;
}

} // namespace dbf
