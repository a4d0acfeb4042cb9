// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "convexity/errors.hpp"

namespace convexity {

enum class ExprOp {
    constant,
    variable,
    negate,
    add,
    subtract,
    multiply,
    divide,
    power,
    fn_sin,
    fn_cos,
    fn_tan,
    fn_exp,
    fn_log,
    fn_sqrt,
    fn_abs,
    fn_min,
    fn_max,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree node. Binary nodes use lhs/rhs, unary nodes
/// only lhs. Variables are zero-based indices into the evaluation point.
struct ExprNode {
    ExprOp op;
    double value = 0.0;
    int variable = -1;
    ExprPtr lhs;
    ExprPtr rhs;
};

namespace detail {

inline ExprPtr make_constant(double v) {
    return std::make_shared<ExprNode>(ExprNode{ExprOp::constant, v, -1, nullptr, nullptr});
}

inline ExprPtr make_variable(int index) {
    return std::make_shared<ExprNode>(ExprNode{ExprOp::variable, 0.0, index, nullptr, nullptr});
}

inline ExprPtr make_unary(ExprOp op, ExprPtr operand) {
    return std::make_shared<ExprNode>(ExprNode{op, 0.0, -1, std::move(operand), nullptr});
}

inline ExprPtr make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<ExprNode>(ExprNode{op, 0.0, -1, std::move(lhs), std::move(rhs)});
}

inline int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::add:
        case ExprOp::subtract: return 1;
        case ExprOp::multiply:
        case ExprOp::divide: return 3;
        case ExprOp::negate: return 5;
        case ExprOp::power: return 8;
        default: return 100;
    }
}

inline const char* fn_name(ExprOp op) {
    switch (op) {
        case ExprOp::fn_sin: return "sin";
        case ExprOp::fn_cos: return "cos";
        case ExprOp::fn_tan: return "tan";
        case ExprOp::fn_exp: return "exp";
        case ExprOp::fn_log: return "log";
        case ExprOp::fn_sqrt: return "sqrt";
        case ExprOp::fn_abs: return "abs";
        case ExprOp::fn_min: return "min";
        case ExprOp::fn_max: return "max";
        default: return "?";
    }
}

inline std::string print_constant(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print_node(const ExprNode& n, std::string& out) {
    switch (n.op) {
        case ExprOp::constant:
            if (n.value < 0.0) {
                out += '(';
                out += print_constant(n.value);
                out += ')';
            } else {
                out += print_constant(n.value);
            }
            return;
        case ExprOp::variable:
            out += 'x';
            out += std::to_string(n.variable + 1);
            return;
        case ExprOp::negate: {
            out += '-';
            const bool parens = precedence(n.lhs->op) < precedence(ExprOp::negate);
            if (parens) out += '(';
            print_node(*n.lhs, out);
            if (parens) out += ')';
            return;
        }
        case ExprOp::add:
        case ExprOp::subtract:
        case ExprOp::multiply:
        case ExprOp::divide:
        case ExprOp::power: {
            const int prec = precedence(n.op);
            // left-associative chains keep the left child bare; power is the
            // mirror image (right-associative)
            const int lneed = n.op == ExprOp::power ? prec + 1 : prec;
            const int rneed = n.op == ExprOp::power ? prec : prec + 1;
            const bool lp = precedence(n.lhs->op) < lneed;
            const bool rp = precedence(n.rhs->op) < rneed;
            if (lp) out += '(';
            print_node(*n.lhs, out);
            if (lp) out += ')';
            switch (n.op) {
                case ExprOp::add: out += '+'; break;
                case ExprOp::subtract: out += '-'; break;
                case ExprOp::multiply: out += '*'; break;
                case ExprOp::divide: out += '/'; break;
                default: out += '^'; break;
            }
            if (rp) out += '(';
            print_node(*n.rhs, out);
            if (rp) out += ')';
            return;
        }
        default: {
            out += fn_name(n.op);
            out += '(';
            print_node(*n.lhs, out);
            if (n.rhs) {
                out += ',';
                print_node(*n.rhs, out);
            }
            out += ')';
            return;
        }
    }
}

} // namespace detail

inline std::string to_string(const ExprNode& node) {
    std::string out;
    detail::print_node(node, out);
    return out;
}

inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case ExprOp::constant: return a.value == b.value;
        case ExprOp::variable: return a.variable == b.variable;
        default:
            if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) ||
                static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
                return false;
            if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
            if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
            return true;
    }
}

namespace detail {

inline double eval_node(const ExprNode& n, std::span<const double> point) {
    double result;
    switch (n.op) {
        case ExprOp::constant: return n.value;
        case ExprOp::variable: return point[static_cast<std::size_t>(n.variable)];
        case ExprOp::negate: return -eval_node(*n.lhs, point);
        case ExprOp::add: result = eval_node(*n.lhs, point) + eval_node(*n.rhs, point); break;
        case ExprOp::subtract: result = eval_node(*n.lhs, point) - eval_node(*n.rhs, point); break;
        case ExprOp::multiply: result = eval_node(*n.lhs, point) * eval_node(*n.rhs, point); break;
        case ExprOp::divide: {
            const double num = eval_node(*n.lhs, point);
            const double den = eval_node(*n.rhs, point);
            if (den == 0.0) throw eval_error("division by zero in '" + to_string(n) + "'");
            result = num / den;
            break;
        }
        case ExprOp::power: {
            const double base = eval_node(*n.lhs, point);
            const double exponent = eval_node(*n.rhs, point);
            if (base < 0.0 && exponent != std::floor(exponent))
                throw eval_error("negative base with non-integer exponent in '" + to_string(n) +
                                 "'");
            result = std::pow(base, exponent);
            break;
        }
        case ExprOp::fn_sin: result = std::sin(eval_node(*n.lhs, point)); break;
        case ExprOp::fn_cos: result = std::cos(eval_node(*n.lhs, point)); break;
        case ExprOp::fn_tan: result = std::tan(eval_node(*n.lhs, point)); break;
        case ExprOp::fn_exp: result = std::exp(eval_node(*n.lhs, point)); break;
        case ExprOp::fn_log: {
            const double arg = eval_node(*n.lhs, point);
            if (arg <= 0.0) throw eval_error("log of non-positive value in '" + to_string(n) + "'");
            result = std::log(arg);
            break;
        }
        case ExprOp::fn_sqrt: {
            const double arg = eval_node(*n.lhs, point);
            if (arg < 0.0) throw eval_error("sqrt of negative value in '" + to_string(n) + "'");
            result = std::sqrt(arg);
            break;
        }
        case ExprOp::fn_abs: result = std::abs(eval_node(*n.lhs, point)); break;
        case ExprOp::fn_min:
            result = std::min(eval_node(*n.lhs, point), eval_node(*n.rhs, point));
            break;
        case ExprOp::fn_max:
            result = std::max(eval_node(*n.lhs, point), eval_node(*n.rhs, point));
            break;
        default: throw eval_error("malformed expression node");
    }
    if (!std::isfinite(result))
        throw eval_error("non-finite value from '" + to_string(n) + "'");
    return result;
}

struct Token {
    enum class Kind { number, identifier, plus, minus, star, slash, caret, lparen, rparen, comma, end };
    Kind kind = Kind::end;
    double number = 0.0;
    std::string text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; t.kind = Token::Kind::plus; return t;
            case '-': ++pos_; t.kind = Token::Kind::minus; return t;
            case '*': ++pos_; t.kind = Token::Kind::star; return t;
            case '/': ++pos_; t.kind = Token::Kind::slash; return t;
            case '^': ++pos_; t.kind = Token::Kind::caret; return t;
            case '(': ++pos_; t.kind = Token::Kind::lparen; return t;
            case ')': ++pos_; t.kind = Token::Kind::rparen; return t;
            case ',': ++pos_; t.kind = Token::Kind::comma; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.'))
                ++end;
            if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
                std::size_t exp = end + 1;
                if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
                if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                    ++exp;
                    while (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp])))
                        ++exp;
                    end = exp;
                }
            }
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + end, value);
            if (ec != std::errc{} || ptr != src_.data() + end)
                throw parse_error("malformed number literal", pos_);
            t.kind = Token::Kind::number;
            t.number = value;
            pos_ = end;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) ||
                                         src_[end] == '_'))
                ++end;
            t.kind = Token::Kind::identifier;
            t.text.assign(src_.substr(pos_, end - pos_));
            pos_ = end;
            return t;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

struct FunctionInfo {
    ExprOp op;
    int arity;
};

inline const FunctionInfo* lookup_function(std::string_view name) {
    static const std::pair<std::string_view, FunctionInfo> table[] = {
        {"sin", {ExprOp::fn_sin, 1}},  {"cos", {ExprOp::fn_cos, 1}},
        {"tan", {ExprOp::fn_tan, 1}},  {"exp", {ExprOp::fn_exp, 1}},
        {"log", {ExprOp::fn_log, 1}},  {"sqrt", {ExprOp::fn_sqrt, 1}},
        {"abs", {ExprOp::fn_abs, 1}},  {"min", {ExprOp::fn_min, 2}},
        {"max", {ExprOp::fn_max, 2}},  {"pow", {ExprOp::power, 2}},
    };
    for (const auto& [key, info] : table)
        if (key == name) return &info;
    return nullptr;
}

/// Precedence-climbing parser. Binding powers: +,- (1) < *,/ (3) < unary
/// minus (5) < ^ (8, right-associative); calls and parens bind tightest.
class Parser {
public:
    Parser(std::string_view src, std::size_t dimension) : lexer_(src), dim_(dimension) {
        advance();
    }

    ExprPtr parse() {
        ExprPtr e = parse_bp(0);
        if (cur_.kind != Token::Kind::end)
            throw parse_error("unexpected trailing input", cur_.offset);
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    ExprPtr parse_bp(int min_bp) {
        ExprPtr lhs = parse_primary();
        for (;;) {
            ExprOp op;
            int lbp, rbp;
            switch (cur_.kind) {
                case Token::Kind::plus: op = ExprOp::add; lbp = 1; rbp = 2; break;
                case Token::Kind::minus: op = ExprOp::subtract; lbp = 1; rbp = 2; break;
                case Token::Kind::star: op = ExprOp::multiply; lbp = 3; rbp = 4; break;
                case Token::Kind::slash: op = ExprOp::divide; lbp = 3; rbp = 4; break;
                case Token::Kind::caret: op = ExprOp::power; lbp = 8; rbp = 7; break;
                default: return lhs;
            }
            if (lbp < min_bp) return lhs;
            advance();
            lhs = make_binary(op, std::move(lhs), parse_bp(rbp));
        }
    }

    ExprPtr parse_primary() {
        const Token t = cur_;
        switch (t.kind) {
            case Token::Kind::number:
                advance();
                return make_constant(t.number);
            case Token::Kind::minus:
                advance();
                return make_unary(ExprOp::negate, parse_bp(5));
            case Token::Kind::lparen: {
                advance();
                ExprPtr e = parse_bp(0);
                expect(Token::Kind::rparen, "expected ')'");
                return e;
            }
            case Token::Kind::identifier: {
                advance();
                if (cur_.kind == Token::Kind::lparen) return parse_call(t);
                return resolve_variable(t);
            }
            default:
                throw parse_error("expected a value", t.offset);
        }
    }

    ExprPtr parse_call(const Token& name) {
        const FunctionInfo* fn = lookup_function(name.text);
        if (!fn) throw parse_error("unknown function '" + name.text + "'", name.offset);
        advance();  // consume '('
        ExprPtr first = parse_bp(0);
        ExprPtr second;
        int given = 1;
        while (cur_.kind == Token::Kind::comma) {
            advance();
            ExprPtr arg = parse_bp(0);
            if (given == 1) second = std::move(arg);
            ++given;
        }
        expect(Token::Kind::rparen, "expected ')' after arguments");
        if (given != fn->arity)
            throw parse_error("function '" + name.text + "' expects " +
                                  std::to_string(fn->arity) + " argument(s), got " +
                                  std::to_string(given),
                              name.offset);
        if (fn->arity == 1) return make_unary(fn->op, std::move(first));
        return make_binary(fn->op, std::move(first), std::move(second));
    }

    ExprPtr resolve_variable(const Token& t) {
        const std::string& name = t.text;
        long index = -1;
        if (dim_ <= 3 && name.size() == 1 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
            index = name[0] - 'x';
        } else if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                index = std::stol(name.substr(1)) - 1;
                if (index < 0)
                    throw parse_error("variable '" + name + "' is not valid (indices start at x1)",
                                      t.offset);
            }
        }
        if (index < 0) {
            if (lookup_function(name))
                throw parse_error("function '" + name + "' used without argument list", t.offset);
            throw parse_error("unknown identifier '" + name + "'", t.offset);
        }
        if (static_cast<std::size_t>(index) >= dim_)
            throw parse_error("variable '" + name + "' exceeds dimension " + std::to_string(dim_),
                              t.offset);
        return make_variable(static_cast<int>(index));
    }

    void expect(Token::Kind kind, const char* message) {
        if (cur_.kind != kind) throw parse_error(message, cur_.offset);
        advance();
    }

    Lexer lexer_;
    Token cur_;
    std::size_t dim_;
};

} // namespace detail

/// Parsed expression bound to a dimension. Evaluation is pure and reentrant.
class Expression {
public:
    Expression(ExprPtr root, std::size_t dimension) : root_(std::move(root)), dim_(dimension) {}

    std::size_t dimension() const noexcept { return dim_; }
    const ExprPtr& root() const noexcept { return root_; }

    double evaluate(std::span<const double> point) const {
        if (point.size() != dim_)
            throw precondition_error("point dimension mismatch: expected " + std::to_string(dim_) +
                                     ", got " + std::to_string(point.size()));
        return detail::eval_node(*root_, point);
    }

    std::string to_string() const { return convexity::to_string(*root_); }

private:
    ExprPtr root_;
    std::size_t dim_;
};

inline Expression parse_expression(std::string_view source, std::size_t dimension) {
    if (dimension < 1) throw precondition_error("expression dimension must be >= 1");
    if (source.empty()) throw parse_error("empty expression", 0);
    detail::Parser parser(source, dimension);
    return Expression(parser.parse(), dimension);
}

} // namespace convexity
