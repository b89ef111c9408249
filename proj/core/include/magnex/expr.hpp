#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "magnex/error.hpp"

namespace magnex {

/// Raised when evaluation leaves a function's domain (sqrt/log of a negative number).
class EvalError : public Error {
public:
    EvalError(const std::string& what, std::string subexpr)
        : Error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

/// Immutable arithmetic expression over x, y, z [m] and t [s].
///
/// Grammar (loosest to tightest binding):
///   comparison  := additive (('<' | '<=' | '>' | '>=' | '==') additive)?
///   additive    := term (('+' | '-') term)*
///   term        := unary (('*' | '/') unary)*
///   unary       := '-' unary | '+' unary | power
///   power       := primary ('^' unary)?          right associative
///   primary     := number | identifier | call | '(' comparison ')'
/// Functions: sin cos tan exp log sqrt tanh abs min max where(cond, a, b). Constant: pi.
class Expr {
public:
    struct Node;

    Expr();  // the constant 0

    static Expr parse(std::string_view source);
    static Expr constant(double value);

    double eval(double x, double y, double z, double t) const;

    /// Fully parenthesized text that parses back to an equivalent expression.
    std::string print() const;
    const std::string& source() const { return source_; }

    bool depends_on_space() const;
    bool depends_on_time() const;
    /// True when the expression is a literal number (after parsing, no variables or calls).
    bool is_constant() const;

private:
    Expr(std::shared_ptr<const Node> root, std::string source);

    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace magnex
