#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "radshoot/errors.hpp"

namespace radshoot::expr {

enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Node {
    enum class Kind { Literal, Var, Param, Neg, Bin };
    Kind kind;
    double literal = 0.0;    // Kind::Literal
    int var_index = -1;      // Kind::Var, 0-based (u1 -> 0)
    std::string param;       // Kind::Param
    BinOp op = BinOp::Add;   // Kind::Bin
    std::unique_ptr<Node> lhs;  // Bin left / Neg operand
    std::unique_ptr<Node> rhs;  // Bin right
};

// Shared power semantics: negative bases are allowed only for (numerically)
// integer exponents; 0^negative and x/0 are domain errors.
double pow_checked(double base, double exponent);

// One parsed expression over variables u1..u<num_vars> and a fixed set of
// named parameters. Immutable after parse.
class Expr {
public:
    Expr() = default;

    // Throws SyntaxError (with byte position) or UnknownIdentifier.
    static Expr parse(std::string_view text, int num_vars,
                      const std::set<std::string>& param_names);

    // Throws DomainError on fractional powers of negative bases or division
    // by zero; throws UnknownIdentifier if a parameter is missing from env.
    double eval(std::span<const double> u,
                const std::map<std::string, double>& params) const;

    // Minimal-parentheses rendering; reparsing it yields a structurally
    // identical tree (see same_structure).
    std::string str() const;

    bool same_structure(const Expr& other) const;

    bool empty() const { return root_ == nullptr; }
    const Node* root() const { return root_.get(); }
    int num_vars() const { return num_vars_; }

    // Builders used by tests that generate random trees directly.
    static Expr make_literal(double v);
    static Expr make_var(int index, int num_vars);
    static Expr make_param(const std::string& name);
    static Expr make_neg(Expr operand);
    static Expr make_bin(BinOp op, Expr lhs, Expr rhs);

private:
    std::unique_ptr<Node> root_;
    int num_vars_ = 0;
};

}  // namespace radshoot::expr
