#include "radshoot/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace radshoot::expr {

double pow_checked(double base, double exponent) {
    if (base < 0.0) {
        // tolerate exponents that are integers up to round-off; IEEE pow
        // handles the exact-integer case correctly
        double nearest = std::nearbyint(exponent);
        if (std::fabs(exponent - nearest) > 1e-9)
            throw DomainError("fractional power of negative base");
        return std::pow(base, nearest);
    }
    if (base == 0.0 && exponent < 0.0)
        throw DomainError("zero raised to a negative power");
    return std::pow(base, exponent);
}

namespace {

class Parser {
public:
    Parser(std::string_view text, int num_vars, const std::set<std::string>& params)
        : text_(text), num_vars_(num_vars), params_(params) {}

    std::unique_ptr<Node> run() {
        auto node = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError(pos_, "unexpected trailing input");
        return node;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int num_vars_;
    const std::set<std::string>& params_;

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    std::unique_ptr<Node> parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = make_bin(BinOp::Add, std::move(lhs), parse_term());
            else if (eat('-'))
                lhs = make_bin(BinOp::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    std::unique_ptr<Node> parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = make_bin(BinOp::Mul, std::move(lhs), parse_unary());
            else if (eat('/'))
                lhs = make_bin(BinOp::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    std::unique_ptr<Node> parse_unary() {
        if (eat('-')) {
            auto node = std::make_unique<Node>();
            node->kind = Node::Kind::Neg;
            node->lhs = parse_unary();
            return node;
        }
        return parse_power();
    }

    std::unique_ptr<Node> parse_power() {
        auto base = parse_primary();
        if (eat('^'))  // right-associative: a^b^c = a^(b^c)
            return make_bin(BinOp::Pow, std::move(base), parse_unary());
        return base;
    }

    std::unique_ptr<Node> parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw SyntaxError(pos_, "unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!eat(')')) throw SyntaxError(pos_, "expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_ident();
        throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
    }

    std::unique_ptr<Node> parse_number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin)
            throw SyntaxError(pos_, "malformed number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::Literal;
        node->literal = value;
        return node;
    }

    std::unique_ptr<Node> parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (params_.count(name)) {
            auto node = std::make_unique<Node>();
            node->kind = Node::Kind::Param;
            node->param = std::move(name);
            return node;
        }
        // variable pattern: u followed by a positive decimal index
        if (name.size() >= 2 && name[0] == 'u') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
                    digits = false;
                    break;
                }
            if (digits) {
                int index = std::atoi(name.c_str() + 1);
                if (index < 1 || index > num_vars_)
                    throw UnknownIdentifier(name);
                auto node = std::make_unique<Node>();
                node->kind = Node::Kind::Var;
                node->var_index = index - 1;
                return node;
            }
        }
        throw UnknownIdentifier(name);
    }

    static std::unique_ptr<Node> make_bin(BinOp op, std::unique_ptr<Node> l,
                                          std::unique_ptr<Node> r) {
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::Bin;
        node->op = op;
        node->lhs = std::move(l);
        node->rhs = std::move(r);
        return node;
    }
};

double eval_node(const Node* n, std::span<const double> u,
                 const std::map<std::string, double>& params) {
    switch (n->kind) {
        case Node::Kind::Literal:
            return n->literal;
        case Node::Kind::Var:
            return u[static_cast<std::size_t>(n->var_index)];
        case Node::Kind::Param: {
            auto it = params.find(n->param);
            if (it == params.end()) throw UnknownIdentifier(n->param);
            return it->second;
        }
        case Node::Kind::Neg:
            return -eval_node(n->lhs.get(), u, params);
        case Node::Kind::Bin: {
            double a = eval_node(n->lhs.get(), u, params);
            double b = eval_node(n->rhs.get(), u, params);
            switch (n->op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (b == 0.0) throw DomainError("division by zero");
                    return a / b;
                case BinOp::Pow: return pow_checked(a, b);
            }
            break;
        }
    }
    throw Error("corrupt expression tree");
}

// precedence levels used by the printer; higher binds tighter
int prec_of(const Node* n) {
    switch (n->kind) {
        case Node::Kind::Bin:
            switch (n->op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 4;
            }
            return 1;
        case Node::Kind::Neg: return 3;
        default: return 5;  // atoms
    }
}

void print_node(const Node* n, std::string& out);

void print_child(const Node* child, int parent_prec, bool need_parens_at_equal,
                 std::string& out) {
    int cp = prec_of(child);
    bool parens = cp < parent_prec || (cp == parent_prec && need_parens_at_equal);
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const Node* n, std::string& out) {
    switch (n->kind) {
        case Node::Kind::Literal: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", n->literal);
            out += buf;
            return;
        }
        case Node::Kind::Var:
            out += 'u';
            out += std::to_string(n->var_index + 1);
            return;
        case Node::Kind::Param:
            out += n->param;
            return;
        case Node::Kind::Neg:
            out += '-';
            // the operand must bind at least as tightly as unary minus,
            // except Pow which the grammar folds under the minus anyway
            print_child(n->lhs.get(), prec_of(n), false, out);
            return;
        case Node::Kind::Bin: {
            const int p = prec_of(n);
            const bool right_assoc = n->op == BinOp::Pow;
            // left-assoc ops need parens around an equal-precedence right
            // child (a-(b-c)); pow needs them around an equal-precedence
            // left child ((a^b)^c)
            print_child(n->lhs.get(), p, right_assoc, out);
            switch (n->op) {
                case BinOp::Add: out += " + "; break;
                case BinOp::Sub: out += " - "; break;
                case BinOp::Mul: out += "*"; break;
                case BinOp::Div: out += "/"; break;
                case BinOp::Pow: out += "^"; break;
            }
            print_child(n->rhs.get(), p, !right_assoc, out);
            return;
        }
    }
}

bool same_node(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::Literal: return a->literal == b->literal;
        case Node::Kind::Var: return a->var_index == b->var_index;
        case Node::Kind::Param: return a->param == b->param;
        case Node::Kind::Neg: return same_node(a->lhs.get(), b->lhs.get());
        case Node::Kind::Bin:
            return a->op == b->op && same_node(a->lhs.get(), b->lhs.get()) &&
                   same_node(a->rhs.get(), b->rhs.get());
    }
    return false;
}

}  // namespace

Expr Expr::parse(std::string_view text, int num_vars,
                 const std::set<std::string>& param_names) {
    Parser parser(text, num_vars, param_names);
    Expr e;
    e.root_ = parser.run();
    e.num_vars_ = num_vars;
    return e;
}

double Expr::eval(std::span<const double> u,
                  const std::map<std::string, double>& params) const {
    if (!root_) throw Error("evaluating an empty expression");
    return eval_node(root_.get(), u, params);
}

std::string Expr::str() const {
    std::string out;
    if (root_) print_node(root_.get(), out);
    return out;
}

bool Expr::same_structure(const Expr& other) const {
    return same_node(root_.get(), other.root_.get());
}

Expr Expr::make_literal(double v) {
    Expr e;
    e.root_ = std::make_unique<Node>();
    e.root_->kind = Node::Kind::Literal;
    e.root_->literal = v;
    return e;
}

Expr Expr::make_var(int index, int num_vars) {
    Expr e;
    e.root_ = std::make_unique<Node>();
    e.root_->kind = Node::Kind::Var;
    e.root_->var_index = index;
    e.num_vars_ = num_vars;
    return e;
}

Expr Expr::make_param(const std::string& name) {
    Expr e;
    e.root_ = std::make_unique<Node>();
    e.root_->kind = Node::Kind::Param;
    e.root_->param = name;
    return e;
}

Expr Expr::make_neg(Expr operand) {
    Expr e;
    e.num_vars_ = operand.num_vars_;
    e.root_ = std::make_unique<Node>();
    e.root_->kind = Node::Kind::Neg;
    e.root_->lhs = std::move(operand.root_);
    return e;
}

Expr Expr::make_bin(BinOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.num_vars_ = std::max(lhs.num_vars_, rhs.num_vars_);
    e.root_ = std::make_unique<Node>();
    e.root_->kind = Node::Kind::Bin;
    e.root_->op = op;
    e.root_->lhs = std::move(lhs.root_);
    e.root_->rhs = std::move(rhs.root_);
    return e;
}

}  // namespace radshoot::expr
