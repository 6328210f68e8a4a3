#pragma once

// Expression language for f and phi: parsing, unparsing, plain and
// forward-mode (dual number) evaluation in the single variable `x`.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hhcert {

enum class UnaryOp { Neg, Exp, Ln, Sin, Cos, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

class Expr;

namespace node {
struct Constant {
    double value;
};
struct Variable {};
struct Unary {
    UnaryOp op;
    std::shared_ptr<const Expr> child;
};
struct Binary {
    BinaryOp op;
    std::shared_ptr<const Expr> left;
    std::shared_ptr<const Expr> right;
};
}  // namespace node

/// Immutable expression tree. Copies share structure.
class Expr {
public:
    using Node = std::variant<node::Constant, node::Variable, node::Unary, node::Binary>;

    static Expr constant(double v);
    static Expr variable();
    static Expr unary(UnaryOp op, Expr child);
    static Expr binary(BinaryOp op, Expr left, Expr right);

    const Node& node() const { return *node_; }

    bool is_constant() const { return std::holds_alternative<node::Constant>(*node_); }

    /// Structural equality (bitwise on constants).
    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct DualValue {
    double value = 0.0;
    double deriv = 0.0;

    friend bool operator==(const DualValue&, const DualValue&) = default;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier };

    ParseError(Kind kind, std::size_t offset, std::string expected, const std::string& what)
        : std::runtime_error(what), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

    Kind kind() const { return kind_; }
    /// 1-based byte position of the offending character (input length + 1 at end of input).
    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::string expected_;
};

class DomainError : public std::runtime_error {
public:
    DomainError(std::string node_text, double input, const std::string& reason);

    /// Unparsed form of the sub-expression that left its domain.
    const std::string& node_text() const { return node_text_; }
    double input() const { return input_; }
    const std::string& reason() const { return reason_; }

private:
    std::string node_text_;
    double input_;
    std::string reason_;
};

Expr parse(std::string_view source);

/// Fully parenthesized text that reparses to a structurally identical tree.
std::string unparse(const Expr& e);

double eval(const Expr& e, double x);
DualValue eval_dual(const Expr& e, double x);

/// Replaces every occurrence of `x` in `outer` with `inner`.
Expr substitute(const Expr& outer, const Expr& inner);

/// Points in (lo, hi) where an `abs` node's argument, affine in x, changes sign.
/// Non-affine abs arguments are skipped; adaptive refinement handles those.
std::vector<double> abs_kinks(const Expr& e, double lo, double hi);

std::string to_string(UnaryOp op);
std::string to_string(BinaryOp op);

}  // namespace hhcert
