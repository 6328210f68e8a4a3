#include "hhcert/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <limits>
#include <sstream>

namespace hhcert {

Expr Expr::constant(double v) {
    return Expr(std::make_shared<const Node>(node::Constant{v}));
}

Expr Expr::variable() {
    return Expr(std::make_shared<const Node>(node::Variable{}));
}

Expr Expr::unary(UnaryOp op, Expr child) {
    return Expr(std::make_shared<const Node>(
        node::Unary{op, std::make_shared<const Expr>(std::move(child))}));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right) {
    return Expr(std::make_shared<const Node>(
        node::Binary{op, std::make_shared<const Expr>(std::move(left)),
                     std::make_shared<const Expr>(std::move(right))}));
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& na = *a.node_;
    const auto& nb = *b.node_;
    if (na.index() != nb.index()) return false;
    if (const auto* ca = std::get_if<node::Constant>(&na)) {
        const auto& cb = std::get<node::Constant>(nb);
        return std::bit_cast<std::uint64_t>(ca->value) == std::bit_cast<std::uint64_t>(cb.value);
    }
    if (std::holds_alternative<node::Variable>(na)) return true;
    if (const auto* ua = std::get_if<node::Unary>(&na)) {
        const auto& ub = std::get<node::Unary>(nb);
        return ua->op == ub.op && *ua->child == *ub.child;
    }
    const auto& ba = std::get<node::Binary>(na);
    const auto& bb = std::get<node::Binary>(nb);
    return ba.op == bb.op && *ba.left == *bb.left && *ba.right == *bb.right;
}

std::string to_string(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Ln: return "ln";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Abs: return "abs";
    }
    return "?";
}

std::string to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
    }
    return "?";
}

DomainError::DomainError(std::string node_text, double input, const std::string& reason)
    : std::runtime_error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "domain error: " << reason << " in `" << node_text << "` at x = " << input;
          return os.str();
      }()),
      node_text_(std::move(node_text)),
      input_(input),
      reason_(reason) {}

// ---------------------------------------------------------------------------
// Parser
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'x' | func '(' expr ')' | '(' expr ')'

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expression", "empty expression");
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) fail("operator or end of input", "unexpected character");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected, const std::string& msg) const {
        std::ostringstream os;
        os << "syntax error at offset " << pos_ + 1 << ": " << msg << ", expected " << expected;
        throw ParseError(ParseError::Kind::Syntax, pos_ + 1, expected, os.str());
    }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                      src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("`") + c + "`", "missing token");
        ++pos_;
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (peek('+')) {
                ++pos_;
                lhs = Expr::binary(BinaryOp::Add, std::move(lhs), parse_term());
            } else if (peek('-')) {
                ++pos_;
                lhs = Expr::binary(BinaryOp::Sub, std::move(lhs), parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                lhs = Expr::binary(BinaryOp::Mul, std::move(lhs), parse_unary());
            } else if (peek('/')) {
                ++pos_;
                lhs = Expr::binary(BinaryOp::Div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        if (peek('-')) {
            ++pos_;
            return Expr::unary(UnaryOp::Neg, parse_unary());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (peek('^')) {
            ++pos_;
            return Expr::binary(BinaryOp::Pow, std::move(base), parse_unary());
        }
        return base;
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("number, `x`, function or `(`", "unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1])))
            return parse_number();
        if (is_alpha(c)) return parse_identifier();
        fail("number, `x`, function or `(`", "unexpected character");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ >= src_.size() || !is_digit(src_[pos_])) fail("exponent digits", "malformed number");
            while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value)) {
            pos_ = start;
            fail("finite number", "number out of range");
        }
        return Expr::constant(value);
    }

    Expr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return Expr::variable();

        std::optional<UnaryOp> op;
        if (name == "exp") op = UnaryOp::Exp;
        else if (name == "ln") op = UnaryOp::Ln;
        else if (name == "sin") op = UnaryOp::Sin;
        else if (name == "cos") op = UnaryOp::Cos;
        else if (name == "sqrt") op = UnaryOp::Sqrt;
        else if (name == "abs") op = UnaryOp::Abs;

        if (!op) {
            std::ostringstream os;
            os << "unknown identifier `" << name << "` at offset " << start + 1;
            throw ParseError(ParseError::Kind::UnknownIdentifier, start + 1,
                             "`x` or one of exp ln sin cos sqrt abs", os.str());
        }
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return Expr::unary(*op, std::move(arg));
    }
};

std::string format_constant(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void unparse_into(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Constant>) {
                // Negative constants never come out of the parser; wrap them so the
                // text still reparses to the same value.
                if (std::signbit(n.value)) {
                    out += "(0-" + format_constant(-n.value) + ")";
                } else {
                    out += format_constant(n.value);
                }
            } else if constexpr (std::is_same_v<T, node::Variable>) {
                out += 'x';
            } else if constexpr (std::is_same_v<T, node::Unary>) {
                if (n.op == UnaryOp::Neg) {
                    out += "(-";
                    unparse_into(*n.child, out);
                    out += ')';
                } else {
                    out += to_string(n.op);
                    out += '(';
                    unparse_into(*n.child, out);
                    out += ')';
                }
            } else {
                out += '(';
                unparse_into(*n.left, out);
                out += to_string(n.op);
                unparse_into(*n.right, out);
                out += ')';
            }
        },
        e.node());
}

// ---------------------------------------------------------------------------
// Evaluation

struct Dual {
    double v;
    double d = 0.0;
};

inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

// Kept out of line so the compiler cannot fuse a sin/cos pair into sincos(),
// whose last bit can differ from sin() alone; plain and dual values must agree.
[[gnu::noinline]] double sin_of(double u) { return std::sin(u); }
[[gnu::noinline]] double cos_of(double u) { return std::cos(u); }

inline double value_of(double a) { return a; }
inline double value_of(Dual a) { return a.v; }

constexpr double kMaxRepeatedExponent = 1 << 30;

bool has_variable(const Expr& e) {
    return std::visit(
        [](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Variable>) return true;
            else if constexpr (std::is_same_v<T, node::Unary>) return has_variable(*n.child);
            else if constexpr (std::is_same_v<T, node::Binary>)
                return has_variable(*n.left) || has_variable(*n.right);
            else return false;
        },
        e.node());
}

double eval_plain(const Expr& e, double x);

/// Value of a variable-free exponent such as `2` or `-(1/2)`.
std::optional<double> constant_exponent(const Expr& e) {
    if (const auto* c = std::get_if<node::Constant>(&e.node())) return c->value;
    if (has_variable(e)) return std::nullopt;
    return eval_plain(e, 0.0);
}

std::optional<long long> integer_exponent(std::optional<double> c) {
    if (!c) return std::nullopt;
    double v = *c;
    if (std::trunc(v) != v || std::fabs(v) > kMaxRepeatedExponent) return std::nullopt;
    return static_cast<long long>(v);
}

template <class T>
T repeated_power(T base, long long n) {
    T result{1.0};
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

template <class T>
class Evaluator {
public:
    explicit Evaluator(double x) : x_(x) {}

    T operator()(const Expr& e) const {
        return std::visit([&](const auto& n) { return eval_node(e, n); }, e.node());
    }

private:
    double x_;

    [[noreturn]] void domain(const Expr& e, const std::string& reason) const {
        throw DomainError(unparse(e), x_, reason);
    }

    T eval_node(const Expr&, const node::Constant& n) const {
        if constexpr (std::is_same_v<T, Dual>) return Dual{n.value, 0.0};
        else return n.value;
    }

    T eval_node(const Expr&, const node::Variable&) const {
        if constexpr (std::is_same_v<T, Dual>) return Dual{x_, 1.0};
        else return x_;
    }

    T eval_node(const Expr& self, const node::Unary& n) const {
        T u = (*this)(*n.child);
        double uv = value_of(u);
        constexpr bool dual = std::is_same_v<T, Dual>;
        switch (n.op) {
            case UnaryOp::Neg:
                if constexpr (dual) return Dual{-u.v, -u.d};
                else return -u;
            case UnaryOp::Exp: {
                double ev = std::exp(uv);
                if constexpr (dual) return Dual{ev, ev * u.d};
                else return ev;
            }
            case UnaryOp::Ln:
                if (!(uv > 0.0)) domain(self, "logarithm of a non-positive value");
                if constexpr (dual) return Dual{std::log(uv), u.d / uv};
                else return std::log(uv);
            case UnaryOp::Sin:
                if constexpr (dual) return Dual{sin_of(uv), cos_of(uv) * u.d};
                else return sin_of(uv);
            case UnaryOp::Cos:
                if constexpr (dual) return Dual{cos_of(uv), -sin_of(uv) * u.d};
                else return cos_of(uv);
            case UnaryOp::Sqrt: {
                if (uv < 0.0) domain(self, "square root of a negative value");
                double sv = std::sqrt(uv);
                if constexpr (dual) {
                    if (sv == 0.0) domain(self, "square root is not differentiable at 0");
                    return Dual{sv, u.d / (2.0 * sv)};
                } else {
                    return sv;
                }
            }
            case UnaryOp::Abs: {
                if constexpr (dual) {
                    double s = uv > 0.0 ? 1.0 : (uv < 0.0 ? -1.0 : 0.0);
                    return Dual{std::fabs(uv), s * u.d};
                } else {
                    return std::fabs(uv);
                }
            }
        }
        domain(self, "unknown operator");
    }

    T eval_node(const Expr& self, const node::Binary& n) const {
        if (n.op == BinaryOp::Pow) return eval_pow(self, n);
        T l = (*this)(*n.left);
        T r = (*this)(*n.right);
        constexpr bool dual = std::is_same_v<T, Dual>;
        switch (n.op) {
            case BinaryOp::Add:
                if constexpr (dual) return Dual{l.v + r.v, l.d + r.d};
                else return l + r;
            case BinaryOp::Sub:
                if constexpr (dual) return Dual{l.v - r.v, l.d - r.d};
                else return l - r;
            case BinaryOp::Mul:
                return l * r;
            case BinaryOp::Div:
                if (value_of(r) == 0.0) domain(self, "division by zero");
                if constexpr (dual) return Dual{l.v / r.v, (l.d * r.v - l.v * r.d) / (r.v * r.v)};
                else return l / r;
            case BinaryOp::Pow:
                break;
        }
        domain(self, "unknown operator");
    }

    T eval_pow(const Expr& self, const node::Binary& n) const {
        constexpr bool dual = std::is_same_v<T, Dual>;
        T base = (*this)(*n.left);
        double bv = value_of(base);

        const std::optional<double> cexp = constant_exponent(*n.right);
        if (auto k = integer_exponent(cexp)) {
            if (*k >= 0) return repeated_power(base, *k);
            if (bv == 0.0) domain(self, "zero raised to a negative power");
            T p = repeated_power(base, -*k);
            if constexpr (dual) return Dual{1.0 / p.v, -p.d / (p.v * p.v)};
            else return 1.0 / p;
        }

        if (cexp) {
            double ev = *cexp;
            if constexpr (dual) {
                if (!(bv > 0.0)) domain(self, "non-positive base with non-integer exponent");
                double pv = std::pow(bv, ev);
                return Dual{pv, ev * std::pow(bv, ev - 1.0) * base.d};
            } else {
                if (bv < 0.0) domain(self, "negative base with non-integer exponent");
                if (bv == 0.0 && ev < 0.0) domain(self, "zero raised to a negative power");
                return std::pow(bv, ev);
            }
        }

        // u^v = exp(v ln u)
        T expo = (*this)(*n.right);
        if (!(bv > 0.0)) domain(self, "non-positive base with variable exponent");
        double lnb = std::log(bv);
        double pv = std::exp(value_of(expo) * lnb);
        if constexpr (dual) return Dual{pv, pv * (expo.d * lnb + expo.v * base.d / bv)};
        else return pv;
    }
};

double eval_plain(const Expr& e, double x) { return Evaluator<double>(x)(e); }

Expr substitute_impl(const Expr& outer, const Expr& inner) {
    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Constant>) return outer;
            else if constexpr (std::is_same_v<T, node::Variable>) return inner;
            else if constexpr (std::is_same_v<T, node::Unary>)
                return Expr::unary(n.op, substitute_impl(*n.child, inner));
            else
                return Expr::binary(n.op, substitute_impl(*n.left, inner),
                                    substitute_impl(*n.right, inner));
        },
        outer.node());
}

void collect_kinks(const Expr& e, double lo, double hi, std::vector<double>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, node::Unary>) {
                collect_kinks(*n.child, lo, hi, out);
                if (n.op != UnaryOp::Abs) return;
                try {
                    double mid = 0.5 * (lo + hi);
                    DualValue dl = eval_dual(*n.child, lo);
                    DualValue dm = eval_dual(*n.child, mid);
                    DualValue dh = eval_dual(*n.child, hi);
                    double slope = dm.deriv;
                    auto close = [](double u, double v) {
                        return std::fabs(u - v) <= 1e-12 * (1.0 + std::fabs(u) + std::fabs(v));
                    };
                    if (slope == 0.0 || !close(dl.deriv, slope) || !close(dh.deriv, slope)) return;
                    if (!close(dm.value, 0.5 * (dl.value + dh.value))) return;
                    double root = mid - dm.value / slope;
                    if (root > lo && root < hi) out.push_back(root);
                } catch (const DomainError&) {
                }
            } else if constexpr (std::is_same_v<T, node::Binary>) {
                collect_kinks(*n.left, lo, hi, out);
                collect_kinks(*n.right, lo, hi, out);
            }
        },
        e.node());
}

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string unparse(const Expr& e) {
    std::string out;
    unparse_into(e, out);
    return out;
}

double eval(const Expr& e, double x) { return Evaluator<double>(x)(e); }

DualValue eval_dual(const Expr& e, double x) {
    Dual d = Evaluator<Dual>(x)(e);
    return {d.v, d.d};
}

Expr substitute(const Expr& outer, const Expr& inner) { return substitute_impl(outer, inner); }

std::vector<double> abs_kinks(const Expr& e, double lo, double hi) {
    std::vector<double> out;
    collect_kinks(e, lo, hi, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace hhcert
