#pragma once

// Problem instances (f, [a,b], phi, c, q), their validation, and grid-based
// certification / modulus estimation of strong phi-convexity.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhcert/expr.hpp"

namespace hhcert {

struct Interval {
    double a = 0.0;
    double b = 1.0;

    double length() const { return b - a; }
};

class PhiMap {
public:
    /// phi(t) = t
    PhiMap() = default;
    explicit PhiMap(Expr e) : expr_(std::move(e)) {}

    static PhiMap identity() { return PhiMap(); }

    bool is_identity() const { return !expr_.has_value(); }
    const std::optional<Expr>& expression() const { return expr_; }

    double operator()(double x) const { return expr_ ? eval(*expr_, x) : x; }

    /// "identity" or the unparsed expression.
    std::string describe() const;

private:
    std::optional<Expr> expr_;
};

struct GridConfig {
    std::size_t n_x = 41;
    std::size_t n_y = 41;
    std::size_t n_t = 33;
};

struct ProblemSpec {
    std::string id;
    Expr f = Expr::variable();
    Interval interval;
    PhiMap phi;
    /// Modulus used by the derivative bounds (|f'|^q) and, unless `c_f` is set,
    /// by the sandwich bound on f itself.
    double c = 0.0;
    std::optional<double> c_f;
    double q = 1.0;
    double quad_tol = 1e-10;
    GridConfig grid;
    bool validated = false;

    double modulus_f() const { return c_f.value_or(c); }
    double modulus_deriv() const { return c; }

    /// Hoelder conjugate q/(q-1); empty at q = 1.
    std::optional<double> holder_p() const;

    double phi_a() const { return phi(interval.a); }
    double phi_b() const { return phi(interval.b); }
};

class ValidationError : public std::runtime_error {
public:
    enum class Code {
        IntervalOrder,     // a >= b or non-finite endpoint
        Orientation,       // phi(a) >= phi(b)
        RangeEscape,       // phi(x) leaves [a, b]
        NegativeModulus,   // c < 0
        PowerBelowOne,     // q < 1
        BadTolerance,      // quad_tol <= 0
        BadGrid,           // grid count < 3
    };

    ValidationError(Code code, const std::string& what, std::optional<double> witness = {})
        : std::runtime_error(what), code_(code), witness_(witness) {}

    Code code() const { return code_; }
    /// Offending x for RangeEscape.
    std::optional<double> witness() const { return witness_; }

private:
    Code code_;
    std::optional<double> witness_;
};

inline constexpr std::size_t kPhiRangeSamples = 1001;

/// Checks every structural hypothesis; returns a copy marked validated.
ProblemSpec validate(ProblemSpec spec);

/// Throws std::logic_error if `spec` did not come out of validate().
void require_validated(const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Strong phi-convexity

using TargetFn = std::function<double(double)>;

struct Witness {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    double lhs = 0.0;  // g(t phi(x) + (1-t) phi(y))
    double rhs = 0.0;  // t g(phi(x)) + (1-t) g(phi(y)) - c t (1-t) (phi(x) - phi(y))^2
};

struct CertificateResult {
    bool passed = false;
    double worst_slack = 0.0;
    /// Minimizing sample; reported for passing certificates too.
    Witness worst;
    /// Present iff !passed.
    std::optional<Witness> witness;
    /// Absolute threshold actually applied: tol * (1 + max |g| on the grid).
    double threshold = 0.0;
};

inline constexpr double kDefaultCertTol = 1e-9;

struct CertifyOptions {
    double tol = kDefaultCertTol;
    /// Evaluate only x-index <= y-index, using slack(x,y,t) = slack(y,x,1-t).
    bool exploit_symmetry = true;
};

/// Samples the defining inequality on a uniform x/y grid over [a,b] and a
/// t grid over [0,1] that contains 0, 1/2 and 1. Ties in the minimum go to the
/// lexicographically smallest (x, y, t) grid index.
CertificateResult certify_strong_phi_convexity(const TargetFn& g, const PhiMap& phi,
                                               const Interval& iv, double c,
                                               const GridConfig& grid,
                                               CertifyOptions opts = {});

class ModulusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest c the grid supports: min over t in (0,1), |phi x - phi y| >=
/// 1e-9 (b-a) of the chord excess divided by t(1-t)(phi x - phi y)^2, clamped
/// at 0. Throws ModulusError when phi is constant on the grid.
double estimate_max_modulus(const TargetFn& g, const PhiMap& phi, const Interval& iv,
                            const GridConfig& grid);

/// t grid used by the certifier: uniform with n_t points plus 1/2, symmetric
/// about 1/2.
std::vector<double> certificate_t_grid(std::size_t n_t);

/// Grid point i of n uniform points on [a,b]; the last point is exactly b.
double uniform_point(const Interval& iv, std::size_t i, std::size_t n);

/// g = f itself.
TargetFn target_f(const Expr& f);
/// g = |f'|^q, derivative by forward-mode AD.
TargetFn target_fprime_q(const Expr& f, double q);

}  // namespace hhcert
