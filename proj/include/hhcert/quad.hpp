#pragma once

// Adaptive Simpson quadrature and the Hermite-Hadamard gap / integral identity
// evaluated on both sides independently.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>

#include "hhcert/funcspec.hpp"

namespace hhcert {

using ScalarFn = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double err_estimate = 0.0;
    std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trapezoid-minus-mean (left side of the integral identity) against the
/// kernel-weighted derivative integral (right side).
struct GapResult {
    double lhs_gap = 0.0;
    double rhs_identity = 0.0;
    double residual = 0.0;
};

class IdentityViolation : public std::runtime_error {
public:
    IdentityViolation(const GapResult& r, const std::string& what)
        : std::runtime_error(what), result_(r) {}
    const GapResult& result() const { return result_; }

private:
    GapResult result_;
};

inline constexpr int kMaxSimpsonDepth = 60;

/// Adaptive Simpson with Richardson extrapolation. Each accepted panel
/// satisfies |S2 - S1| / 15 <= its share of `tol` (or sits at the rounding
/// floor of its own magnitude); err_estimate sums those local estimates.
/// Throws QuadratureError past depth 60; DomainError from `g` propagates.
QuadResult integrate(const ScalarFn& g, double lo, double hi, double tol);

/// Same, with the interval pre-split at `breaks` (points outside (lo, hi) are
/// ignored). The tolerance is shared out in proportion to panel length.
QuadResult integrate(const ScalarFn& g, double lo, double hi, double tol,
                     std::span<const double> breaks);

double hh_gap(const ProblemSpec& spec);
double lemma_rhs(const ProblemSpec& spec);

/// Both sides of the identity, computed independently. Throws
/// IdentityViolation when the residual exceeds 100 * quad_tol.
GapResult verify_lemma_identity(const ProblemSpec& spec);

}  // namespace hhcert
