#include "hhcert/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hhcert {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

class Simpson {
public:
    explicit Simpson(const ScalarFn& g) : g_(g) {}

    // lo_at/hi_at are where the endpoint values are sampled; at an interior
    // breakpoint they sit just inside the panel so a jump there reads as its
    // one-sided limit.
    QuadResult run(double lo, double hi, double tol) { return run(lo, hi, tol, lo, hi); }

    QuadResult run(double lo, double hi, double tol, double lo_at, double hi_at) {
        double flo = eval(lo_at), fhi = eval(hi_at);
        double mid = 0.5 * (lo + hi);
        double fmid = eval(mid);
        double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        QuadResult r;
        r.value = refine(lo, hi, flo, fmid, fhi, whole, tol, 0);
        r.err_estimate = err_;
        r.evaluations = evals_;
        return r;
    }

private:
    const ScalarFn& g_;
    double err_ = 0.0;
    std::size_t evals_ = 0;

    double eval(double x) {
        ++evals_;
        double v = g_(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os.precision(17);
            os << "integrand is not finite at " << x;
            throw QuadratureError(os.str());
        }
        return v;
    }

    double refine(double lo, double hi, double flo, double fmid, double fhi, double whole,
                  double tol, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid);
        const double rm = 0.5 * (mid + hi);
        if (depth >= kMaxSimpsonDepth || !(lo < lm && lm < mid && mid < rm && rm < hi)) {
            std::ostringstream os;
            os.precision(17);
            os << "adaptive Simpson did not converge on [" << lo << ", " << hi
               << "] (maximum depth " << kMaxSimpsonDepth << ")";
            throw QuadratureError(os.str());
        }
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        const double delta = left + right - whole;
        // Below the rounding floor of the panel itself no further split can help.
        const double floor = 32.0 * kEps * (std::fabs(left) + std::fabs(right));
        if (std::fabs(delta) <= 15.0 * tol || std::fabs(delta) <= floor) {
            err_ += std::fabs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return refine(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1) +
               refine(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1);
    }
};

std::vector<double> pieces(double lo, double hi, std::span<const double> breaks) {
    std::vector<double> pts{lo};
    for (double p : breaks)
        if (p > lo && p < hi) pts.push_back(p);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

QuadResult integrate(const ScalarFn& g, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("integrate requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate requires tol > 0");
    return Simpson(g).run(lo, hi, tol);
}

QuadResult integrate(const ScalarFn& g, double lo, double hi, double tol,
                     std::span<const double> breaks) {
    if (!(lo < hi)) throw std::invalid_argument("integrate requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate requires tol > 0");
    const auto pts = pieces(lo, hi, breaks);
    QuadResult total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double l = pts[i], h = pts[i + 1];
        const double nudge = std::min(64.0 * kEps * (std::fabs(l) + std::fabs(h)), 0.25 * (h - l));
        const double l_at = i == 0 ? l : l + nudge;
        const double h_at = i + 2 == pts.size() ? h : h - nudge;
        QuadResult r = Simpson(g).run(l, h, tol * (h - l) / (hi - lo), l_at, h_at);
        total.value += r.value;
        total.err_estimate += r.err_estimate;
        total.evaluations += r.evaluations;
    }
    return total;
}

double hh_gap(const ProblemSpec& spec) {
    require_validated(spec);
    const double pa = spec.phi_a();
    const double pb = spec.phi_b();
    const double delta = pb - pa;
    const auto kinks = abs_kinks(spec.f, pa, pb);
    const Expr& f = spec.f;
    // Integral tolerance scaled so the mean carries an error of at most quad_tol.
    QuadResult integral =
        integrate([&f](double x) { return eval(f, x); }, pa, pb, spec.quad_tol * delta, kinks);
    return 0.5 * (eval(f, pa) + eval(f, pb)) - integral.value / delta;
}

double lemma_rhs(const ProblemSpec& spec) {
    require_validated(spec);
    const double pa = spec.phi_a();
    const double pb = spec.phi_b();
    const double delta = pb - pa;

    std::vector<double> breaks{0.5};
    for (double k : abs_kinks(spec.f, pa, pb)) breaks.push_back((k - pa) / delta);

    const Expr& f = spec.f;
    auto kernel = [&](double t) {
        return (2.0 * t - 1.0) * eval_dual(f, t * pb + (1.0 - t) * pa).deriv;
    };
    QuadResult r = integrate(kernel, 0.0, 1.0, 2.0 * spec.quad_tol / delta, breaks);
    return 0.5 * delta * r.value;
}

GapResult verify_lemma_identity(const ProblemSpec& spec) {
    GapResult r;
    r.lhs_gap = hh_gap(spec);
    r.rhs_identity = lemma_rhs(spec);
    r.residual = std::fabs(r.lhs_gap - r.rhs_identity);
    if (r.residual > 100.0 * spec.quad_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "integral identity violated: gap = " << r.lhs_gap << ", derivative side = "
           << r.rhs_identity << ", residual = " << r.residual << " > 100 * quad_tol";
        throw IdentityViolation(r, os.str());
    }
    return r;
}

}  // namespace hhcert
