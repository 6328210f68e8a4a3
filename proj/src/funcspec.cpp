#include "hhcert/funcspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hhcert {

std::string PhiMap::describe() const { return expr_ ? unparse(*expr_) : "identity"; }

std::optional<double> ProblemSpec::holder_p() const {
    if (!(q > 1.0)) return std::nullopt;
    return q / (q - 1.0);
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ProblemSpec validate(ProblemSpec spec) {
    using Code = ValidationError::Code;
    const auto& iv = spec.interval;

    if (!std::isfinite(iv.a) || !std::isfinite(iv.b) || !(iv.a < iv.b))
        throw ValidationError(Code::IntervalOrder,
                              "interval requires finite a < b (got a = " + num(iv.a) +
                                  ", b = " + num(iv.b) + ")");
    if (!(spec.c >= 0.0) || !std::isfinite(spec.c))
        throw ValidationError(Code::NegativeModulus, "modulus c must be >= 0 (got " + num(spec.c) + ")");
    if (spec.c_f && (!(*spec.c_f >= 0.0) || !std::isfinite(*spec.c_f)))
        throw ValidationError(Code::NegativeModulus,
                              "modulus c_f must be >= 0 (got " + num(*spec.c_f) + ")");
    if (!(spec.q >= 1.0) || !std::isfinite(spec.q))
        throw ValidationError(Code::PowerBelowOne, "power q must be >= 1 (got " + num(spec.q) + ")");
    if (!(spec.quad_tol > 0.0) || !std::isfinite(spec.quad_tol))
        throw ValidationError(Code::BadTolerance, "quad_tol must be > 0");
    if (spec.grid.n_x < 3 || spec.grid.n_y < 3 || spec.grid.n_t < 3)
        throw ValidationError(Code::BadGrid, "grid counts n_x, n_y, n_t must each be >= 3");

    double pa = spec.phi(iv.a);
    double pb = spec.phi(iv.b);
    if (!(pa < pb))
        throw ValidationError(Code::Orientation, "phi must satisfy phi(a) < phi(b) (got phi(a) = " +
                                                     num(pa) + ", phi(b) = " + num(pb) + ")");

    // Report the sample with the largest escape.
    const double eps = 1e-12 * iv.length();
    double worst_escape = 0.0;
    std::optional<double> worst_x;
    double worst_phi = 0.0;
    for (std::size_t i = 0; i < kPhiRangeSamples; ++i) {
        double x = uniform_point(iv, i, kPhiRangeSamples);
        double px = spec.phi(x);
        double escape = std::max(iv.a - eps - px, px - (iv.b + eps));
        if (!std::isfinite(px)) escape = std::numeric_limits<double>::infinity();
        if (escape > worst_escape) {
            worst_escape = escape;
            worst_x = x;
            worst_phi = px;
        }
    }
    if (worst_x)
        throw ValidationError(Code::RangeEscape,
                              "phi leaves [a, b]: phi(" + num(*worst_x) + ") = " + num(worst_phi),
                              worst_x);

    spec.validated = true;
    return spec;
}

void require_validated(const ProblemSpec& spec) {
    if (!spec.validated) throw std::logic_error("problem spec has not been validated");
}

double uniform_point(const Interval& iv, std::size_t i, std::size_t n) {
    if (i + 1 == n) return iv.b;
    return iv.a + iv.length() * (static_cast<double>(i) / static_cast<double>(n - 1));
}

std::vector<double> certificate_t_grid(std::size_t n_t) {
    std::vector<double> ts;
    ts.reserve(n_t + 1);
    for (std::size_t k = 0; k < n_t; ++k)
        ts.push_back(static_cast<double>(k) / static_cast<double>(n_t - 1));
    if (n_t % 2 == 0) ts.insert(ts.begin() + static_cast<std::ptrdiff_t>(n_t / 2), 0.5);
    return ts;
}

TargetFn target_f(const Expr& f) {
    return [f](double u) { return eval(f, u); };
}

TargetFn target_fprime_q(const Expr& f, double q) {
    return [f, q](double u) {
        double d = std::fabs(eval_dual(f, u).deriv);
        return q == 1.0 ? d : std::pow(d, q);
    };
}

namespace {

struct Samples {
    std::vector<double> xs, ys, px, py, gx, gy, ts;
};

double checked_g(const TargetFn& g, double u, double x, double y, double t) {
    try {
        return g(u);
    } catch (const DomainError& e) {
        std::ostringstream os;
        os.precision(17);
        os << e.reason() << " (certifier sample x = " << x << ", y = " << y << ", t = " << t << ")";
        throw DomainError(e.node_text(), e.input(), os.str());
    }
}

Samples sample(const TargetFn& g, const PhiMap& phi, const Interval& iv, const GridConfig& grid) {
    Samples s;
    s.ts = certificate_t_grid(grid.n_t);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        double x = uniform_point(iv, i, grid.n_x);
        s.xs.push_back(x);
        s.px.push_back(phi(x));
        s.gx.push_back(checked_g(g, s.px.back(), x, x, 1.0));
    }
    for (std::size_t j = 0; j < grid.n_y; ++j) {
        double y = uniform_point(iv, j, grid.n_y);
        s.ys.push_back(y);
        s.py.push_back(phi(y));
        s.gy.push_back(checked_g(g, s.py.back(), y, y, 1.0));
    }
    return s;
}

}  // namespace

CertificateResult certify_strong_phi_convexity(const TargetFn& g, const PhiMap& phi,
                                               const Interval& iv, double c,
                                               const GridConfig& grid, CertifyOptions opts) {
    const Samples s = sample(g, phi, iv, grid);
    const std::size_t nt = s.ts.size();
    const bool symmetric = opts.exploit_symmetry && grid.n_x == grid.n_y;

    double scale = 0.0;
    for (double v : s.gx) scale = std::max(scale, std::fabs(v));
    for (double v : s.gy) scale = std::max(scale, std::fabs(v));

    CertificateResult out;
    out.worst_slack = std::numeric_limits<double>::infinity();
    out.threshold = opts.tol * (1.0 + scale);

    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        for (std::size_t j = symmetric ? i : 0; j < s.ys.size(); ++j) {
            const double diff = s.px[i] - s.py[j];
            const double d2 = diff * diff;
            for (std::size_t k = 0; k < nt; ++k) {
                // Complementary weight from the mirrored grid index keeps
                // slack(x,y,t) and slack(y,x,1-t) bitwise identical.
                const double t = s.ts[k];
                const double w = s.ts[nt - 1 - k];
                const double mix = t * s.px[i] + w * s.py[j];
                const double lhs = checked_g(g, mix, s.xs[i], s.ys[j], t);
                const double rhs = (t * s.gx[i] + w * s.gy[j]) - c * (t * w) * d2;
                const double slack = rhs - lhs;
                if (slack < out.worst_slack) {
                    out.worst_slack = slack;
                    out.worst = Witness{s.xs[i], s.ys[j], t, lhs, rhs};
                }
            }
        }
    }

    out.passed = out.worst_slack >= -out.threshold;
    if (!out.passed) out.witness = out.worst;
    return out;
}

double estimate_max_modulus(const TargetFn& g, const PhiMap& phi, const Interval& iv,
                            const GridConfig& grid) {
    const Samples s = sample(g, phi, iv, grid);
    const std::size_t nt = s.ts.size();
    const double min_sep = 1e-9 * iv.length();

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        for (std::size_t j = 0; j < s.ys.size(); ++j) {
            const double diff = s.px[i] - s.py[j];
            if (std::fabs(diff) < min_sep) continue;
            const double d2 = diff * diff;
            for (std::size_t k = 1; k + 1 < nt; ++k) {
                const double t = s.ts[k];
                const double w = s.ts[nt - 1 - k];
                const double mix = t * s.px[i] + w * s.py[j];
                const double excess =
                    (t * s.gx[i] + w * s.gy[j]) - checked_g(g, mix, s.xs[i], s.ys[j], t);
                best = std::min(best, excess / ((t * w) * d2));
                any = true;
            }
        }
    }
    if (!any) throw ModulusError("phi is constant on the sampling grid; no modulus can be estimated");
    return std::max(best, 0.0);
}

}  // namespace hhcert
