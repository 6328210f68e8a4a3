#include "hhcert/bounds.hpp"

#include <cmath>
#include <sstream>

namespace hhcert {

namespace {

struct IdName {
    BoundId id;
    std::string_view name;
};

constexpr IdName kNames[] = {
    {BoundId::SandwichLower, "sandwich_lower"},
    {BoundId::SandwichUpper, "sandwich_upper"},
    {BoundId::PowerMean, "eq2-2"},
    {BoundId::SplitHolder, "eq5"},
    {BoundId::SplitHolderRelaxed, "eq5_7c12"},
    {BoundId::Holder, "eq7"},
    {BoundId::PowerMeanC0, "eq4"},
    {BoundId::SplitHolderC0, "eq6"},
    {BoundId::HolderC0, "eq8"},
    {BoundId::PowerMeanClassical, "eq4_identity"},
    {BoundId::SplitHolderClassical, "eq6_identity"},
    {BoundId::HolderClassical, "eq8_identity"},
    {BoundId::PowerMeanIdentity, "eq2-2_identity"},
    {BoundId::SplitHolderIdentity, "eq5_identity"},
    {BoundId::HolderIdentity, "eq7_identity"},
};

// x^(1/q); exact pass-through at q = 1 so the q = 1 case carries no pow rounding.
double qth_root(double x, double q) { return q == 1.0 ? x : std::pow(x, 1.0 / q); }

double qth_power(double x, double q) { return q == 1.0 ? x : std::pow(x, q); }

double check_bracket(BoundId id, double bracket) {
    if (bracket < 0.0) {
        std::ostringstream os;
        os.precision(17);
        os << bound_id_name(id) << ": bracket " << bracket
           << " < 0, so the supplied c is not usable as a modulus for |f'|^q here"
              " (compare with estimate_max_modulus)";
        throw ModulusInfeasible(id, bracket, os.str());
    }
    return bracket;
}

BoundValue needs_p(BoundId id) {
    BoundValue v;
    v.theorem_id = id;
    v.applicable = false;
    v.inapplicability_reason = "p undefined at q=1";
    return v;
}

// (1/(p+1))^(1/p)
double holder_kernel(double p) { return std::pow(1.0 / (p + 1.0), 1.0 / p); }

}  // namespace

std::string_view bound_id_name(BoundId id) {
    for (const auto& n : kNames)
        if (n.id == id) return n.name;
    return "unknown";
}

std::optional<BoundId> bound_id_from_name(std::string_view name) {
    for (const auto& n : kNames)
        if (n.name == name) return n.id;
    return std::nullopt;
}

bool is_lower_bound(BoundId id) { return id == BoundId::SandwichLower; }

bool uses_derivative(BoundId id) {
    return id != BoundId::SandwichLower && id != BoundId::SandwichUpper;
}

bool needs_identity_phi(BoundId id) {
    switch (id) {
        case BoundId::PowerMeanClassical:
        case BoundId::SplitHolderClassical:
        case BoundId::HolderClassical:
        case BoundId::PowerMeanIdentity:
        case BoundId::SplitHolderIdentity:
        case BoundId::HolderIdentity:
            return true;
        default:
            return false;
    }
}

bool needs_holder_conjugate(BoundId id) {
    switch (id) {
        case BoundId::SplitHolder:
        case BoundId::SplitHolderRelaxed:
        case BoundId::Holder:
        case BoundId::SplitHolderC0:
        case BoundId::HolderC0:
        case BoundId::SplitHolderClassical:
        case BoundId::HolderClassical:
        case BoundId::SplitHolderIdentity:
        case BoundId::HolderIdentity:
            return true;
        default:
            return false;
    }
}

bool is_c0_reduction(BoundId id) {
    switch (id) {
        case BoundId::PowerMeanC0:
        case BoundId::SplitHolderC0:
        case BoundId::HolderC0:
        case BoundId::PowerMeanClassical:
        case BoundId::SplitHolderClassical:
        case BoundId::HolderClassical:
            return true;
        default:
            return false;
    }
}

BoundInputs compute_inputs(const ProblemSpec& spec) {
    BoundInputs in;
    in.phi_a = spec.phi_a();
    in.phi_b = spec.phi_b();
    in.delta = in.phi_b - in.phi_a;
    const double mid = 0.5 * (in.phi_a + in.phi_b);
    in.d_a = std::fabs(eval_dual(spec.f, in.phi_a).deriv);
    in.d_b = std::fabs(eval_dual(spec.f, in.phi_b).deriv);
    in.d_m = std::fabs(eval_dual(spec.f, mid).deriv);
    in.c = spec.modulus_deriv();
    in.q = spec.q;
    in.p = spec.holder_p();

    const double pad = in.delta;
    const double near = 1e-12 * in.delta;
    for (double k : abs_kinks(spec.f, in.phi_a - pad, in.phi_b + pad))
        for (double pt : {in.phi_a, in.phi_b, mid})
            if (std::fabs(k - pt) <= near) in.kink_at_evaluation_point = true;
    return in;
}

Sandwich bound_sandwich(const ProblemSpec& spec) {
    const double pa = spec.phi_a();
    const double pb = spec.phi_b();
    const double d2 = (pb - pa) * (pb - pa);
    const double c = spec.modulus_f();
    Sandwich s;
    s.lower = eval(spec.f, 0.5 * (pa + pb)) + (c / 12.0) * d2;
    s.upper = 0.5 * (eval(spec.f, pa) + eval(spec.f, pb)) - (c / 6.0) * d2;
    return s;
}

BoundValue bound_power_mean(const BoundInputs& in) {
    const double d2 = in.delta * in.delta;
    const double bracket = (qth_power(in.d_b, in.q) + qth_power(in.d_a, in.q)) / 2.0 - (in.c / 8.0) * d2;
    BoundValue v;
    v.theorem_id = BoundId::PowerMean;
    v.value = (in.delta / 4.0) * qth_root(check_bracket(v.theorem_id, bracket), in.q);
    return v;
}

BoundValue bound_power_mean_c0(const BoundInputs& in) {
    const double bracket = (qth_power(in.d_b, in.q) + qth_power(in.d_a, in.q)) / 2.0;
    BoundValue v;
    v.theorem_id = BoundId::PowerMeanC0;
    v.value = (in.delta / 4.0) * qth_root(bracket, in.q);
    return v;
}

BoundValue bound_split_holder(const BoundInputs& in) {
    if (!in.p) return needs_p(BoundId::SplitHolder);
    const double p = *in.p;
    const double d2 = in.delta * in.delta;
    const double dmq = qth_power(in.d_m, in.q);
    const double left = dmq + qth_power(in.d_a, in.q) - (in.c / 3.0) * d2;
    const double right = dmq + qth_power(in.d_b, in.q) - (in.c / 3.0) * d2;
    BoundValue v;
    v.theorem_id = BoundId::SplitHolder;
    check_bracket(v.theorem_id, left);
    check_bracket(v.theorem_id, right);
    const double pref = (in.delta / 4.0) * holder_kernel(p) * std::pow(0.5, 1.0 / in.q);
    v.value = pref * (qth_root(left, in.q) + qth_root(right, in.q));
    return v;
}

BoundValue bound_split_holder_c0(const BoundInputs& in) {
    if (!in.p) return needs_p(BoundId::SplitHolderC0);
    const double p = *in.p;
    const double dmq = qth_power(in.d_m, in.q);
    const double left = dmq + qth_power(in.d_a, in.q);
    const double right = dmq + qth_power(in.d_b, in.q);
    BoundValue v;
    v.theorem_id = BoundId::SplitHolderC0;
    const double pref = (in.delta / 4.0) * holder_kernel(p) * std::pow(0.5, 1.0 / in.q);
    v.value = pref * (qth_root(left, in.q) + qth_root(right, in.q));
    return v;
}

BoundValue bound_split_holder_relaxed(const BoundInputs& in) {
    if (!in.p) return needs_p(BoundId::SplitHolderRelaxed);
    const double p = *in.p;
    const double d2 = in.delta * in.delta;
    const double daq = qth_power(in.d_a, in.q);
    const double dbq = qth_power(in.d_b, in.q);
    const double first = (dbq + 3.0 * daq) / 2.0 - (7.0 * in.c / 12.0) * d2;
    const double second = (3.0 * dbq + daq) / 2.0 - (7.0 * in.c / 12.0) * d2;
    BoundValue v;
    v.theorem_id = BoundId::SplitHolderRelaxed;
    check_bracket(v.theorem_id, first);
    check_bracket(v.theorem_id, second);
    const double pref = (in.delta / 4.0) * holder_kernel(p) * std::pow(0.5, 1.0 / in.q);
    v.value = pref * (qth_root(first, in.q) + qth_root(second, in.q));
    return v;
}

BoundValue bound_holder(const BoundInputs& in) {
    if (!in.p) return needs_p(BoundId::Holder);
    const double d2 = in.delta * in.delta;
    const double bracket = (qth_power(in.d_b, in.q) + qth_power(in.d_a, in.q)) / 2.0 - (in.c / 6.0) * d2;
    BoundValue v;
    v.theorem_id = BoundId::Holder;
    v.value = (in.delta / 2.0) * holder_kernel(*in.p) *
              qth_root(check_bracket(v.theorem_id, bracket), in.q);
    return v;
}

BoundValue bound_holder_c0(const BoundInputs& in) {
    if (!in.p) return needs_p(BoundId::HolderC0);
    const double bracket = (qth_power(in.d_b, in.q) + qth_power(in.d_a, in.q)) / 2.0;
    BoundValue v;
    v.theorem_id = BoundId::HolderC0;
    v.value = (in.delta / 2.0) * holder_kernel(*in.p) * qth_root(bracket, in.q);
    return v;
}

namespace classical {

double power_mean(double a, double b, double da, double db, double q, double c) {
    const double bracket = (qth_power(db, q) + qth_power(da, q)) / 2.0 - (c / 8.0) * ((b - a) * (b - a));
    return ((b - a) / 4.0) * qth_root(check_bracket(BoundId::PowerMeanIdentity, bracket), q);
}

double split_holder(double a, double b, double da, double db, double dm, double q, double c) {
    const double p = q / (q - 1.0);
    const double d2 = (b - a) * (b - a);
    const double dmq = qth_power(dm, q);
    const double left = check_bracket(BoundId::SplitHolderIdentity, dmq + qth_power(da, q) - (c / 3.0) * d2);
    const double right = check_bracket(BoundId::SplitHolderIdentity, dmq + qth_power(db, q) - (c / 3.0) * d2);
    return ((b - a) / 4.0) * holder_kernel(p) * std::pow(0.5, 1.0 / q) *
           (qth_root(left, q) + qth_root(right, q));
}

double holder(double a, double b, double da, double db, double q, double c) {
    const double p = q / (q - 1.0);
    const double bracket = (qth_power(db, q) + qth_power(da, q)) / 2.0 - (c / 6.0) * ((b - a) * (b - a));
    return ((b - a) / 2.0) * holder_kernel(p) *
           qth_root(check_bracket(BoundId::HolderIdentity, bracket), q);
}

double holder_printed_variant(double a, double b, double da, double db, double q, double c) {
    const double p = q / (q - 1.0);
    const double bracket = (qth_power(da, q) + qth_power(db, q)) / 2.0 - (c / 6.0) * ((b - a) * (b - a));
    return ((b - a) / 4.0) * holder_kernel(p) *
           qth_root(check_bracket(BoundId::HolderIdentity, bracket), q);
}

}  // namespace classical

namespace {

std::string cert_failure(BoundId id) {
    if (!uses_derivative(id))
        return "certificate failed: f is not strongly phi-convex with modulus c_f on the grid";
    if (is_c0_reduction(id))
        return "certificate failed: |f'|^q is not phi-convex on the grid";
    return "certificate failed: |f'|^q is not strongly phi-convex with modulus c on the grid";
}

BoundValue evaluate_one(BoundId id, const ProblemSpec& spec, const BoundInputs& in) {
    const double a = spec.interval.a;
    const double b = spec.interval.b;
    auto wrap = [id](double value) {
        BoundValue v;
        v.theorem_id = id;
        v.value = value;
        return v;
    };
    if (needs_holder_conjugate(id) && !in.p) return needs_p(id);
    if (needs_identity_phi(id) && !spec.phi.is_identity()) {
        BoundValue v;
        v.theorem_id = id;
        v.applicable = false;
        v.inapplicability_reason = "phi is not the identity";
        return v;
    }

    switch (id) {
        case BoundId::SandwichLower: return wrap(bound_sandwich(spec).lower);
        case BoundId::SandwichUpper: return wrap(bound_sandwich(spec).upper);
        case BoundId::PowerMean: return bound_power_mean(in);
        case BoundId::SplitHolder: return bound_split_holder(in);
        case BoundId::SplitHolderRelaxed: return bound_split_holder_relaxed(in);
        case BoundId::Holder: return bound_holder(in);
        case BoundId::PowerMeanC0: return bound_power_mean_c0(in);
        case BoundId::SplitHolderC0: return bound_split_holder_c0(in);
        case BoundId::HolderC0: return bound_holder_c0(in);
        case BoundId::PowerMeanClassical:
            return wrap(classical::power_mean(a, b, in.d_a, in.d_b, in.q, 0.0));
        case BoundId::SplitHolderClassical:
            return wrap(classical::split_holder(a, b, in.d_a, in.d_b, in.d_m, in.q, 0.0));
        case BoundId::HolderClassical:
            return wrap(classical::holder(a, b, in.d_a, in.d_b, in.q, 0.0));
        case BoundId::PowerMeanIdentity:
            return wrap(classical::power_mean(a, b, in.d_a, in.d_b, in.q, in.c));
        case BoundId::SplitHolderIdentity:
            return wrap(classical::split_holder(a, b, in.d_a, in.d_b, in.d_m, in.q, in.c));
        case BoundId::HolderIdentity:
            return wrap(classical::holder(a, b, in.d_a, in.d_b, in.q, in.c));
    }
    throw std::logic_error("unhandled bound id");
}

bool split_family(BoundId id) {
    return id == BoundId::SplitHolder || id == BoundId::SplitHolderRelaxed ||
           id == BoundId::SplitHolderIdentity;
}

}  // namespace

std::vector<BoundValue> evaluate_all(const ProblemSpec& spec, const CertificateSet& certs) {
    require_validated(spec);

    std::optional<BoundInputs> inputs;
    std::optional<std::string> input_error;
    try {
        inputs = compute_inputs(spec);
    } catch (const std::exception& e) {
        input_error = e.what();
    }

    std::vector<BoundValue> out;
    for (BoundId id : kAllBounds) {
        BoundValue v;
        v.theorem_id = id;
        const CertStatus cert = !uses_derivative(id) ? certs.f
                                : is_c0_reduction(id) ? certs.fprime_q_c0
                                                      : certs.fprime_q;
        if (cert == CertStatus::Failed) {
            v.applicable = false;
            v.error = cert_failure(id);
            out.push_back(v);
            continue;
        }
        if (uses_derivative(id) && !inputs) {
            v.applicable = false;
            v.error = *input_error;
            out.push_back(v);
            continue;
        }
        try {
            v = evaluate_one(id, spec, inputs ? *inputs : BoundInputs{});
        } catch (const ModulusInfeasible& e) {
            v.applicable = false;
            // The midpoint-split brackets subtract c/3 delta^2, more than a valid
            // modulus guarantees, so they can go negative under a passing
            // certificate. The bound then makes no claim.
            if (split_family(id) && cert == CertStatus::Passed) {
                v.inapplicability_reason = std::string("bracket negative at certified modulus: ") + e.what();
            } else {
                v.error = std::string("modulus-infeasible: ") + e.what();
            }
        } catch (const std::exception& e) {
            v.applicable = false;
            v.error = e.what();
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace hhcert
