#pragma once

// Closed-form right-hand sides of the Hermite-Hadamard type inequalities for
// functions whose |f'|^q is strongly phi-convex, plus the two-sided sandwich
// for strongly phi-convex f.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hhcert/funcspec.hpp"

namespace hhcert {

/// Every bound the report knows about, in report row order.
enum class BoundId {
    SandwichLower,
    SandwichUpper,
    PowerMean,            // (delta/4) [ (d_b^q + d_a^q)/2 - c/8 delta^2 ]^(1/q)
    SplitHolder,          // midpoint-split Hoelder bound, c/3 corrections
    SplitHolderRelaxed,   // split bound with d_m^q eliminated, 7c/12 corrections
    Holder,               // (delta/2) (1/(p+1))^(1/p) [ ... - c/6 delta^2 ]^(1/q)
    PowerMeanC0,
    SplitHolderC0,
    HolderC0,
    PowerMeanClassical,     // c = 0, phi(t) = t
    SplitHolderClassical,   // c = 0, phi(t) = t
    HolderClassical,        // c = 0, phi(t) = t
    PowerMeanIdentity,      // c > 0 allowed, phi(t) = t
    SplitHolderIdentity,
    HolderIdentity,
};

inline constexpr BoundId kAllBounds[] = {
    BoundId::SandwichLower,        BoundId::SandwichUpper,      BoundId::PowerMean,
    BoundId::SplitHolder,          BoundId::SplitHolderRelaxed, BoundId::Holder,
    BoundId::PowerMeanC0,          BoundId::SplitHolderC0,      BoundId::HolderC0,
    BoundId::PowerMeanClassical,   BoundId::SplitHolderClassical, BoundId::HolderClassical,
    BoundId::PowerMeanIdentity,    BoundId::SplitHolderIdentity, BoundId::HolderIdentity,
};

/// Stable textual id used in reports ("eq2-2", "eq5_7c12", ...).
std::string_view bound_id_name(BoundId id);
std::optional<BoundId> bound_id_from_name(std::string_view name);

/// Lower bounds compare against the integral mean from below; every other
/// bound caps |gap| or the mean from above.
bool is_lower_bound(BoundId id);
bool uses_derivative(BoundId id);
bool needs_identity_phi(BoundId id);
bool needs_holder_conjugate(BoundId id);
/// Reductions evaluated with c = 0.
bool is_c0_reduction(BoundId id);

struct BoundInputs {
    double phi_a = 0.0;
    double phi_b = 0.0;
    double delta = 0.0;
    double d_a = 0.0;  // |f'(phi_a)|
    double d_b = 0.0;  // |f'(phi_b)|
    double d_m = 0.0;  // |f'((phi_a + phi_b) / 2)|
    double c = 0.0;
    double q = 1.0;
    std::optional<double> p;
    /// An abs kink sits at phi_a, phi_b or the midpoint; its derivative was taken as 0.
    bool kink_at_evaluation_point = false;
};

/// Evaluates f' at phi(a), phi(b) and the midpoint by forward-mode AD.
BoundInputs compute_inputs(const ProblemSpec& spec);

struct BoundValue {
    BoundId theorem_id = BoundId::PowerMean;
    double value = 0.0;
    bool applicable = true;
    std::optional<std::string> inapplicability_reason;
    /// Set when the bound could not be evaluated (cert failure, domain error, ...).
    std::optional<std::string> error;
};

/// A bracket under a 1/q power went negative.
class ModulusInfeasible : public std::runtime_error {
public:
    ModulusInfeasible(BoundId id, double bracket, const std::string& what)
        : std::runtime_error(what), id_(id), bracket_(bracket) {}
    BoundId id() const { return id_; }
    double bracket() const { return bracket_; }

private:
    BoundId id_;
    double bracket_;
};

struct Sandwich {
    double lower = 0.0;
    double upper = 0.0;
};

Sandwich bound_sandwich(const ProblemSpec& spec);

BoundValue bound_power_mean(const BoundInputs& in);
BoundValue bound_split_holder(const BoundInputs& in);
BoundValue bound_split_holder_relaxed(const BoundInputs& in);
BoundValue bound_holder(const BoundInputs& in);

/// The c = 0 forms, written out on their own.
BoundValue bound_power_mean_c0(const BoundInputs& in);
BoundValue bound_split_holder_c0(const BoundInputs& in);
BoundValue bound_holder_c0(const BoundInputs& in);

/// Classical forms on [a, b] directly (phi(t) = t). Derivatives are |f'| at
/// a, b and (a + b)/2.
namespace classical {
double power_mean(double a, double b, double da, double db, double q, double c);
double split_holder(double a, double b, double da, double db, double dm, double q, double c);
double holder(double a, double b, double da, double db, double q, double c);
/// Alternative phi(t) = t form of the Hoelder bound with prefactor (b-a)/4
/// instead of (b-a)/2. Diagnostics only.
double holder_printed_variant(double a, double b, double da, double db, double q, double c);
}  // namespace classical

enum class CertStatus { Passed, Failed, NotChecked };

struct CertificateSet {
    CertStatus f = CertStatus::NotChecked;          // f at modulus_f()
    CertStatus fprime_q = CertStatus::NotChecked;   // |f'|^q at modulus_deriv()
    CertStatus fprime_q_c0 = CertStatus::NotChecked;  // |f'|^q at 0
};

/// Every bound in kAllBounds order, with applicability and errors folded into
/// each BoundValue. Throws ValidationError for an invalid spec.
std::vector<BoundValue> evaluate_all(const ProblemSpec& spec, const CertificateSet& certs = {});

}  // namespace hhcert
