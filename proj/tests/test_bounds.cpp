#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "hhcert/bounds.hpp"
#include "hhcert/cli.hpp"
#include "hhcert/quad.hpp"
#include "oracle.hpp"

using namespace hhcert;

namespace {

ProblemSpec spec(const char* f, double a, double b, double c, double q, const char* phi = nullptr) {
    ProblemSpec s;
    s.f = parse(f);
    s.interval = {a, b};
    s.c = c;
    s.q = q;
    if (phi) s.phi = PhiMap(parse(phi));
    return validate(s);
}

BoundInputs inputs(const char* f, double a, double b, double c, double q) {
    return compute_inputs(spec(f, a, b, c, q));
}

const BoundValue& find(const std::vector<BoundValue>& vs, BoundId id) {
    for (const auto& v : vs)
        if (v.theorem_id == id) return v;
    throw std::logic_error("bound missing");
}

bool bit_equal(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

constexpr double e = std::numbers::e;

}  // namespace

TEST_CASE("bound ids round-trip through their names") {
    for (BoundId id : kAllBounds) CHECK(bound_id_from_name(bound_id_name(id)) == id);
    CHECK(bound_id_name(BoundId::PowerMean) == "eq2-2");
    CHECK(bound_id_name(BoundId::SplitHolderRelaxed) == "eq5_7c12");
    CHECK_FALSE(bound_id_from_name("eq99").has_value());
}

TEST_CASE("sandwich") {
    Sandwich s = bound_sandwich(spec("x^2", 0, 1, 0, 1));
    CHECK(s.lower == 0.25);
    CHECK(s.upper == 0.5);

    ProblemSpec sq = spec("x^2", 0, 1, 0, 1);
    sq.c_f = 1.0;
    s = bound_sandwich(sq);
    CHECK(std::fabs(s.lower - 1.0 / 3.0) <= 1e-15);
    CHECK(std::fabs(s.upper - 1.0 / 3.0) <= 1e-15);

    ProblemSpec ex = spec("exp(x)", 0, 1, 0, 1);
    ex.c_f = 0.5;
    s = bound_sandwich(ex);
    CHECK(std::fabs(s.lower - (std::exp(0.5) + 1.0 / 24.0)) <= 1e-14);
    CHECK(std::fabs(s.upper - ((1 + e) / 2 - 1.0 / 12.0)) <= 1e-14);
    CHECK(std::fabs(s.lower - 1.690388) <= 1e-6);
    CHECK(std::fabs(s.upper - 1.775808) <= 1e-6);
    const double mean = oracle::gauss_legendre([](double x) { return std::exp(x); }, 0, 1);
    CHECK(s.lower <= mean);
    CHECK(mean <= s.upper);
}

TEST_CASE("power mean") {
    CHECK(bound_power_mean(inputs("x^2", 0, 1, 0, 1)).value == 0.25);
    CHECK(std::fabs(bound_power_mean(inputs("x^2", 0, 1, 4, 2)).value - 0.25 * std::sqrt(1.5)) <= 1e-15);
    CHECK(std::fabs(bound_power_mean(inputs("x^2", 0, 1, 4, 2)).value - 0.30619) <= 1e-5);
    for (double q : {1.0, 2.0, 3.0}) {
        auto v = bound_power_mean(inputs("-3*x + 1", -1, 3, 0, q));
        CHECK(std::fabs(v.value - 4.0 / 4.0 * 3.0) <= 1e-14);
    }
    CHECK_THROWS_AS(bound_power_mean(inputs("x^2", 0, 1, 40, 2)), ModulusInfeasible);
}

TEST_CASE("split hoelder") {
    const double pref = 0.25 * std::sqrt(1.0 / 3.0) * std::sqrt(0.5);
    auto v0 = bound_split_holder(inputs("x^2", 0, 1, 0, 2));
    CHECK(std::fabs(v0.value - pref * (1.0 + std::sqrt(5.0))) <= 1e-15);
    CHECK(std::fabs(v0.value - 0.33028) <= 1e-5);

    auto v3 = bound_split_holder(inputs("x^2", 0, 1, 3, 2));
    CHECK(std::fabs(v3.value - pref * 2.0) <= 1e-15);
    CHECK(std::fabs(v3.value - 0.20412) <= 1e-5);
    CHECK(v3.value >= 1.0 / 6.0);

    // slope 2 on [0, 1]: both brackets are 2 s^2
    auto lin = bound_split_holder(inputs("2*x + 1", 0, 1, 0, 2));
    CHECK(std::fabs(lin.value - pref * 2.0 * std::sqrt(8.0)) <= 1e-14);

    auto q1 = bound_split_holder(inputs("x^2", 0, 1, 0, 1));
    CHECK_FALSE(q1.applicable);
    CHECK(q1.inapplicability_reason == "p undefined at q=1");

    // 4x^2 has modulus 4 but the c/3 brackets cannot absorb it
    try {
        bound_split_holder(inputs("x^2", 0, 1, 4, 2));
        FAIL("expected ModulusInfeasible");
    } catch (const ModulusInfeasible& ex) {
        CHECK(ex.id() == BoundId::SplitHolder);
        CHECK(ex.bracket() < 0.0);
    }
}

TEST_CASE("relaxed split hoelder") {
    const double pref = 0.25 * std::sqrt(1.0 / 3.0) * std::sqrt(0.5);
    auto v0 = bound_split_holder_relaxed(inputs("x^2", 0, 1, 0, 2));
    CHECK(std::fabs(v0.value - pref * (std::sqrt(2.0) + std::sqrt(6.0))) <= 1e-15);
    CHECK(std::fabs(v0.value - 0.39434) <= 1e-5);
    CHECK(v0.value >= bound_split_holder(inputs("x^2", 0, 1, 0, 2)).value);

    auto v1 = bound_split_holder_relaxed(inputs("x^2", 0, 1, 1, 2));
    CHECK(std::fabs(v1.value - pref * (std::sqrt(2.0 - 7.0 / 12.0) + std::sqrt(6.0 - 7.0 / 12.0))) <= 1e-15);
    CHECK(std::fabs(v1.value - 0.35902) <= 1e-5);

    auto lin = bound_split_holder_relaxed(inputs("2*x + 1", 0, 1, 0, 2));
    CHECK(std::fabs(lin.value - pref * 2.0 * std::sqrt(8.0)) <= 1e-14);
}

TEST_CASE("hoelder") {
    auto v0 = bound_holder(inputs("x^2", 0, 1, 0, 2));
    CHECK(std::fabs(v0.value - 0.5 * std::sqrt(2.0 / 3.0)) <= 1e-15);
    CHECK(std::fabs(v0.value - 0.40825) <= 1e-5);
    auto v4 = bound_holder(inputs("x^2", 0, 1, 4, 2));
    CHECK(std::fabs(v4.value - 1.0 / 3.0) <= 1e-15);
    CHECK(v4.value >= 1.0 / 6.0);
    auto lin = bound_holder(inputs("-2*x", 1, 4, 0, 2));
    CHECK(std::fabs(lin.value - 1.5 * std::sqrt(1.0 / 3.0) * 2.0) <= 1e-14);
    CHECK_FALSE(bound_holder(inputs("x^2", 0, 1, 0, 1)).applicable);
}

TEST_CASE("c = 0 reductions agree to the last bit") {
    const char* fs[] = {"x^2", "exp(x)", "x^4", "abs(x)^3", "x*abs(x) + x^2", "sin(x) + 2*x"};
    for (const char* f : fs) {
        for (double q : {1.0, 1.5, 2.0, 3.0}) {
            for (const char* phi : {static_cast<const char*>(nullptr), "0.5*x + 0.25"}) {
                BoundInputs in = inputs(f, -1, 1, 0, q);
                if (phi) in = compute_inputs(spec(f, -1, 1, 0, q, phi));
                INFO(f << " q=" << q);
                CHECK(bit_equal(bound_power_mean(in).value, bound_power_mean_c0(in).value));
                CHECK(bit_equal(bound_split_holder(in).value, bound_split_holder_c0(in).value));
                CHECK(bit_equal(bound_holder(in).value, bound_holder_c0(in).value));
                if (!phi) {
                    CHECK(bit_equal(bound_power_mean(in).value,
                                    classical::power_mean(-1, 1, in.d_a, in.d_b, q, 0)));
                    if (q > 1) {
                        CHECK(bit_equal(bound_split_holder(in).value,
                                        classical::split_holder(-1, 1, in.d_a, in.d_b, in.d_m, q, 0)));
                        CHECK(bit_equal(bound_holder(in).value,
                                        classical::holder(-1, 1, in.d_a, in.d_b, q, 0)));
                    }
                }
            }
        }
    }
}

TEST_CASE("bounds decrease strictly in c while the bracket is positive") {
    BoundInputs in = inputs("x^2", 0, 1, 0, 2);
    double prev_pm = INFINITY, prev_h = INFINITY, prev_s = INFINITY;
    for (double c = 0.0; c <= 4.0; c += 0.25) {
        in.c = c;
        double pm = bound_power_mean(in).value;
        double h = bound_holder(in).value;
        CHECK(pm < prev_pm);
        CHECK(h < prev_h);
        prev_pm = pm;
        prev_h = h;
        if (c < 3.0) {
            double s = bound_split_holder(in).value;
            CHECK(s < prev_s);
            prev_s = s;
        }
    }
}

TEST_CASE("power mean is continuous at q = 1") {
    const char* fs[] = {"x^2", "exp(x)", "x^4 - x"};
    for (const char* f : fs) {
        BoundInputs in = inputs(f, 0.5, 1.5, 0, 1);
        const double at1 = bound_power_mean(in).value;
        in.q = 1.0 + 1e-9;
        in.p = in.q / (in.q - 1.0);
        CHECK(std::fabs(bound_power_mean(in).value - at1) <= 1e-6 * at1);
    }
}

TEST_CASE("printed hoelder variant is half the implemented identity form") {
    const double impl = classical::holder(0, 1, 0, 2, 2, 0);
    const double printed = classical::holder_printed_variant(0, 1, 0, 2, 2, 0);
    CHECK(std::fabs(printed - impl / 2) <= 1e-15);
}

TEST_CASE("evaluate_all") {
    ProblemSpec s = spec("x^2", 0, 1, 0, 1);
    auto all = evaluate_all(s, {CertStatus::Passed, CertStatus::Passed, CertStatus::Passed});
    REQUIRE(all.size() == std::size(kAllBounds));
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].theorem_id == kAllBounds[i]);
    CHECK(find(all, BoundId::SandwichLower).applicable);
    CHECK(find(all, BoundId::PowerMean).applicable);
    CHECK(find(all, BoundId::PowerMean).value == 0.25);
    CHECK_FALSE(find(all, BoundId::SplitHolder).applicable);
    CHECK_FALSE(find(all, BoundId::Holder).applicable);
    CHECK(find(all, BoundId::Holder).inapplicability_reason == "p undefined at q=1");

    ProblemSpec s2 = spec("x^2", 0, 1, 0, 2);
    s2.c_f = 1.0;
    all = evaluate_all(s2, {CertStatus::Passed, CertStatus::Passed, CertStatus::Passed});
    for (BoundId id : {BoundId::SandwichLower, BoundId::SandwichUpper, BoundId::PowerMean,
                       BoundId::SplitHolder, BoundId::SplitHolderRelaxed, BoundId::Holder})
        CHECK(find(all, id).applicable);

    ProblemSpec aff = spec("x^2", 0, 2, 0, 2, "0.5*x");
    all = evaluate_all(aff);
    CHECK(find(all, BoundId::PowerMean).applicable);
    CHECK_FALSE(find(all, BoundId::PowerMeanClassical).applicable);
    CHECK(find(all, BoundId::HolderIdentity).inapplicability_reason == "phi is not the identity");

    all = evaluate_all(s2, {CertStatus::Passed, CertStatus::Failed, CertStatus::Passed});
    CHECK(find(all, BoundId::PowerMean).error.has_value());
    CHECK_FALSE(find(all, BoundId::PowerMeanC0).error.has_value());
    CHECK_FALSE(find(all, BoundId::SandwichLower).error.has_value());

    // c = 4 is a valid modulus for 4x^2: split brackets go negative, no claim is made
    all = evaluate_all(spec("x^2", 0, 1, 4, 2), {CertStatus::Passed, CertStatus::Passed, CertStatus::Passed});
    CHECK_FALSE(find(all, BoundId::SplitHolder).applicable);
    CHECK_FALSE(find(all, BoundId::SplitHolder).error.has_value());
    CHECK(find(all, BoundId::PowerMean).applicable);
    // an uncertified infeasible modulus is an error
    all = evaluate_all(spec("x^2", 0, 1, 40, 2));
    CHECK(find(all, BoundId::PowerMean).error.has_value());

    ProblemSpec bad;
    bad.f = parse("x");
    bad.interval = {1, 0};
    CHECK_THROWS_AS(evaluate_all(bad), std::logic_error);
}

TEST_CASE("corpus: bounds dominate the gap and brackets stay nonnegative") {
    for (const ProblemSpec& s : cli::builtin_corpus()) {
        INFO(s.id);
        const double gap = std::fabs(hh_gap(s));
        const double cstar = estimate_max_modulus(target_fprime_q(s.f, s.q), s.phi, s.interval, s.grid);
        BoundInputs in = compute_inputs(s);
        REQUIRE(in.c <= cstar);
        const double bracket = (std::pow(in.d_a, s.q) + std::pow(in.d_b, s.q)) / 2 - in.c / 8 * in.delta * in.delta;
        CHECK(bracket >= in.c / 24 * in.delta * in.delta - 1e-9);

        for (const auto& v : evaluate_all(s, {CertStatus::Passed, CertStatus::Passed, CertStatus::Passed})) {
            CHECK_FALSE(v.error.has_value());
            if (!v.applicable || !uses_derivative(v.theorem_id)) continue;
            CHECK(gap <= v.value + 1e-8);
        }
        Sandwich sw = bound_sandwich(s);
        const double mean = 0.5 * (eval(s.f, s.phi_a()) + eval(s.f, s.phi_b())) - hh_gap(s);
        CHECK(sw.lower - 1e-8 <= mean);
        CHECK(mean <= sw.upper + 1e-8);
    }
}
