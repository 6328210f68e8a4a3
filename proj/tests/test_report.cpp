#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "hhcert/cli.hpp"
#include "hhcert/report.hpp"

using namespace hhcert;

namespace {

ProblemSpec spec(const char* f, double a, double b, double c, double q) {
    ProblemSpec s;
    s.id = "t";
    s.f = parse(f);
    s.interval = {a, b};
    s.c = c;
    s.q = q;
    return validate(s);
}

const ReportRow& row(const BoundReport& r, const char* id) {
    for (const auto& x : r.rows)
        if (x.theorem_id == id) return x;
    throw std::logic_error(std::string("row missing: ") + id);
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// naive split; the generated notes in these tests carry no commas
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double random_real(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 5);
    switch (kind(rng)) {
        case 0: return std::uniform_real_distribution<double>(-1, 1)(rng);
        case 1: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1)(rng),
                                  std::uniform_int_distribution<int>(-1070, 1000)(rng));
        case 2: return -std::ldexp(std::uniform_real_distribution<double>(0.5, 1)(rng),
                                   std::uniform_int_distribution<int>(-300, 300)(rng));
        case 3: return std::numeric_limits<double>::denorm_min() * std::uniform_int_distribution<int>(1, 1000)(rng);
        case 4: return 0.1 * std::uniform_int_distribution<int>(-100, 100)(rng);
        default: {
            std::uint64_t bits = rng();
            double d;
            std::memcpy(&d, &bits, sizeof d);
            return std::isfinite(d) ? d : 1.0;
        }
    }
}

std::optional<double> maybe_real(std::mt19937_64& rng) {
    if (rng() % 4 == 0) return std::nullopt;
    return random_real(rng);
}

BoundReport random_report(std::mt19937_64& rng) {
    static const char* notes[] = {"", "p undefined at q=1", "a, \"quoted\" note", "multi\nline", "ünïcode"};
    BoundReport r;
    r.spec_id = "spec-" + std::to_string(rng() % 1000);
    r.gap = maybe_real(rng);
    r.lemma_residual = maybe_real(rng);
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
        CertificateSummary c;
        c.target = rng() % 2 ? "f" : "fprime_q";
        c.modulus = random_real(rng);
        c.status = rng() % 2 ? "passed" : "failed";
        c.worst_slack = maybe_real(rng);
        c.threshold = maybe_real(rng);
        c.witness_x = maybe_real(rng);
        c.witness_y = maybe_real(rng);
        c.witness_t = maybe_real(rng);
        r.certificates.push_back(c);
    }
    for (int i = 0, n = static_cast<int>(rng() % 16); i < n; ++i) {
        ReportRow row;
        row.theorem_id = std::string(bound_id_name(kAllBounds[rng() % std::size(kAllBounds)]));
        row.status = static_cast<RowStatus>(rng() % 4);
        row.bound = maybe_real(rng);
        row.gap = maybe_real(rng);
        row.margin = maybe_real(rng);
        row.tightness = maybe_real(rng);
        row.notes = notes[rng() % std::size(notes)];
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace

TEST_CASE("report rows for x^2 with q = 1") {
    BoundReport r = cli::run_check(spec("x^2", 0, 1, 0, 1), true);
    REQUIRE(r.rows.size() == std::size(kAllBounds));
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].theorem_id == bound_id_name(kAllBounds[i]));

    const ReportRow& pm = row(r, "eq2-2");
    CHECK(pm.status == RowStatus::Holds);
    CHECK(*pm.bound == 0.25);
    CHECK(std::fabs(*pm.gap - 1.0 / 6.0) <= 1e-10);
    CHECK(std::fabs(*pm.margin - 1.0 / 12.0) <= 1e-10);
    CHECK(std::fabs(*pm.tightness - 2.0 / 3.0) <= 1e-9);

    for (const char* id : {"eq5", "eq7", "eq5_7c12"}) {
        CHECK(row(r, id).status == RowStatus::Inapplicable);
        CHECK(row(r, id).notes == "p undefined at q=1");
        CHECK_FALSE(row(r, id).bound.has_value());
    }
    CHECK(report_ok(r));
}

TEST_CASE("sandwich rows at the equality case") {
    ProblemSpec s = spec("x^2", 0, 1, 0, 2);
    s.c_f = 1.0;
    BoundReport r = cli::run_check(s, true);
    for (const char* id : {"sandwich_lower", "sandwich_upper"}) {
        CHECK(row(r, id).status == RowStatus::Holds);
        CHECK(std::fabs(*row(r, id).margin) <= 1e-10);
        CHECK(std::fabs(*row(r, id).tightness - 1.0) <= 1e-9);
    }
    for (const auto& x : r.rows) {
        if (x.status != RowStatus::Holds || !(*x.bound > 0)) continue;
        CHECK(*x.tightness >= 0.0);
        CHECK(*x.tightness <= 1.0 + 1e-8);
    }
}

TEST_CASE("margin sign decides VIOLATED versus ERROR by certificate status") {
    ProblemSpec s = spec("x^2", 0, 1, 0, 1);
    GapResult g{1.0 / 6.0, 1.0 / 6.0, 0.0};
    BoundValue too_small;
    too_small.theorem_id = BoundId::PowerMean;
    too_small.value = 0.1;

    std::vector<NamedCertificate> passed{{"fprime_q", 0.0, CertStatus::Passed, std::nullopt}};
    BoundReport r = build_report(s, passed, g, {too_small});
    CHECK(r.rows[0].status == RowStatus::Violated);
    CHECK_FALSE(report_ok(r));

    r = build_report(s, {}, g, {too_small});
    CHECK(r.rows[0].status == RowStatus::Error);

    // inside the margin tolerance
    too_small.value = 1.0 / 6.0 - 0.5e-8;
    r = build_report(s, passed, g, {too_small});
    CHECK(r.rows[0].status == RowStatus::Holds);

    r = build_report(s, passed, std::nullopt, {too_small}, "identity failed");
    CHECK(r.rows[0].status == RowStatus::Error);
    CHECK(r.rows[0].notes == "identity failed");

    BoundValue errored;
    errored.theorem_id = BoundId::Holder;
    errored.applicable = false;
    errored.error = "boom";
    r = build_report(s, passed, g, {errored});
    CHECK(r.rows[0].status == RowStatus::Error);
    CHECK(r.rows[0].notes == "boom");
}

TEST_CASE("format_real round-trips and ignores locale") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double v = random_real(rng);
        const std::string s = format_real(v);
        CHECK(s.find(',') == std::string::npos);
        double back = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
    CHECK(format_real(0.25) == "0.25");
}

TEST_CASE("csv layout") {
    BoundReport empty;
    empty.spec_id = "e";
    CHECK(serialize(empty, Format::Csv) == std::string(kCsvHeader) + "\n");

    BoundReport one = empty;
    ReportRow x;
    x.theorem_id = "eq2-2";
    x.status = RowStatus::Holds;
    x.bound = 0.25;
    one.rows.push_back(x);
    const auto lines = split_lines(serialize(one, Format::Csv));
    REQUIRE(lines.size() == 2);
    CHECK(lines[1] == "e,eq2-2,HOLDS,0.25,,,,");

    one.rows[0].notes = "a, \"b\"";
    CHECK(split_lines(serialize(one, Format::Csv))[1] == "e,eq2-2,HOLDS,0.25,,,,\"a, \"\"b\"\"\"");
}

TEST_CASE("csv of real reports: line count and exact reals") {
    std::vector<BoundReport> reports;
    for (const char* f : {"x^2", "exp(x)", "x^4 - x"})
        for (double q : {1.0, 2.0}) reports.push_back(cli::run_check(spec(f, 0, 1, 0, q), true));
    std::size_t rows = 0;
    for (const auto& r : reports) rows += r.rows.size();

    const auto lines = split_lines(serialize(reports, Format::Csv));
    REQUIRE(lines.size() == rows + 1);
    CHECK(lines[0] == kCsvHeader);

    std::size_t k = 1;
    for (const auto& r : reports) {
        for (const auto& rr : r.rows) {
            auto fields = split_fields(lines[k++]);
            REQUIRE(fields.size() >= 8);
            CHECK(fields[0] == r.spec_id);
            CHECK(fields[1] == rr.theorem_id);
            CHECK(status_from_string(fields[2]) == rr.status);
            const std::optional<double>* reals[] = {&rr.bound, &rr.gap, &rr.margin, &rr.tightness};
            for (int i = 0; i < 4; ++i) {
                const std::string& fld = fields[3 + i];
                if (!reals[i]->has_value()) {
                    CHECK(fld.empty());
                    continue;
                }
                double back = 0;
                auto res = std::from_chars(fld.data(), fld.data() + fld.size(), back);
                REQUIRE(res.ec == std::errc());
                CHECK(std::memcmp(&back, &**reals[i], sizeof back) == 0);
            }
        }
    }
}

TEST_CASE("json round trip on randomized reports") {
    std::mt19937_64 rng(17);
    std::vector<BoundReport> all;
    for (int i = 0; i < 100; ++i) {
        BoundReport r = random_report(rng);
        BoundReport back = report_from_json(nlohmann::json::parse(serialize(r, Format::Json)));
        CHECK(back == r);
        all.push_back(std::move(r));
    }
    auto arr = nlohmann::json::parse(serialize(all, Format::Json));
    REQUIRE(arr.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(report_from_json(arr[i]) == all[i]);
}

TEST_CASE("json field names") {
    BoundReport r = cli::run_check(spec("x^2", 0, 1, 0, 1), true);
    auto j = to_json(r);
    for (const char* k : {"spec_id", "gap", "lemma_residual", "certificates", "rows"}) CHECK(j.contains(k));
    for (const char* k : {"theorem_id", "status", "bound", "gap", "margin", "tightness", "notes"})
        CHECK(j["rows"][0].contains(k));
    CHECK(j["rows"][2]["theorem_id"] == "eq2-2");
    CHECK(j["rows"][2]["status"] == "HOLDS");
}

TEST_CASE("status strings") {
    for (RowStatus s : {RowStatus::Holds, RowStatus::Violated, RowStatus::Inapplicable, RowStatus::Error})
        CHECK(status_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(status_from_string("OK"), std::invalid_argument);
}
