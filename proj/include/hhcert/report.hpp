#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hhcert/bounds.hpp"
#include "hhcert/funcspec.hpp"
#include "hhcert/quad.hpp"

namespace hhcert {

enum class RowStatus { Holds, Violated, Inapplicable, Error };

std::string to_string(RowStatus s);
RowStatus status_from_string(const std::string& s);

inline constexpr double kMarginTol = 1e-8;

struct ReportRow {
    std::string theorem_id;
    RowStatus status = RowStatus::Inapplicable;
    std::optional<double> bound;
    /// Quantity the bound is compared with: |gap| for right-hand-side bounds,
    /// the integral mean for sandwich rows.
    std::optional<double> gap;
    std::optional<double> margin;
    std::optional<double> tightness;
    std::string notes;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct CertificateSummary {
    std::string target;  // "f" or "fprime_q"
    double modulus = 0.0;
    std::string status;  // "passed", "failed", "not_checked"
    std::optional<double> worst_slack;
    std::optional<double> threshold;
    std::optional<double> witness_x;
    std::optional<double> witness_y;
    std::optional<double> witness_t;

    friend bool operator==(const CertificateSummary&, const CertificateSummary&) = default;
};

struct BoundReport {
    std::string spec_id;
    /// Signed trapezoid-minus-mean.
    std::optional<double> gap;
    std::optional<double> lemma_residual;
    std::vector<CertificateSummary> certificates;
    std::vector<ReportRow> rows;

    friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

struct NamedCertificate {
    std::string target;
    double modulus = 0.0;
    CertStatus status = CertStatus::NotChecked;
    std::optional<CertificateResult> result;
};

/// `gap` is empty when the identity check failed; `gap_error` then explains why
/// and every evaluated row becomes ERROR.
BoundReport build_report(const ProblemSpec& spec, const std::vector<NamedCertificate>& certificates,
                         const std::optional<GapResult>& gap, const std::vector<BoundValue>& bounds,
                         const std::string& gap_error = {});

/// True when every row is HOLDS or INAPPLICABLE.
bool report_ok(const BoundReport& r);

enum class Format { Csv, Json };

/// Reals with 17 significant digits, locale independent.
std::string format_real(double v);

inline constexpr const char* kCsvHeader = "spec_id,theorem_id,status,bound,gap,margin,tightness,notes";

std::string serialize(const BoundReport& r, Format fmt);
/// Batch form: one CSV header for all reports, or a JSON array.
std::string serialize(const std::vector<BoundReport>& rs, Format fmt);

nlohmann::json to_json(const BoundReport& r);
BoundReport report_from_json(const nlohmann::json& j);

}  // namespace hhcert
