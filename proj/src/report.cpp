#include "hhcert/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hhcert {

std::string to_string(RowStatus s) {
    switch (s) {
        case RowStatus::Holds: return "HOLDS";
        case RowStatus::Violated: return "VIOLATED";
        case RowStatus::Inapplicable: return "INAPPLICABLE";
        case RowStatus::Error: return "ERROR";
    }
    return "ERROR";
}

RowStatus status_from_string(const std::string& s) {
    if (s == "HOLDS") return RowStatus::Holds;
    if (s == "VIOLATED") return RowStatus::Violated;
    if (s == "INAPPLICABLE") return RowStatus::Inapplicable;
    if (s == "ERROR") return RowStatus::Error;
    throw std::invalid_argument("unknown row status: " + s);
}

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

const char* cert_status_name(CertStatus s) {
    switch (s) {
        case CertStatus::Passed: return "passed";
        case CertStatus::Failed: return "failed";
        case CertStatus::NotChecked: return "not_checked";
    }
    return "not_checked";
}

std::string cert_target_for(BoundId id) {
    if (!uses_derivative(id)) return "f";
    return is_c0_reduction(id) ? "fprime_q_c0" : "fprime_q";
}

void append_note(std::string& notes, const std::string& more) {
    if (more.empty()) return;
    if (!notes.empty()) notes += "; ";
    notes += more;
}

// ratio num/den when both are positive, 0 otherwise
double ratio_or_zero(double num, double den) {
    if (num > 0.0 && den > 0.0) return num / den;
    return 0.0;
}

}  // namespace

BoundReport build_report(const ProblemSpec& spec, const std::vector<NamedCertificate>& certificates,
                         const std::optional<GapResult>& gap, const std::vector<BoundValue>& bounds,
                         const std::string& gap_error) {
    BoundReport r;
    r.spec_id = spec.id;
    if (gap) {
        r.gap = gap->lhs_gap;
        r.lemma_residual = gap->residual;
    }

    for (const auto& c : certificates) {
        CertificateSummary s;
        s.target = c.target;
        s.modulus = c.modulus;
        s.status = cert_status_name(c.status);
        if (c.result) {
            s.worst_slack = c.result->worst_slack;
            s.threshold = c.result->threshold;
            if (c.result->witness) {
                s.witness_x = c.result->witness->x;
                s.witness_y = c.result->witness->y;
                s.witness_t = c.result->witness->t;
            }
        }
        r.certificates.push_back(std::move(s));
    }

    auto cert_status = [&](const std::string& target) {
        for (const auto& c : certificates)
            if (c.target == target) return c.status;
        return CertStatus::NotChecked;
    };

    std::optional<double> mean;
    std::string mean_error;
    if (gap) {
        try {
            const double trap = 0.5 * (eval(spec.f, spec.phi_a()) + eval(spec.f, spec.phi_b()));
            mean = trap - gap->lhs_gap;
        } catch (const std::exception& e) {
            mean_error = e.what();
        }
    }

    bool kink = false;
    try {
        kink = compute_inputs(spec).kink_at_evaluation_point;
    } catch (const std::exception&) {
    }

    for (const auto& bv : bounds) {
        ReportRow row;
        row.theorem_id = std::string(bound_id_name(bv.theorem_id));
        if (bv.error) {
            row.status = RowStatus::Error;
            row.notes = *bv.error;
        } else if (!bv.applicable) {
            row.status = RowStatus::Inapplicable;
            row.notes = bv.inapplicability_reason.value_or("");
        } else if (!gap || !mean) {
            row.status = RowStatus::Error;
            row.bound = bv.value;
            row.notes = gap ? mean_error : gap_error;
        } else {
            row.bound = bv.value;
            const bool lower = is_lower_bound(bv.theorem_id);
            const bool sandwich = !uses_derivative(bv.theorem_id);
            const double compared = sandwich ? *mean : std::fabs(*r.gap);
            row.gap = compared;
            row.margin = lower ? compared - bv.value : bv.value - compared;
            if (lower) row.tightness = ratio_or_zero(bv.value, compared);
            else row.tightness = ratio_or_zero(compared, bv.value);

            if (*row.margin >= -kMarginTol) {
                row.status = RowStatus::Holds;
            } else if (cert_status(cert_target_for(bv.theorem_id)) == CertStatus::Passed) {
                row.status = RowStatus::Violated;
                row.notes = "bound exceeded under passing certificates";
            } else {
                row.status = RowStatus::Error;
                row.notes = "bound exceeded; hypotheses not certified";
            }
            if (kink && uses_derivative(bv.theorem_id))
                append_note(row.notes, "abs kink at a derivative evaluation point; derivative taken as 0");
            if (bv.theorem_id == BoundId::HolderIdentity || bv.theorem_id == BoundId::HolderClassical)
                append_note(row.notes, "prefactor (b-a)/2; the printed identity-map form uses (b-a)/4 (see --diagnostics)");
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

bool report_ok(const BoundReport& r) {
    for (const auto& row : r.rows)
        if (row.status == RowStatus::Violated || row.status == RowStatus::Error) return false;
    return true;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

void append_csv_rows(const BoundReport& r, std::string& out) {
    for (const auto& row : r.rows) {
        out += csv_field(r.spec_id);
        out += ',';
        out += csv_field(row.theorem_id);
        out += ',';
        out += to_string(row.status);
        out += ',';
        out += csv_real(row.bound);
        out += ',';
        out += csv_real(row.gap);
        out += ',';
        out += csv_real(row.margin);
        out += ',';
        out += csv_real(row.tightness);
        out += ',';
        out += csv_field(row.notes);
        out += '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json opt(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> get_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json j;
    j["spec_id"] = r.spec_id;
    j["gap"] = opt(r.gap);
    j["lemma_residual"] = opt(r.lemma_residual);
    j["certificates"] = nlohmann::json::array();
    for (const auto& c : r.certificates) {
        j["certificates"].push_back({
            {"target", c.target},
            {"modulus", c.modulus},
            {"status", c.status},
            {"worst_slack", opt(c.worst_slack)},
            {"threshold", opt(c.threshold)},
            {"witness_x", opt(c.witness_x)},
            {"witness_y", opt(c.witness_y)},
            {"witness_t", opt(c.witness_t)},
        });
    }
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({
            {"theorem_id", row.theorem_id},
            {"status", to_string(row.status)},
            {"bound", opt(row.bound)},
            {"gap", opt(row.gap)},
            {"margin", opt(row.margin)},
            {"tightness", opt(row.tightness)},
            {"notes", row.notes},
        });
    }
    return j;
}

BoundReport report_from_json(const nlohmann::json& j) {
    BoundReport r;
    r.spec_id = j.at("spec_id").get<std::string>();
    r.gap = get_opt(j, "gap");
    r.lemma_residual = get_opt(j, "lemma_residual");
    for (const auto& c : j.at("certificates")) {
        CertificateSummary s;
        s.target = c.at("target").get<std::string>();
        s.modulus = c.at("modulus").get<double>();
        s.status = c.at("status").get<std::string>();
        s.worst_slack = get_opt(c, "worst_slack");
        s.threshold = get_opt(c, "threshold");
        s.witness_x = get_opt(c, "witness_x");
        s.witness_y = get_opt(c, "witness_y");
        s.witness_t = get_opt(c, "witness_t");
        r.certificates.push_back(std::move(s));
    }
    for (const auto& jr : j.at("rows")) {
        ReportRow row;
        row.theorem_id = jr.at("theorem_id").get<std::string>();
        row.status = status_from_string(jr.at("status").get<std::string>());
        row.bound = get_opt(jr, "bound");
        row.gap = get_opt(jr, "gap");
        row.margin = get_opt(jr, "margin");
        row.tightness = get_opt(jr, "tightness");
        row.notes = jr.at("notes").get<std::string>();
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string serialize(const BoundReport& r, Format fmt) {
    if (fmt == Format::Json) return to_json(r).dump(2) + "\n";
    std::string out = std::string(kCsvHeader) + "\n";
    append_csv_rows(r, out);
    return out;
}

std::string serialize(const std::vector<BoundReport>& rs, Format fmt) {
    if (fmt == Format::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rs) arr.push_back(to_json(r));
        return arr.dump(2) + "\n";
    }
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rs) append_csv_rows(r, out);
    return out;
}

}  // namespace hhcert
